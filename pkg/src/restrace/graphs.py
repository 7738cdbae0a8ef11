"""Monoidal graphs, device graphs, effectful graphs, and their morphisms.

A monoidal graph declares typed generators between words of objects.  A
device graph adds a set of shared devices and assigns each generator the
subset of devices it uses; two generators are *orthogonal* when their
device sets are disjoint.  An effectful graph singles out a pure part (a
monoidal graph over the same objects) and embeds it device-freely into
the device graph.

All values are immutable after construction.  ``validate_*`` functions
never raise: they return a list of human-readable violations so callers
can report every problem at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

__all__ = [
    "GraphError",
    "Word",
    "MonoidalGraph",
    "DeviceGraph",
    "EffectfulGraph",
    "MonoidalGraphMorphism",
    "DeviceGraphMorphism",
    "EffectfulGraphMorphism",
    "is_valid_name",
    "validate_monoidal_graph",
    "validate_device_graph",
    "validate_effectful_graph",
    "check_monoidal_graph_morphism",
    "check_device_graph_morphism",
    "check_effectful_graph_morphism",
    "orthogonal",
    "device_free",
    "identity_device_morphism",
    "identity_effectful_morphism",
]

_RESERVED = set("#;@|()")


class GraphError(ValueError):
    """A name is unknown to the graph, or a construction is ill-typed."""


def is_valid_name(name: str) -> bool:
    """Name tokens are non-empty and avoid whitespace and ``# ; @ | ( )``."""
    if not name:
        return False
    return not any(ch.isspace() or ch in _RESERVED for ch in name)


class Word:
    """An ordered list of object names.  ``+`` concatenates; the empty
    word is the unit.  Words compare and hash by content."""

    __slots__ = ("items",)

    def __init__(self, *items: str):
        for it in items:
            if not isinstance(it, str):
                raise TypeError(f"object names must be strings, got {it!r}")
        object.__setattr__(self, "items", tuple(items))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(*self.items, *other.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[str]:
        return iter(self.items)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return Word(*self.items[key])
        return self.items[key]

    def __bool__(self) -> bool:
        return bool(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.items == other.items

    def __hash__(self) -> int:
        return hash(("Word", self.items))

    def __repr__(self) -> str:
        return "Word({})".format(", ".join(repr(x) for x in self.items))

    def __str__(self) -> str:
        return " ".join(self.items)

    def sort_key(self) -> tuple:
        return (len(self.items), self.items)


EMPTY = Word()


@dataclass(frozen=True)
class MonoidalGraph:
    """Objects plus generators with source and target words."""

    objects: frozenset[str]
    generators: Mapping[str, tuple[Word, Word]]

    def __post_init__(self):
        object.__setattr__(self, "objects", frozenset(self.objects))
        object.__setattr__(self, "generators", dict(self.generators))

    def dom(self, gen: str) -> Word:
        try:
            return self.generators[gen][0]
        except KeyError:
            raise GraphError(f"unknown generator {gen!r}") from None

    def cod(self, gen: str) -> Word:
        try:
            return self.generators[gen][1]
        except KeyError:
            raise GraphError(f"unknown generator {gen!r}") from None

    def has_word(self, w: Word) -> bool:
        return all(x in self.objects for x in w)


@dataclass(frozen=True)
class DeviceGraph:
    """A monoidal graph whose generators each use a set of devices."""

    underlying: MonoidalGraph
    devices: frozenset[str]
    dev: Mapping[str, frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "devices", frozenset(self.devices))
        object.__setattr__(
            self, "dev", {g: frozenset(ds) for g, ds in dict(self.dev).items()}
        )

    @property
    def objects(self) -> frozenset[str]:
        return self.underlying.objects

    @property
    def generators(self) -> Mapping[str, tuple[Word, Word]]:
        return self.underlying.generators

    def dom(self, gen: str) -> Word:
        return self.underlying.dom(gen)

    def cod(self, gen: str) -> Word:
        return self.underlying.cod(gen)

    def devices_of(self, gen: str) -> frozenset[str]:
        if gen not in self.underlying.generators:
            raise GraphError(f"unknown generator {gen!r}")
        return self.dev.get(gen, frozenset())


@dataclass(frozen=True)
class EffectfulGraph:
    """A pure monoidal graph embedded device-freely in a device graph.

    ``embed`` sends each pure generator to an impure generator with the
    same source and target and an empty device set.
    """

    pure: MonoidalGraph
    impure: DeviceGraph
    embed: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "embed", dict(self.embed))


def _check_names(names: Iterable[str], kind: str, out: list[str]) -> None:
    for name in names:
        if not is_valid_name(name):
            out.append(f"invalid {kind} name {name!r}")


def validate_monoidal_graph(g: MonoidalGraph) -> list[str]:
    """Return all invariant violations (empty list means the graph is ok)."""
    out: list[str] = []
    _check_names(g.objects, "object", out)
    _check_names(g.generators, "generator", out)
    for gen, (dom, cod) in sorted(g.generators.items()):
        for side, word in (("dom", dom), ("cod", cod)):
            for x in word:
                if x not in g.objects:
                    out.append(f"generator {gen!r} {side} uses unknown object {x!r}")
    return out


def validate_device_graph(g: DeviceGraph) -> list[str]:
    out = validate_monoidal_graph(g.underlying)
    _check_names(g.devices, "device", out)
    for gen in sorted(g.underlying.generators):
        for d in sorted(g.dev.get(gen, frozenset())):
            if d not in g.devices:
                out.append(f"generator {gen!r} uses undeclared device {d!r}")
    for gen in sorted(g.dev):
        if gen not in g.underlying.generators:
            out.append(f"device assignment for unknown generator {gen!r}")
    return out


def validate_effectful_graph(g: EffectfulGraph) -> list[str]:
    out = validate_monoidal_graph(g.pure)
    out.extend(validate_device_graph(g.impure))
    if g.pure.objects != g.impure.objects:
        out.append("pure and impure object sets differ")
    seen: dict[str, str] = {}
    for v in sorted(g.pure.generators):
        if v not in g.embed:
            out.append(f"pure generator {v!r} has no embedding")
            continue
        image = g.embed[v]
        if image in seen:
            out.append(f"embedding is not injective: {seen[image]!r} and {v!r} both map to {image!r}")
        seen[image] = v
        if image not in g.impure.underlying.generators:
            out.append(f"embedding of {v!r} targets unknown generator {image!r}")
            continue
        if g.pure.generators[v] != g.impure.underlying.generators[image]:
            out.append(f"embedding of {v!r} does not preserve its typing")
        if g.impure.dev.get(image, frozenset()):
            out.append(f"embedded pure generator {image!r} has a non-empty device set")
    for v in sorted(g.embed):
        if v not in g.pure.generators:
            out.append(f"embedding declared for unknown pure generator {v!r}")
    return out


def orthogonal(g: DeviceGraph, f: str, h: str) -> bool:
    """True when the generators share no devices."""
    return not (g.devices_of(f) & g.devices_of(h))


def device_free(g: MonoidalGraph) -> DeviceGraph:
    """View a monoidal graph as the device graph with no devices at all."""
    return DeviceGraph(g, frozenset(), {gen: frozenset() for gen in g.generators})


@dataclass(frozen=True)
class MonoidalGraphMorphism:
    src: MonoidalGraph
    dst: MonoidalGraph
    object_map: Mapping[str, str]
    generator_map: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "object_map", dict(self.object_map))
        object.__setattr__(self, "generator_map", dict(self.generator_map))

    def map_word(self, w: Word) -> Word:
        try:
            return Word(*(self.object_map[x] for x in w))
        except KeyError as e:
            raise GraphError(f"object {e.args[0]!r} not in the morphism's domain") from None


@dataclass(frozen=True)
class DeviceGraphMorphism:
    src: DeviceGraph
    dst: DeviceGraph
    object_map: Mapping[str, str]
    generator_map: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "object_map", dict(self.object_map))
        object.__setattr__(self, "generator_map", dict(self.generator_map))

    def map_word(self, w: Word) -> Word:
        try:
            return Word(*(self.object_map[x] for x in w))
        except KeyError as e:
            raise GraphError(f"object {e.args[0]!r} not in the morphism's domain") from None

    @property
    def monoidal(self) -> MonoidalGraphMorphism:
        return MonoidalGraphMorphism(
            self.src.underlying, self.dst.underlying, self.object_map, self.generator_map
        )


@dataclass(frozen=True)
class EffectfulGraphMorphism:
    """A pair of maps: one on the pure generators, one on the impure ones,
    over a single object map, making the embedding square commute."""

    src: EffectfulGraph
    dst: EffectfulGraph
    object_map: Mapping[str, str]
    pure_map: Mapping[str, str]
    impure_map: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "object_map", dict(self.object_map))
        object.__setattr__(self, "pure_map", dict(self.pure_map))
        object.__setattr__(self, "impure_map", dict(self.impure_map))

    @property
    def pure_morphism(self) -> MonoidalGraphMorphism:
        return MonoidalGraphMorphism(self.src.pure, self.dst.pure, self.object_map, self.pure_map)

    @property
    def device_morphism(self) -> DeviceGraphMorphism:
        return DeviceGraphMorphism(self.src.impure, self.dst.impure, self.object_map, self.impure_map)


def check_monoidal_graph_morphism(m: MonoidalGraphMorphism) -> list[str]:
    """Checks totality and that generator typing is preserved wordwise."""
    out: list[str] = []
    for x in sorted(m.src.objects):
        if x not in m.object_map:
            out.append(f"object {x!r} is not mapped")
        elif m.object_map[x] not in m.dst.objects:
            out.append(f"object {x!r} maps outside the target graph")
    for gen in sorted(m.src.generators):
        if gen not in m.generator_map:
            out.append(f"generator {gen!r} is not mapped")
            continue
        image = m.generator_map[gen]
        if image not in m.dst.generators:
            out.append(f"generator {gen!r} maps to unknown {image!r}")
            continue
        dom, cod = m.src.generators[gen]
        try:
            if m.map_word(dom) != m.dst.dom(image):
                out.append(f"generator {gen!r}: source words disagree under the map")
            if m.map_word(cod) != m.dst.cod(image):
                out.append(f"generator {gen!r}: target words disagree under the map")
        except GraphError as e:
            out.append(f"generator {gen!r}: {e}")
    return out


def check_device_graph_morphism(m: DeviceGraphMorphism) -> list[str]:
    """A device graph morphism must additionally preserve orthogonality,
    including a generator's orthogonality with itself."""
    out = check_monoidal_graph_morphism(m.monoidal)
    if out:
        return out
    gens = sorted(m.src.underlying.generators)
    for i, f in enumerate(gens):
        for h in gens[i:]:
            if orthogonal(m.src, f, h) and not orthogonal(
                m.dst, m.generator_map[f], m.generator_map[h]
            ):
                out.append(f"orthogonality of {f!r} and {h!r} is not preserved")
    return out


def check_effectful_graph_morphism(m: EffectfulGraphMorphism) -> list[str]:
    out = check_monoidal_graph_morphism(m.pure_morphism)
    out.extend(check_device_graph_morphism(m.device_morphism))
    if out:
        return out
    for v in sorted(m.src.pure.generators):
        left = m.impure_map[m.src.embed[v]]
        right = m.dst.embed.get(m.pure_map[v])
        if left != right:
            out.append(f"embedding square does not commute on pure generator {v!r}")
    return out


def identity_device_morphism(g: DeviceGraph) -> DeviceGraphMorphism:
    return DeviceGraphMorphism(
        g, g, {x: x for x in g.objects}, {f: f for f in g.underlying.generators}
    )


def identity_effectful_morphism(g: EffectfulGraph) -> EffectfulGraphMorphism:
    return EffectfulGraphMorphism(
        g,
        g,
        {x: x for x in g.pure.objects},
        {v: v for v in g.pure.generators},
        {f: f for f in g.impure.underlying.generators},
    )
