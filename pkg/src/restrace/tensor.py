"""Commuting tensor product of effectful graphs sharing a pure part.

The impure generators of the product are the pushout of the two generator
sets over the shared pure generators: identified pure images are merged
(keeping the left graph's name), all other generators are kept and tagged
``l·``/``r·``, and the devices are the tagged disjoint union.  Actions
from one side are therefore forced to interchange with actions from the
other in the free category, while still exchanging resources.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graphs import (
    EMPTY,
    DeviceGraph,
    EffectfulGraph,
    EffectfulGraphMorphism,
    GraphError,
    MonoidalGraph,
    Word,
    check_effectful_graph_morphism,
)
from .freecat import (
    PremonoidalMorphism,
    enumerate_morphisms,
    expr_string,
    interchange_holds,
    map_morphism,
    parallel_holds,
)

__all__ = [
    "PureMismatch",
    "NotCommuting",
    "PureDisagreement",
    "TensorResult",
    "TensorCheckReport",
    "commuting_tensor",
    "default_pool",
    "is_commuting_cospan",
    "mediating_morphism",
    "commuting_tensor_check",
]

LEFT_TAG = "l·"
RIGHT_TAG = "r·"


class PureMismatch(ValueError):
    """The two effectful graphs do not share the same pure part."""


class NotCommuting(ValueError):
    """The given cospan fails the interchange requirement on the sample."""


class PureDisagreement(ValueError):
    """The cospan legs disagree on the shared pure part."""


@dataclass(frozen=True)
class TensorResult:
    product: EffectfulGraph
    left_inj: EffectfulGraphMorphism
    right_inj: EffectfulGraphMorphism


def _tag(tag: str, name: str) -> str:
    return tag + name


def commuting_tensor(g: EffectfulGraph, h: EffectfulGraph) -> TensorResult:
    """Pushout of the impure generator sets over the shared pure part.

    Merged pure images keep the left graph's name; every other generator
    and every device is tagged ``l·`` or ``r·`` by origin, so the device
    sets of left- and right-originating generators never intersect.
    """
    if g.pure.objects != h.pure.objects or g.pure.generators != h.pure.generators:
        raise PureMismatch("the effectful graphs must share the same pure part")
    if g.impure.objects != h.impure.objects:
        raise PureMismatch("the impure object sets must coincide")

    g_images = {g.embed[v]: v for v in g.pure.generators}
    h_images = {h.embed[v]: v for v in h.pure.generators}

    generators: dict[str, tuple[Word, Word]] = {}
    dev: dict[str, frozenset[str]] = {}
    left_map: dict[str, str] = {}
    right_map: dict[str, str] = {}
    embed: dict[str, str] = {}

    for v in sorted(g.pure.generators):
        merged = g.embed[v]
        generators[merged] = g.pure.generators[v]
        dev[merged] = frozenset()
        embed[v] = merged
        left_map[g.embed[v]] = merged
        right_map[h.embed[v]] = merged

    for side, graph, images, tag, target_map in (
        ("left", g.impure, g_images, LEFT_TAG, left_map),
        ("right", h.impure, h_images, RIGHT_TAG, right_map),
    ):
        for x in sorted(graph.underlying.generators):
            if x in images:
                continue
            name = _tag(tag, x)
            if name in generators:
                raise GraphError(f"tagged generator name {name!r} collides")
            generators[name] = graph.underlying.generators[x]
            dev[name] = frozenset(_tag(tag, d) for d in graph.devices_of(x))
            target_map[x] = name

    devices = frozenset(_tag(LEFT_TAG, d) for d in g.impure.devices) | frozenset(
        _tag(RIGHT_TAG, d) for d in h.impure.devices
    )
    impure = DeviceGraph(MonoidalGraph(g.impure.objects, generators), devices, dev)
    product = EffectfulGraph(g.pure, impure, embed)

    obj_id = {x: x for x in g.pure.objects}
    pure_id = {v: v for v in g.pure.generators}
    left_inj = EffectfulGraphMorphism(g, product, obj_id, pure_id, left_map)
    right_inj = EffectfulGraphMorphism(h, product, obj_id, pure_id, right_map)
    return TensorResult(product, left_inj, right_inj)


def default_pool(g: EffectfulGraph) -> set[Word]:
    """A small boundary pool: the empty word plus every generator boundary."""
    words = {EMPTY}
    for dom, cod in g.impure.underlying.generators.values():
        words.add(dom)
        words.add(cod)
    return words


def _samples(
    g: EffectfulGraph, max_events: int, pool: Iterable[Word] | None, cap: int
) -> list[PremonoidalMorphism]:
    words = set(pool) if pool is not None else default_pool(g)
    return enumerate_morphisms(g.impure, max_events, words, cap)


def is_commuting_cospan(
    p: EffectfulGraphMorphism,
    q: EffectfulGraphMorphism,
    max_events: int = 2,
    pool: Iterable[Word] | None = None,
    cap: int = 100_000,
) -> bool:
    """Sampled check that the legs' images slide past one another.

    For every sampled f over p's source and g over q's source, the square
    ``(P f ⋊); (⋉ Q g) = (⋉ Q g); (P f ⋊)`` must commute in the target.
    """
    if p.dst != q.dst:
        raise ValueError("cospan legs must share their target")
    if p.src.pure.generators != q.src.pure.generators:
        raise PureMismatch("cospan legs must share the pure part")
    for leg in (p, q):
        problems = check_effectful_graph_morphism(leg)
        if problems:
            raise GraphError("invalid cospan leg: " + "; ".join(problems))
    for f in _samples(p.src, max_events, pool, cap):
        pf = map_morphism(p.device_morphism, f)
        for g in _samples(q.src, max_events, pool, cap):
            qg = map_morphism(q.device_morphism, g)
            if not parallel_holds(pf, qg):
                return False
    return True


def mediating_morphism(
    p: EffectfulGraphMorphism,
    q: EffectfulGraphMorphism,
    tensor: TensorResult,
    max_events: int = 2,
    pool: Iterable[Word] | None = None,
    cap: int = 100_000,
) -> EffectfulGraphMorphism:
    """The unique map out of the product determined by a commuting cospan.

    Sends a merged pure image to its common image, ``l·x`` to ``p(x)`` and
    ``r·y`` to ``q(y)``; composing with the injections recovers p and q
    exactly as generator maps.
    """
    g, h = tensor.left_inj.src, tensor.right_inj.src
    if p.src != g or q.src != h:
        raise ValueError("cospan legs do not match the tensor's factors")
    if p.object_map != q.object_map or p.pure_map != q.pure_map:
        raise PureDisagreement("cospan legs disagree on the shared pure part")
    for v in g.pure.generators:
        if p.impure_map[g.embed[v]] != q.impure_map[h.embed[v]]:
            raise PureDisagreement(f"legs disagree on the image of pure generator {v!r}")
    if not is_commuting_cospan(p, q, max_events, pool, cap):
        raise NotCommuting("the cospan legs do not commute on the checked sample")

    gen_map: dict[str, str] = {}
    for v in g.pure.generators:
        gen_map[tensor.product.embed[v]] = p.impure_map[g.embed[v]]
    for x, name in tensor.left_inj.impure_map.items():
        gen_map[name] = p.impure_map[x]
    for y, name in tensor.right_inj.impure_map.items():
        gen_map[name] = q.impure_map[y]

    mediator = EffectfulGraphMorphism(
        tensor.product, p.dst, p.object_map, p.pure_map, gen_map
    )
    for x, name in tensor.left_inj.impure_map.items():
        assert gen_map[name] == p.impure_map[x]
    for y, name in tensor.right_inj.impure_map.items():
        assert gen_map[name] == q.impure_map[y]
    return mediator


@dataclass(frozen=True)
class TensorCheckReport:
    cross_checked: int
    cross_failures: tuple[tuple[str, str], ...]
    injections_commute: bool
    generators_covered: bool
    mediator_recovers: bool

    @property
    def ok(self) -> bool:
        return (
            not self.cross_failures
            and self.injections_commute
            and self.generators_covered
            and self.mediator_recovers
        )


def commuting_tensor_check(
    g: EffectfulGraph,
    h: EffectfulGraph,
    max_events: int = 2,
    pool: Iterable[Word] | None = None,
    cap: int = 100_000,
) -> TensorCheckReport:
    """Desk-scale verification that the free category over the product is
    the commuting combination of the free categories over the factors."""
    tensor = commuting_tensor(g, h)
    left_samples = _samples(g, max_events, pool, cap)
    right_samples = _samples(h, max_events, pool, cap)

    cross_failures: list[tuple[str, str]] = []
    checked = 0
    for f in left_samples:
        lf = map_morphism(tensor.left_inj.device_morphism, f)
        for k in right_samples:
            rk = map_morphism(tensor.right_inj.device_morphism, k)
            checked += 1
            if not interchange_holds(lf, rk):
                cross_failures.append((expr_string(f), expr_string(k)))

    injections_commute = is_commuting_cospan(
        tensor.left_inj, tensor.right_inj, max_events, pool, cap
    )

    product_gens = set(tensor.product.impure.underlying.generators)
    image = set(tensor.left_inj.impure_map.values()) | set(
        tensor.right_inj.impure_map.values()
    )
    generators_covered = product_gens == image

    mediator = mediating_morphism(
        tensor.left_inj, tensor.right_inj, tensor, max_events, pool, cap
    )
    recovers = all(
        mediator.impure_map[name] == name
        for name in tensor.product.impure.underlying.generators
    )

    return TensorCheckReport(
        checked, tuple(cross_failures), injections_commute, generators_covered, recovers
    )
