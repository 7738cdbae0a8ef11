"""Classical Mazurkiewicz traces: dependency relations, the trace monoid,
Foata normal form for words, distributions, and the cliques insertion.

Equality of traces is decided by the projection criterion (equal letter
multisets and equal projections onto every dependent pair), which is kept
independent of the Foata code path so the two can cross-check each other.
A distribution is a device graph over the empty object set whose
generators are all typed ``ε → ε``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import EMPTY, DeviceGraph, MonoidalGraph, Word
from .freecat import Event, PremonoidalMorphism, morphisms_equal
from .interference import max_cliques

__all__ = [
    "DependencyRelation",
    "trace_equal",
    "foata_nf",
    "distribution",
    "validate_distribution",
    "dependency_to_distribution",
    "distribution_to_dependency",
    "dep_leq",
    "dist_leq",
    "galois_check",
    "distribution_as_device_graph",
    "word_morphism",
    "trace_vs_freecat",
]


@dataclass(frozen=True)
class DependencyRelation:
    """A reflexive, symmetric relation on an alphabet of actions.

    Pairs are stored sorted; the reflexive pairs are added on construction
    so the invariant holds by normalization.
    """

    alphabet: frozenset[str]
    pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        alphabet = frozenset(self.alphabet)
        pairs = set()
        for a, b in self.pairs:
            if a not in alphabet or b not in alphabet:
                raise ValueError(f"dependent pair ({a!r}, {b!r}) uses unknown symbols")
            pairs.add((a, b) if a <= b else (b, a))
        pairs.update((a, a) for a in alphabet)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "pairs", frozenset(pairs))

    def dependent(self, a: str, b: str) -> bool:
        for x in (a, b):
            if x not in self.alphabet:
                raise ValueError(f"unknown symbol {x!r}")
        return ((a, b) if a <= b else (b, a)) in self.pairs


def _check_word(d: DependencyRelation, w: Sequence[str]) -> None:
    for x in w:
        if x not in d.alphabet:
            raise ValueError(f"unknown symbol {x!r}")


def trace_equal(d: DependencyRelation, w1: Sequence[str], w2: Sequence[str]) -> bool:
    """Projection criterion for the trace monoid's word problem."""
    _check_word(d, w1)
    _check_word(d, w2)
    if sorted(w1) != sorted(w2):
        return False
    for a, b in d.pairs:
        if a == b:
            continue
        p1 = [x for x in w1 if x in (a, b)]
        p2 = [x for x in w2 if x in (a, b)]
        if p1 != p2:
            return False
    return True


def foata_nf(d: DependencyRelation, w: Sequence[str]) -> tuple[tuple[str, ...], ...]:
    """Greedy layers of pairwise-independent letters; equal words have
    equal layer sequences and conversely."""
    _check_word(d, w)
    heights: list[int] = []
    for i, x in enumerate(w):
        h = 1
        for j in range(i):
            if d.dependent(w[j], x):
                h = max(h, heights[j] + 1)
        heights.append(h)
    layers: list[list[str]] = []
    for x, h in zip(w, heights):
        while len(layers) < h:
            layers.append([])
        layers[h - 1].append(x)
    return tuple(tuple(sorted(layer)) for layer in layers)


def distribution(symbols: Iterable[str], dev: dict[str, Iterable[str]]) -> DeviceGraph:
    """Build a distribution: every symbol becomes an ``ε → ε`` generator."""
    symbols = sorted(set(symbols))
    devices = sorted({x for ds in dev.values() for x in ds})
    return DeviceGraph(
        MonoidalGraph(frozenset(), {s: (EMPTY, EMPTY) for s in symbols}),
        frozenset(devices),
        {s: frozenset(dev.get(s, ())) for s in symbols},
    )


def validate_distribution(d: DeviceGraph) -> list[str]:
    out = []
    if d.underlying.objects:
        out.append("a distribution has no objects")
    for gen, (dom, cod) in sorted(d.underlying.generators.items()):
        if len(dom) or len(cod):
            out.append(f"generator {gen!r} is not typed ε → ε")
    return out


def dependency_to_distribution(d: DependencyRelation) -> DeviceGraph:
    """One device per non-trivial maximal clique of the dependency graph;
    each action belongs to the devices of the cliques containing it."""
    symbols = sorted(d.alphabet)
    index = {s: i for i, s in enumerate(symbols)}
    edges = {
        (index[a], index[b])
        for a, b in d.pairs
        if a != b
    }
    cliques = [c for c in max_cliques(len(symbols), edges) if len(c) >= 2]
    dev: dict[str, set[str]] = {s: set() for s in symbols}
    for clique in cliques:
        name = "+".join(symbols[i] for i in sorted(clique))
        for i in clique:
            dev[symbols[i]].add(name)
    return distribution(symbols, {s: ds for s, ds in dev.items()})


def distribution_to_dependency(d: DeviceGraph) -> DependencyRelation:
    """Two actions are dependent exactly when their device sets overlap."""
    symbols = sorted(d.underlying.generators)
    pairs = set()
    for i, a in enumerate(symbols):
        for b in symbols[i + 1 :]:
            if d.devices_of(a) & d.devices_of(b):
                pairs.add((a, b))
    return DependencyRelation(frozenset(symbols), frozenset(pairs))


def dep_leq(d1: DependencyRelation, d2: DependencyRelation) -> bool:
    if d1.alphabet != d2.alphabet:
        raise ValueError("dependency relations over different alphabets")
    return d1.pairs <= d2.pairs


def dist_leq(d1: DeviceGraph, d2: DeviceGraph) -> bool:
    """d1 ≤ d2 when every overlap of d1 is already an overlap of d2."""
    syms1 = set(d1.underlying.generators)
    syms2 = set(d2.underlying.generators)
    if syms1 != syms2:
        raise ValueError("distributions over different alphabets")
    for a in syms1:
        for b in syms1:
            if d1.devices_of(a) & d1.devices_of(b) and not (
                d2.devices_of(a) & d2.devices_of(b)
            ):
                return False
    return True


def galois_check(d: DependencyRelation) -> bool:
    """The cliques construction is a section: reading the dependency back
    off the distribution returns the original relation."""
    return distribution_to_dependency(dependency_to_distribution(d)) == d


def distribution_as_device_graph(d: DeviceGraph) -> DeviceGraph:
    problems = validate_distribution(d)
    if problems:
        raise ValueError("; ".join(problems))
    return d


def word_morphism(dist: DeviceGraph, w: Sequence[str]) -> PremonoidalMorphism:
    """A word over a distribution's alphabet as a single-object morphism."""
    events = tuple(Event(x, EMPTY, EMPTY) for x in w)
    return PremonoidalMorphism(dist, EMPTY, EMPTY, events)


def trace_vs_freecat(d: DependencyRelation, w1: Sequence[str], w2: Sequence[str]) -> bool:
    """Decide word equality through the free-category engine; must agree
    with :func:`trace_equal` on all inputs."""
    _check_word(d, w1)
    _check_word(d, w2)
    dist = dependency_to_distribution(d)
    return morphisms_equal(word_morphism(dist, w1), word_morphism(dist, w2))
