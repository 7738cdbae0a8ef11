"""Interference graphs, maximal cliques, and the bounded underlying
device graph of a free premonoidal category.

Vertices of an interference graph are morphisms; an edge joins two that
fail to interchange.  Non-trivial maximal cliques (size at least two)
become devices: the bounded underlying device graph samples finitely many
morphisms, computes their interference, and assigns each sampled morphism
the cliques it belongs to.  The unit sends a generator to its bare event;
the counit evaluates a nested morphism by whiskering and composing its
payloads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graphs import EMPTY, DeviceGraph, MonoidalGraph, Word
from .freecat import (
    Event,
    GraphMismatch,
    PremonoidalMorphism,
    canonical_form,
    compose,
    enumerate_morphisms,
    expr_string,
    gen_event,
    identity,
    interchange_holds,
    left_whisker,
    morphisms_equal,
    right_whisker,
)

__all__ = [
    "InterferenceGraph",
    "BoundedUnderlying",
    "TriangleReport",
    "max_cliques",
    "interference_graph",
    "maximal_cliques",
    "nontrivial_cliques",
    "underlying_device_graph_bounded",
    "unit_map",
    "counit_eval",
    "triangle_checks",
]


def max_cliques(n: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """All maximal cliques of a finite graph on vertices 0..n-1.

    Bron–Kerbosch with pivoting; the pivot is the lowest-index vertex of
    the candidate union, so output order is stable.  Self-loops in the
    edge set are ignored.
    """
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    out: list[tuple[int, ...]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = min(p | x)
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(n)), set())
    return sorted(out)


@dataclass(frozen=True)
class InterferenceGraph:
    """Morphisms with an edge between every non-interchanging pair.

    A self-edge ``(i, i)`` records a morphism that interferes with itself;
    central morphisms never carry one.
    """

    vertices: tuple[PremonoidalMorphism, ...]
    edges: frozenset[tuple[int, int]]

    def proper_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a, b in self.edges if a != b)


def interference_graph(ms: Sequence[PremonoidalMorphism]) -> InterferenceGraph:
    ms = tuple(ms)
    for m in ms[1:]:
        if m.graph != ms[0].graph:
            raise GraphMismatch("interference vertices must share one graph")
    edges = set()
    for i in range(len(ms)):
        for j in range(i, len(ms)):
            if not interchange_holds(ms[i], ms[j]):
                edges.add((i, j))
    return InterferenceGraph(ms, frozenset(edges))


def maximal_cliques(g: InterferenceGraph) -> list[tuple[int, ...]]:
    return max_cliques(len(g.vertices), g.edges)


def nontrivial_cliques(g: InterferenceGraph) -> list[tuple[int, ...]]:
    return [c for c in maximal_cliques(g) if len(c) >= 2]


@dataclass(frozen=True)
class BoundedUnderlying:
    """Finite approximation of the underlying device graph.

    One generator per sampled morphism (named ``m0``, ``m1``, ... in
    enumeration order), typed by the morphism's boundary words; devices
    are the non-trivial maximal cliques of the sample's interference
    graph, named by their sorted members joined with ``+``.
    """

    device_graph: DeviceGraph
    morphisms: Mapping[str, PremonoidalMorphism]
    handles: tuple[str, ...]
    interference: InterferenceGraph
    cliques: tuple[tuple[int, ...], ...]

    def handle_of(self, m: PremonoidalMorphism) -> str:
        key = (m.source.items, canonical_form(m).events)
        for h in self.handles:
            sample = self.morphisms[h]
            if (sample.source.items, canonical_form(sample).events) == key:
                return h
        raise KeyError(f"morphism {expr_string(m)} is not in the sample")


def underlying_device_graph_bounded(
    g: DeviceGraph,
    max_events: int,
    pool: Iterable[Word],
    cap: int = 100_000,
) -> BoundedUnderlying:
    sample = enumerate_morphisms(g, max_events, pool, cap)
    handles = tuple(f"m{i}" for i in range(len(sample)))
    igraph = interference_graph(sample)
    cliques = tuple(nontrivial_cliques(igraph))
    names = ["+".join(handles[i] for i in c) for c in cliques]
    dev: dict[str, set[str]] = {h: set() for h in handles}
    for name, clique in zip(names, cliques):
        for i in clique:
            dev[handles[i]].add(name)
    underlying = MonoidalGraph(
        g.objects, {h: (m.source, m.target) for h, m in zip(handles, sample)}
    )
    device_graph = DeviceGraph(underlying, frozenset(names), {h: frozenset(ds) for h, ds in dev.items()})
    return BoundedUnderlying(device_graph, dict(zip(handles, sample)), handles, igraph, cliques)


def unit_map(g: DeviceGraph, gen: str) -> PremonoidalMorphism:
    """The bare single-event morphism ``▷ gen ◁``."""
    return gen_event(g, EMPTY, gen, EMPTY)


def counit_eval(
    nested: PremonoidalMorphism,
    payload: Mapping[str, PremonoidalMorphism],
    base: DeviceGraph,
) -> PremonoidalMorphism:
    """Evaluate a morphism whose generators stand for morphisms of ``base``.

    Each nested event ``X ▷ h ◁ Y`` becomes ``X ⋉ payload[h] ⋊ Y`` and the
    pieces are composed in order; object lists flatten by concatenation.
    """
    result = identity(base, nested.source)
    for e in nested.events:
        piece = left_whisker(e.left, right_whisker(payload[e.gen], e.right))
        result = compose(result, piece)
    return result


@dataclass(frozen=True)
class TriangleReport:
    checked_unit_counit: int
    failures_unit_counit: tuple[str, ...]
    checked_arrows: int
    failures_arrows: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures_unit_counit and not self.failures_arrows


def triangle_checks(
    g: DeviceGraph,
    max_events: int = 2,
    pool: Iterable[Word] | None = None,
    cap: int = 100_000,
) -> TriangleReport:
    """Check both triangle identities on a finite sample.

    For every sampled morphism f, relabelling each event through the unit
    and evaluating with the counit must return f; and evaluating the bare
    event of a sampled arrow must return that arrow's morphism.
    """
    words = set(pool) if pool is not None else {EMPTY}
    for gen, (dom, cod) in g.underlying.generators.items():
        words.add(dom)
        words.add(cod)
    bounded = underlying_device_graph_bounded(g, max_events, words, cap)
    payload = dict(bounded.morphisms)
    eta_handle = {
        gen: bounded.handle_of(unit_map(g, gen)) for gen in g.underlying.generators
    }

    fail_second: list[str] = []
    checked_second = 0
    for h in bounded.handles:
        f = bounded.morphisms[h]
        relabelled = PremonoidalMorphism(
            bounded.device_graph,
            f.source,
            f.target,
            tuple(Event(eta_handle[e.gen], e.left, e.right) for e in f.events),
        )
        checked_second += 1
        if not morphisms_equal(counit_eval(relabelled, payload, g), f):
            fail_second.append(expr_string(f))

    fail_first: list[str] = []
    checked_first = 0
    for h in bounded.handles:
        nested = unit_map(bounded.device_graph, h)
        checked_first += 1
        if not morphisms_equal(counit_eval(nested, payload, g), payload[h]):
            fail_first.append(h)

    return TriangleReport(checked_second, tuple(fail_second), checked_first, tuple(fail_first))
