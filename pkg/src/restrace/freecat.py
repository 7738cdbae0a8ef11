"""Free premonoidal and free effectful categories over device graphs.

A morphism is a boundary-threaded sequence of *events*; an event fires one
generator whiskered by a left and a right word.  Identities are empty
sequences and composition is concatenation, so associativity and unit laws
hold on the nose.  The only quotient left is the interchange congruence:
adjacent events may be exchanged when they share no devices and their spans
are disjoint in the boundary between them.

Equality is decided through a canonical form.  The canonical scheduler
replays the events of a morphism in a deterministic order derived from
class-invariant data only:

* device edges — the original order of every device-sharing pair;
* wire edges — strand flow from producers to consumers;
* trap edges — a zero-width event whose gap sits strictly inside another
  event's consumed or produced block can never cross it;
* a forced left-to-right order on strands (source, target and block orders,
  lifted across events that are provably alive around them), which fixes
  where fresh strands of nullary generators are inserted;
* a wire-closure fingerprint that orders otherwise tied firings of the
  same nullary generator by where their outputs eventually flow.

The scheduler is cross-validated against :func:`bfs_equiv`, an independent
breadth-first closure of the swap relation, in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .graphs import (
    EMPTY,
    DeviceGraph,
    DeviceGraphMorphism,
    EffectfulGraph,
    GraphError,
    MonoidalGraph,
    Word,
    check_device_graph_morphism,
    device_free,
)

__all__ = [
    "Event",
    "PremonoidalMorphism",
    "StrandThreading",
    "DependenceRelation",
    "CanonicalForm",
    "FreeEffectfulCategory",
    "BoundaryMismatch",
    "GraphMismatch",
    "NotSwappable",
    "NotPure",
    "BudgetExceeded",
    "EngineError",
    "identity",
    "gen_event",
    "compose",
    "left_whisker",
    "right_whisker",
    "devices_of",
    "boundaries",
    "threading",
    "dependence_relation",
    "swap_adjacent",
    "swap_variants",
    "canonical_form",
    "canonical_morphism",
    "morphisms_equal",
    "bfs_equiv",
    "parallel_holds",
    "interchange_holds",
    "is_pure",
    "tensor_pure",
    "embed_pure",
    "map_morphism",
    "applicable_events",
    "enumerate_morphisms",
    "expr_string",
]


class BoundaryMismatch(ValueError):
    def __init__(self, expected: Word, got: Word, detail: str = ""):
        self.expected = expected
        self.got = got
        msg = f"boundary mismatch: expected [{expected}] but got [{got}]"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class GraphMismatch(ValueError):
    """The morphisms live over different device graphs."""


class NotSwappable(ValueError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"events cannot be exchanged: {reason}")


class NotPure(ValueError):
    """A morphism expected to be device-free uses devices."""


class BudgetExceeded(RuntimeError):
    """An enumeration hit its explicit cap."""


class EngineError(RuntimeError):
    """Internal scheduling invariant failed; report with the morphism."""


@dataclass(frozen=True)
class Event:
    """One whiskered generator firing: ``left ▷ gen ◁ right``."""

    gen: str
    left: Word
    right: Word

    def key(self) -> tuple:
        return (self.gen, self.left.items, self.right.items)


@dataclass(frozen=True, eq=False)
class PremonoidalMorphism:
    """A composite of whiskered generator firings with threaded boundaries.

    The boundary before event ``i`` must equal ``left_i + dom_i + right_i``
    and the one after equals ``left_i + cod_i + right_i``; construction
    checks the whole thread from ``source`` to ``target``.
    """

    graph: DeviceGraph
    source: Word
    target: Word
    events: tuple[Event, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        b = self.source
        for x in b:
            if x not in self.graph.objects:
                raise GraphError(f"unknown object {x!r}")
        for e in self.events:
            dom = self.graph.dom(e.gen)
            cod = self.graph.cod(e.gen)
            expected = e.left + dom + e.right
            if b != expected:
                raise BoundaryMismatch(expected, b, f"at event {e.gen!r}")
            b = e.left + cod + e.right
        if b != self.target:
            raise BoundaryMismatch(self.target, b, "at the target boundary")
        object.__setattr__(self, "_canon", None)

    def __eq__(self, other):
        if not isinstance(other, PremonoidalMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.events == other.events
            and self.graph == other.graph
        )

    def __repr__(self):
        return f"<{expr_string(self)} : [{self.source}] -> [{self.target}]>"

    def then(self, other: "PremonoidalMorphism") -> "PremonoidalMorphism":
        return compose(self, other)


def trace(graph: DeviceGraph, source: Word, events: Iterable[Event]) -> PremonoidalMorphism:
    """Build a morphism from its source and events, deriving the target."""
    events = tuple(events)
    b = source
    for e in events:
        b = e.left + graph.cod(e.gen) + e.right
    return PremonoidalMorphism(graph, source, b, events)


def identity(graph: DeviceGraph, w: Word) -> PremonoidalMorphism:
    return PremonoidalMorphism(graph, w, w, ())


def gen_event(graph: DeviceGraph, left: Word, gen: str, right: Word) -> PremonoidalMorphism:
    """The single event ``left ▷ gen ◁ right``."""
    dom = graph.dom(gen)
    cod = graph.cod(gen)
    return PremonoidalMorphism(graph, left + dom + right, left + cod + right, (Event(gen, left, right),))


def compose(u: PremonoidalMorphism, v: PremonoidalMorphism) -> PremonoidalMorphism:
    if u.graph != v.graph:
        raise GraphMismatch("cannot compose morphisms over different graphs")
    if u.target != v.source:
        raise BoundaryMismatch(u.target, v.source, "composition boundary")
    return PremonoidalMorphism(u.graph, u.source, v.target, u.events + v.events)


def left_whisker(a: Word, f: PremonoidalMorphism) -> PremonoidalMorphism:
    for x in a:
        if x not in f.graph.objects:
            raise GraphError(f"unknown object {x!r}")
    events = tuple(Event(e.gen, a + e.left, e.right) for e in f.events)
    return PremonoidalMorphism(f.graph, a + f.source, a + f.target, events)


def right_whisker(f: PremonoidalMorphism, a: Word) -> PremonoidalMorphism:
    for x in a:
        if x not in f.graph.objects:
            raise GraphError(f"unknown object {x!r}")
    events = tuple(Event(e.gen, e.left, e.right + a) for e in f.events)
    return PremonoidalMorphism(f.graph, f.source + a, f.target + a, events)


def devices_of(f: PremonoidalMorphism) -> frozenset[str]:
    """Union of the devices of all fired generators; empty for identities."""
    out: set[str] = set()
    for e in f.events:
        out |= f.graph.devices_of(e.gen)
    return frozenset(out)


def boundaries(f: PremonoidalMorphism) -> list[Word]:
    out = [f.source]
    for e in f.events:
        out.append(e.left + f.graph.cod(e.gen) + e.right)
    return out


def expr_string(f: PremonoidalMorphism) -> str:
    """A reparseable textual form, e.g. ``doc[ | ] ; print[ | ]``."""
    if not f.events:
        return f"id({f.source})"
    return " ; ".join(f"{e.gen}[{e.left} | {e.right}]" for e in f.events)


# ---------------------------------------------------------------------------
# Strand threading


@dataclass(frozen=True)
class StrandThreading:
    """Strand identifiers through the boundaries of a morphism.

    Source strands are numbered first; each event consumes a contiguous
    block at its span and emits fresh identifiers.  Every strand has one
    producer (the source or an event) and one consumer (an event or the
    target).
    """

    boundaries: tuple[tuple[int, ...], ...]
    consumed: tuple[tuple[int, ...], ...]
    produced: tuple[tuple[int, ...], ...]
    spans: tuple[int, ...]
    labels: tuple[str, ...]

    def producer(self, sid: int) -> int:
        """Index of the producing event, or -1 for a source strand."""
        for i, prod in enumerate(self.produced):
            if sid in prod:
                return i
        return -1

    def consumer(self, sid: int) -> int | None:
        """Index of the consuming event, or None for a target strand."""
        for i, cons in enumerate(self.consumed):
            if sid in cons:
                return i
        return None


def threading(f: PremonoidalMorphism) -> StrandThreading:
    labels: list[str] = list(f.source.items)
    current = list(range(len(f.source)))
    bnds = [tuple(current)]
    consumed = []
    produced = []
    spans = []
    for e in f.events:
        d = len(f.graph.dom(e.gen))
        c = f.graph.cod(e.gen)
        s = len(e.left)
        consumed.append(tuple(current[s : s + d]))
        fresh = []
        for x in c:
            fresh.append(len(labels))
            labels.append(x)
        produced.append(tuple(fresh))
        spans.append(s)
        current[s : s + d] = fresh
        bnds.append(tuple(current))
    return StrandThreading(tuple(bnds), tuple(consumed), tuple(produced), tuple(spans), tuple(labels))


@dataclass(frozen=True)
class DependenceRelation:
    """Order constraints between events: device sharing and direct wires."""

    size: int
    device_edges: frozenset[tuple[int, int]]
    wire_edges: frozenset[tuple[int, int]]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.device_edges | self.wire_edges


def dependence_relation(f: PremonoidalMorphism) -> DependenceRelation:
    thr = threading(f)
    n = len(f.events)
    dev_edges = set()
    wire_edges = set()
    for i in range(n):
        di = f.graph.devices_of(f.events[i].gen)
        prod_i = set(thr.produced[i])
        for j in range(i + 1, n):
            if di & f.graph.devices_of(f.events[j].gen):
                dev_edges.add((i, j))
            if prod_i & set(thr.consumed[j]):
                wire_edges.add((i, j))
    return DependenceRelation(n, frozenset(dev_edges), frozenset(wire_edges))


# ---------------------------------------------------------------------------
# Adjacent swaps


def _swapped_pairs(graph: DeviceGraph, b0: Word, e1: Event, e2: Event) -> list[tuple[Event, Event]]:
    """All exchanged forms of the adjacent pair (e1, e2) fired from b0.

    The pair is exchangeable when the generators share no devices and the
    spans are disjoint in the middle boundary; for zero-width spans at the
    same position both readings apply and both results are returned.
    """
    if graph.devices_of(e1.gen) & graph.devices_of(e2.gen):
        return []
    d1, c1 = len(graph.dom(e1.gen)), len(graph.cod(e1.gen))
    d2, c2 = len(graph.dom(e2.gen)), len(graph.cod(e2.gen))
    s1, s2 = len(e1.left), len(e2.left)
    out = []
    if s2 >= s1 + c1:
        ns2 = s2 + d1 - c1
        new_first = Event(e2.gen, b0[:ns2], b0[ns2 + d2 :])
        mid = new_first.left + graph.cod(e2.gen) + new_first.right
        new_second = Event(e1.gen, mid[:s1], mid[s1 + d1 :])
        out.append((new_first, new_second))
    if s2 + d2 <= s1:
        new_first = Event(e2.gen, b0[:s2], b0[s2 + d2 :])
        mid = new_first.left + graph.cod(e2.gen) + new_first.right
        ns1 = s1 + c2 - d2
        new_second = Event(e1.gen, mid[:ns1], mid[ns1 + d1 :])
        pair = (new_first, new_second)
        if pair not in out:
            out.append(pair)
    return out


def swap_adjacent(f: PremonoidalMorphism, k: int) -> PremonoidalMorphism:
    """Exchange events k and k+1 when the congruence allows it.

    When both orientations of the exchange apply (only possible for
    zero-width spans at the same position) the one treating the later
    event as lying to the right is used.  Boundaries, devices and the
    multiset of fired generators are preserved.
    """
    if not 0 <= k < len(f.events) - 1:
        raise IndexError(f"no adjacent pair at index {k}")
    e1, e2 = f.events[k], f.events[k + 1]
    if f.graph.devices_of(e1.gen) & f.graph.devices_of(e2.gen):
        raise NotSwappable("shared-device")
    b0 = boundaries(f)[k]
    pairs = _swapped_pairs(f.graph, b0, e1, e2)
    if not pairs:
        raise NotSwappable("overlapping-span")
    new_first, new_second = pairs[0]
    events = f.events[:k] + (new_first, new_second) + f.events[k + 2 :]
    return PremonoidalMorphism(f.graph, f.source, f.target, events)


def swap_variants(f: PremonoidalMorphism, k: int) -> list[PremonoidalMorphism]:
    """Every legal exchanged form at index k (0, 1 or 2 results)."""
    if not 0 <= k < len(f.events) - 1:
        raise IndexError(f"no adjacent pair at index {k}")
    b0 = boundaries(f)[k]
    out = []
    for new_first, new_second in _swapped_pairs(f.graph, b0, f.events[k], f.events[k + 1]):
        events = f.events[:k] + (new_first, new_second) + f.events[k + 2 :]
        out.append(PremonoidalMorphism(f.graph, f.source, f.target, events))
    return out


# ---------------------------------------------------------------------------
# Canonical form


@dataclass(frozen=True)
class CanonicalForm:
    """Layered canonical event sequence; heights are Foata layer indices."""

    events: tuple[Event, ...]
    heights: tuple[int, ...]

    def layers(self) -> list[tuple[Event, ...]]:
        out: list[list[Event]] = []
        for e, h in zip(self.events, self.heights):
            while len(out) < h:
                out.append([])
            out[h - 1].append(e)
        return [tuple(layer) for layer in out]


class _Blocked(Exception):
    def __init__(self, edge: tuple[int, int]):
        self.edge = edge


def _closure(n: int, edges: set[tuple[int, int]]) -> list[set[int]]:
    """Strict reachability sets: desc[i] = {j : i precedes j}."""
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
    desc = [set() for _ in range(n)]
    # reverse topological accumulation; edges are acyclic by construction
    order = _topo_order(n, edges)
    for i in reversed(order):
        for j in adj[i]:
            desc[i].add(j)
            desc[i] |= desc[j]
    return desc


def _topo_order(n: int, edges: set[tuple[int, int]]) -> list[int]:
    indeg = [0] * n
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        indeg[b] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    out = []
    while ready:
        i = ready.pop(0)
        out.append(i)
        for j in sorted(adj[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
        ready.sort()
    if len(out) != n:
        raise EngineError("cyclic order constraints")
    return out


def _heights(n: int, edges: set[tuple[int, int]]) -> list[int]:
    h = [1] * n
    for i in _topo_order(n, edges):
        for a, b in edges:
            if a == i and h[b] < h[i] + 1:
                h[b] = h[i] + 1
    return h


class _Scheduler:
    """Deterministic replay of a morphism's events in canonical order."""

    def __init__(self, f: PremonoidalMorphism):
        self.f = f
        self.graph = f.graph
        self.thr = threading(f)
        self.n = len(f.events)
        self.producer = {}
        self.consumer = {}
        nstrands = len(self.thr.labels)
        for sid in range(nstrands):
            self.producer[sid] = -1
            self.consumer[sid] = None
        for i in range(self.n):
            for sid in self.thr.produced[i]:
                self.producer[sid] = i
            for sid in self.thr.consumed[i]:
                self.consumer[sid] = i
        self.target_pos = {sid: k for k, sid in enumerate(self.thr.boundaries[-1])}
        self._components()
        self._fingerprints: dict[int, tuple] = {}
        # greatest fixpoint: drop trap edges whose gap can escape sideways,
        # which weakens the pins, which may invalidate further traps
        core = set(dependence_relation(f).edges)
        # identical firings stack like repeated letters in a trace: ordering
        # them is free (the exchange is a no-op on the sequence) and keeps
        # the degenerate case aligned with the classical normal form
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if f.events[i] == f.events[j]:
                    core.add((i, j))
        edges = core | self._all_trap_candidates()
        for _ in range(self.n + 2):
            desc = _closure(self.n, edges)
            new_edges = core | self._valid_traps(self._gap_sides(desc))
            if new_edges == edges:
                break
            edges = new_edges
        self.base_edges: set[tuple[int, int]] = edges

    def _components(self) -> None:
        """Union strands that meet at an event; a component is one wire flow."""
        nstrands = len(self.thr.labels)
        parent = list(range(nstrands))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        for i in range(self.n):
            ids = list(self.thr.consumed[i]) + list(self.thr.produced[i])
            for a, b in zip(ids, ids[1:]):
                union(a, b)
        self.comp = {s: find(s) for s in range(nstrands)}
        self.comp_members: dict[int, set[int]] = {}
        for s in range(nstrands):
            self.comp_members.setdefault(self.comp[s], set()).add(s)

    def _fwd_lineage(self, seed: set[int]) -> set[int]:
        out = set(seed)
        stack = list(seed)
        while stack:
            k = self.consumer[stack.pop()]
            if k is None:
                continue
            for t in self.thr.produced[k]:
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return out

    def _back_lineage(self, seed: set[int]) -> set[int]:
        out = set(seed)
        stack = list(seed)
        while stack:
            p = self.producer[stack.pop()]
            if p == -1:
                continue
            for t in self.thr.consumed[p]:
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return out

    def _trap_edges_between(
        self, z: int, lobs: set[int], robs: set[int]
    ) -> set[tuple[int, int]]:
        """Order constraints for a gap sitting between two strand sets: it
        cannot outlive an event that consumes from both sides' forward
        lineages, nor predate one that produced into both backward ones."""
        edges = set()
        lf, rf = self._fwd_lineage(lobs), self._fwd_lineage(robs)
        for j in range(z + 1, self.n):
            dj = set(self.thr.consumed[j])
            if dj & lf and dj & rf:
                edges.add((z, j))
        lb, rb = self._back_lineage(lobs), self._back_lineage(robs)
        for j in range(z):
            cj = set(self.thr.produced[j])
            if cj & lb and cj & rb:
                edges.add((j, z))
        return edges

    def _all_trap_candidates(self) -> set[tuple[int, int]]:
        edges = set()
        for i in range(self.n):
            if self.thr.consumed[i]:
                continue
            b = self.thr.boundaries[i]
            p = self.thr.spans[i]
            lobs, robs = set(b[:p]), set(b[p:])
            if lobs and robs:
                edges |= self._trap_edges_between(i, lobs, robs)
        return edges

    # -- class-invariant helpers ------------------------------------------

    def _forced_alive(self, sid: int, e: int, desc: list[set[int]]) -> bool:
        p, k = self.producer[sid], self.consumer[sid]
        if not (p == -1 or e in desc[p]):
            return False
        return k is None or k in desc[e]

    def _can_coexist(self, a: int, b: int, desc: list[set[int]]) -> bool:
        """False when one strand is provably dead before the other is born."""
        for x, y in ((a, b), (b, a)):
            k, p = self.consumer[x], self.producer[y]
            if k is not None and p != -1 and (k == p or p in desc[k]):
                return False
        return True

    def _strand_order(self, desc: list[set[int]]) -> dict[int, set[int]]:
        """left_of[a] = strands forced to lie right of a whenever both live.

        Relations between strands that provably never coexist are dropped:
        they carry no constraint and would poison the transitive closure.
        """
        nstrands = len(self.thr.labels)
        left_of: dict[int, set[int]] = {s: set() for s in range(nstrands)}

        def chain(ids: Sequence[int]) -> None:
            for a, b in zip(ids, ids[1:]):
                left_of[a].add(b)

        chain(self.thr.boundaries[0])
        chain(self.thr.boundaries[-1])
        for tup in self.thr.consumed + self.thr.produced:
            chain(tup)

        def close() -> None:
            changed = True
            while changed:
                changed = False
                for a in range(nstrands):
                    extra = set()
                    for b in left_of[a]:
                        extra |= {c for c in left_of[b] if self._can_coexist(a, c, desc)}
                    if not extra <= left_of[a]:
                        left_of[a] |= extra
                        changed = True

        close()
        changed = True
        while changed:
            changed = False
            for e in range(self.n):
                dom = self.thr.consumed[e]
                cod = self.thr.produced[e]
                if not dom and not cod:
                    continue
                both = set(dom) | set(cod)
                for s in range(nstrands):
                    if s in both:
                        continue
                    # a strand that provably cannot die before e is alive and
                    # outside e's contiguous block whenever the block exists,
                    # so any known relation with the block spreads to the
                    # whole consumed part; other strands may die too early
                    # for the inference to transfer
                    k = self.consumer[s]
                    if not (k is None or k in desc[e]):
                        continue
                    for rel_left in (True, False):
                        def known(u, s=s, rel_left=rel_left):
                            return s in left_of[u] if rel_left else u in left_of[s]

                        triggered = any(known(u) for u in dom) or any(known(u) for u in cod)
                        if not triggered:
                            continue
                        conclude = {v for v in dom if self._can_coexist(s, v, desc)}
                        for v in conclude:
                            if rel_left:
                                if s not in left_of[v]:
                                    left_of[v].add(s)
                                    changed = True
                            else:
                                if v not in left_of[s]:
                                    left_of[s].add(v)
                                    changed = True
            if changed:
                close()
        for a in range(nstrands):
            if any(a in left_of[b] and b in left_of[a] for b in left_of[a]):
                raise EngineError("contradictory strand order")
        return left_of

    def _side_pinned(self, tube: set[int], z: int, desc: list[set[int]]) -> bool:
        """A gap event is pinned by a flow when it can neither fire before
        the flow's lineage exists nor after all of it has died."""
        can_before = True
        for s in tube:
            p = self.producer[s]
            if p == -1 or z in desc[p]:
                can_before = False
                break
        if can_before:
            return False
        for s in tube:
            k = self.consumer[s]
            if k is None or k in desc[z]:
                return True
        return False

    def _gap_sides(self, desc: list[set[int]]):
        """Per gap event: its observed side flows, their lineage tubes, and
        whether each flow pins the gap to its side."""
        out: dict[int, tuple[list, list]] = {}
        for i in range(self.n):
            if self.thr.consumed[i]:
                continue
            b = self.thr.boundaries[i]
            p = self.thr.spans[i]
            analysed: list[list[tuple[set[int], set[int], bool]]] = []
            for observed in (b[:p], b[p:]):
                groups: dict[int, set[int]] = {}
                for s in observed:
                    groups.setdefault(self.comp[s], set()).add(s)
                side = []
                for strands in groups.values():
                    tube = self._fwd_lineage(strands) | self._back_lineage(strands)
                    side.append((strands, tube, self._side_pinned(tube, i, desc)))
                analysed.append(side)
            out[i] = (analysed[0], analysed[1])
        return out

    def _valid_traps(self, sides) -> set[tuple[int, int]]:
        """Trap edges hold only between flows that pin the gap from both
        sides; an escapable side lets the gap slide out instead."""
        edges = set()
        for z, (left, right) in sides.items():
            lp = set().union(*(s for s, _, pinned in left if pinned)) if any(
                pinned for _, _, pinned in left
            ) else set()
            rp = set().union(*(s for s, _, pinned in right if pinned)) if any(
                pinned for _, _, pinned in right
            ) else set()
            if lp and rp:
                edges |= self._trap_edges_between(z, lp, rp)
        return edges

    def _gap_pins(self, desc: list[set[int]]) -> dict[int, tuple[set[int], set[int]]]:
        """Strand sets that must lie left/right of each gap event's span.

        Each side of the gap is split into wire flows; a flow whose full
        lineage (backward and forward) covers every time the event could
        fire keeps its observed side.  Strands reachable from both sides
        only live after a joining event the gap is already trapped behind,
        so they are dropped from the pins."""
        pins = {}
        for i, (left, right) in self._gap_sides(desc).items():
            must_l: set[int] = set()
            must_r: set[int] = set()
            for side, out in ((left, must_l), (right, must_r)):
                for _, tube, pinned in side:
                    if pinned:
                        out |= tube
            overlap = must_l & must_r
            pins[i] = (must_l - overlap, must_r - overlap)
        return pins

    def _fingerprint(self, i: int) -> tuple:
        """Forward wire closure of an event, used to break firing ties."""
        if i in self._fingerprints:
            return self._fingerprints[i]
        parts = []
        for sid in self.thr.produced[i]:
            k = self.consumer[sid]
            if k is None:
                parts.append(("tgt", self.target_pos[sid], ()))
            else:
                slot = self.thr.consumed[k].index(sid)
                parts.append(("evt", slot, self._fingerprint(k)))
        dev = tuple(sorted(self.graph.devices_of(self.f.events[i].gen)))
        fp = (self.f.events[i].gen, dev, tuple(parts))
        self._fingerprints[i] = fp
        return fp

    # -- replay ------------------------------------------------------------

    def run(self) -> tuple[tuple[Event, ...], tuple[int, ...]]:
        extra: set[tuple[int, int]] = set()
        for _ in range(self.n * self.n + 1):
            edges = self.base_edges | extra
            try:
                return self._replay(edges)
            except _Blocked as b:
                if b.edge in edges:
                    raise EngineError("no progress on blocking edge")
                extra.add(b.edge)
        raise EngineError("scheduler did not converge")

    def _replay(self, edges: set[tuple[int, int]]) -> tuple[tuple[Event, ...], tuple[int, ...]]:
        n = self.n
        desc = _closure(n, edges)
        heights = _heights(n, edges)
        left_of = self._strand_order(desc)
        pins = self._gap_pins(desc)
        preds: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            preds[b].add(a)

        live = list(self.thr.boundaries[0])
        fired = [False] * n
        out_events: list[Event] = []
        out_heights: list[int] = []

        for _ in range(n):
            candidates = [
                i for i in range(n) if not fired[i] and all(fired[p] for p in preds[i])
            ]
            entries = []
            blocked: list[tuple[int, int]] = []
            for i in candidates:
                cons = self.thr.consumed[i]
                if cons:
                    positions = [live.index(s) for s in cons]
                    lo = min(positions)
                    if positions != list(range(lo, lo + len(cons))):
                        cset = set(cons)
                        for w in live[lo : max(positions) + 1]:
                            if w not in cset:
                                k = self.consumer[w]
                                if k is None or k in desc[i] or k == i:
                                    raise EngineError("strand pinned inside a consumed block")
                                blocked.append((k, i))
                        continue
                    pos = lo
                else:
                    pos = self._insert_position(i, live, left_of, pins)
                entries.append(((heights[i], pos, self.f.events[i].gen), pos, i))
            if not entries:
                if blocked:
                    blocked.sort()
                    raise _Blocked(blocked[0])
                raise EngineError("deadlock with events remaining")
            best_key = min(e[0] for e in entries)
            tied = [e for e in entries if e[0] == best_key]
            _, pos, i = self._pick(tied)
            fired[i] = True
            d = len(cons) if (cons := self.thr.consumed[i]) else 0
            left = Word(*(self.thr.labels[s] for s in live[:pos]))
            right = Word(*(self.thr.labels[s] for s in live[pos + d :]))
            live[pos : pos + d] = list(self.thr.produced[i])
            out_events.append(Event(self.f.events[i].gen, left, right))
            out_heights.append(heights[i])
        if any(a > b for a, b in zip(out_heights, out_heights[1:])):
            raise EngineError("emitted heights are not monotone")
        return tuple(out_events), tuple(out_heights)

    def _insert_position(
        self,
        i: int,
        live: list[int],
        left_of: dict[int, set[int]],
        pins: dict[int, tuple[set[int], set[int]]],
    ) -> int:
        must_left, must_right = set(), set()
        pl, pr = pins.get(i, (set(), set()))
        produced = self.thr.produced[i]
        for idx, s in enumerate(live):
            if s in pl:
                must_left.add(idx)
            if s in pr:
                must_right.add(idx)
            for c in produced:
                if c in left_of[s]:
                    must_left.add(idx)
                if s in left_of[c]:
                    must_right.add(idx)
        pos = max(must_left) + 1 if must_left else 0
        if any(idx < pos for idx in must_right):
            raise EngineError("inconsistent insertion constraints")
        return pos

    def _pick(self, tied: list[tuple[tuple, int, int]]) -> tuple[tuple, int, int]:
        if len(tied) == 1:
            return tied[0]
        # tied entries fire the same generator at the same position; order
        # by where their outputs flow, which is representation-invariant
        tied = sorted(tied, key=lambda t: t[2])
        return min(tied, key=lambda t: (self._fingerprint(t[2]), t[2]))


ORBIT_CAP = 100_000


def _orbit(
    graph: DeviceGraph,
    source: Word,
    start: tuple[Event, ...],
    cap: int,
    goal: tuple[Event, ...] | None = None,
):
    """Closure of an event sequence under all legal swaps.

    Returns the full set of states (as raw ``(gen, left, right)`` triples),
    or True/False early when searching for ``goal``, or None when the cap
    is hit first.  Works on plain tuples for speed.
    """
    gens = graph.underlying.generators
    dlen = {g: len(d) for g, (d, _) in gens.items()}
    cod = {g: c.items for g, (_, c) in gens.items()}
    dev = {g: graph.devices_of(g) for g in gens}
    src = source.items

    def raw(events: tuple[Event, ...]) -> tuple:
        return tuple((e.gen, e.left.items, e.right.items) for e in events)

    start_raw = raw(start)
    goal_raw = raw(goal) if goal is not None else None
    if goal_raw is not None and start_raw == goal_raw:
        return True

    def swapped(b0: tuple, e1: tuple, e2: tuple) -> list[tuple]:
        g1, l1, r1 = e1
        g2, l2, r2 = e2
        if dev[g1] & dev[g2]:
            return []
        d1, c1 = dlen[g1], len(cod[g1])
        d2 = dlen[g2]
        s1, s2 = len(l1), len(l2)
        out = []
        if s2 >= s1 + c1:
            ns2 = s2 + d1 - c1
            nf = (g2, b0[:ns2], b0[ns2 + d2 :])
            mid = nf[1] + cod[g2] + nf[2]
            out.append((nf, (g1, mid[:s1], mid[s1 + d1 :])))
        if s2 + d2 <= s1:
            nf = (g2, b0[:s2], b0[s2 + d2 :])
            mid = nf[1] + cod[g2] + nf[2]
            ns1 = s1 + len(cod[g2]) - d2
            pair = (nf, (g1, mid[:ns1], mid[ns1 + d1 :]))
            if pair not in out:
                out.append(pair)
        return out

    seen = {start_raw}
    frontier = [start_raw]
    while frontier:
        next_frontier = []
        for state in frontier:
            b = src
            bnds = [b]
            for g, l, r in state:
                b = l + cod[g] + r
                bnds.append(b)
            for k in range(len(state) - 1):
                for new_first, new_second in swapped(bnds[k], state[k], state[k + 1]):
                    nxt = state[:k] + (new_first, new_second) + state[k + 2 :]
                    if nxt in seen:
                        continue
                    if goal_raw is not None and nxt == goal_raw:
                        return True
                    seen.add(nxt)
                    if len(seen) > cap:
                        return None
                    next_frontier.append(nxt)
        frontier = next_frontier
    return False if goal_raw is not None else seen


def _needs_orbit(f: PremonoidalMorphism) -> bool:
    """Gap events (empty source span) mixed with actual strands are the
    regime where the greedy scheduler is only a heuristic; the pure trace
    regime (no strands at all) and the solid regime (no gaps) are handled
    by the scheduler alone."""
    has_gap = any(not f.graph.dom(e.gen) for e in f.events)
    if not has_gap:
        return False
    if f.source:
        return True
    return any(f.graph.dom(e.gen) or f.graph.cod(e.gen) for e in f.events)


def canonical_form(f: PremonoidalMorphism) -> CanonicalForm:
    """Canonical representative of the interchange congruence class.

    Solid morphisms (no nullary firings) and pure trace words are
    canonicalized by the deterministic scheduler.  Morphisms mixing gap
    events with live strands are canonicalized exactly, as the least
    event sequence of the swap closure, then layered by the scheduler;
    beyond ``ORBIT_CAP`` states the scheduler result is used directly.
    The invariance is cross-checked against the swap-closure oracle in
    the test suite rather than assumed.
    """
    cached = getattr(f, "_canon", None)
    if cached is not None:
        return cached
    rep = f
    exact = False
    if len(f.events) > 1 and _needs_orbit(f):
        orbit = _orbit(f.graph, f.source, f.events, ORBIT_CAP)
        if orbit is not None:
            least = min(orbit)
            events = tuple(Event(g, Word(*l), Word(*r)) for g, l, r in least)
            rep = PremonoidalMorphism(f.graph, f.source, f.target, events)
            exact = True
    try:
        events, heights = _Scheduler(rep).run()
        cf = CanonicalForm(events, heights)
    except EngineError:
        if not exact:
            raise
        # the orbit minimum is already canonical; layer it coarsely
        s = _Scheduler(rep)
        hs = _heights(s.n, s.base_edges)
        cf = CanonicalForm(rep.events, tuple(hs))
    object.__setattr__(f, "_canon", cf)
    return cf


def canonical_morphism(f: PremonoidalMorphism) -> PremonoidalMorphism:
    """The canonical representative rebuilt as a morphism."""
    return PremonoidalMorphism(f.graph, f.source, f.target, canonical_form(f).events)


def morphisms_equal(f: PremonoidalMorphism, g: PremonoidalMorphism) -> bool:
    if f.graph != g.graph:
        raise GraphMismatch("cannot compare morphisms over different graphs")
    if f.source != g.source or f.target != g.target:
        return False
    if f.events == g.events:
        return True
    if sorted(e.gen for e in f.events) != sorted(e.gen for e in g.events):
        return False
    return canonical_form(f) == canonical_form(g)


def bfs_equiv(f: PremonoidalMorphism, g: PremonoidalMorphism, max_states: int = 50_000) -> bool | None:
    """Independent oracle: breadth-first closure of f under legal swaps.

    Returns True when g's event sequence is reachable, False when the
    closure is exhausted without finding it, and None when the state cap
    is hit first.
    """
    if f.graph != g.graph:
        raise GraphMismatch("cannot compare morphisms over different graphs")
    if f.source != g.source or f.target != g.target:
        return False
    if sorted(e.gen for e in f.events) != sorted(e.gen for e in g.events):
        return False
    return _orbit(f.graph, f.source, f.events, max_states, goal=g.events)


# ---------------------------------------------------------------------------
# Interchange, tensors, functoriality


def parallel_holds(f: PremonoidalMorphism, g: PremonoidalMorphism) -> bool:
    """(f ⋊ dom g);(cod f ⋉ g) equals (dom f ⋉ g);(f ⋊ cod g)."""
    if f.graph != g.graph:
        raise GraphMismatch("morphisms over different graphs")
    lhs = compose(right_whisker(f, g.source), left_whisker(f.target, g))
    rhs = compose(left_whisker(f.source, g), right_whisker(f, g.target))
    return morphisms_equal(lhs, rhs)


def interchange_holds(f: PremonoidalMorphism, g: PremonoidalMorphism) -> bool:
    """True when f and g slide past each other in both orientations."""
    return parallel_holds(f, g) and parallel_holds(g, f)


def is_pure(f: PremonoidalMorphism) -> bool:
    return not devices_of(f)


def tensor_pure(f: PremonoidalMorphism, g: PremonoidalMorphism) -> PremonoidalMorphism:
    """Monoidal product of device-free morphisms: (f ⋊ dom g);(cod f ⋉ g)."""
    if f.graph != g.graph:
        raise GraphMismatch("morphisms over different graphs")
    if devices_of(f) or devices_of(g):
        raise NotPure("tensor is only defined for device-free morphisms")
    return compose(right_whisker(f, g.source), left_whisker(f.target, g))


def embed_pure(e: EffectfulGraph, f: PremonoidalMorphism) -> PremonoidalMorphism:
    """Send a morphism over the device-free pure graph into the impure side."""
    if f.graph != device_free(e.pure):
        raise GraphMismatch("morphism is not over the effectful graph's pure side")
    try:
        events = tuple(Event(e.embed[ev.gen], ev.left, ev.right) for ev in f.events)
    except KeyError as exc:
        raise GraphError(f"no embedding for pure generator {exc.args[0]!r}") from None
    return PremonoidalMorphism(e.impure, f.source, f.target, events)


def map_morphism(alpha: DeviceGraphMorphism, f: PremonoidalMorphism) -> PremonoidalMorphism:
    """Apply the premonoidal functor induced by a device graph morphism."""
    if f.graph != alpha.src:
        raise GraphMismatch("morphism is not over the map's source graph")
    problems = check_device_graph_morphism(alpha)
    if problems:
        raise GraphError("invalid device graph morphism: " + "; ".join(problems))
    events = tuple(
        Event(alpha.generator_map[e.gen], alpha.map_word(e.left), alpha.map_word(e.right))
        for e in f.events
    )
    return PremonoidalMorphism(alpha.dst, alpha.map_word(f.source), alpha.map_word(f.target), events)


@dataclass(frozen=True)
class FreeEffectfulCategory:
    """The free effectful category over an effectful graph.

    The pure side is the free monoidal category over the device-free view
    of the pure graph; the embedding is identity on objects and sends pure
    events to device-empty impure events, so its image is central.
    """

    graph: EffectfulGraph
    pure_side: DeviceGraph = field(init=False)
    impure_side: DeviceGraph = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "pure_side", device_free(self.graph.pure))
        object.__setattr__(self, "impure_side", self.graph.impure)

    def embed(self, f: PremonoidalMorphism) -> PremonoidalMorphism:
        return embed_pure(self.graph, f)


# ---------------------------------------------------------------------------
# Enumeration


def applicable_events(graph: DeviceGraph, w: Word) -> list[Event]:
    """Every event that can fire on the boundary w, in deterministic order."""
    out = []
    for gen in sorted(graph.underlying.generators):
        dom, _ = graph.underlying.generators[gen]
        d = len(dom)
        if d == 0:
            for p in range(len(w) + 1):
                out.append(Event(gen, w[:p], w[p:]))
        else:
            for p in range(len(w) - d + 1):
                if w[p : p + d] == dom:
                    out.append(Event(gen, w[:p], w[p + d :]))
    return out


def enumerate_morphisms(
    graph: DeviceGraph,
    max_events: int,
    pool: Iterable[Word],
    cap: int = 100_000,
) -> list[PremonoidalMorphism]:
    """All canonical-form-distinct morphisms with at most ``max_events``
    events whose source and target both belong to the pool.

    Intermediate boundaries are unconstrained.  Raises
    :class:`BudgetExceeded` when more than ``cap`` states or results would
    be produced.  Output order is deterministic.
    """
    pool_words = sorted({w for w in pool}, key=Word.sort_key)
    pool_set = set(pool_words)
    results: dict[tuple, PremonoidalMorphism] = {}
    visited = 0
    for source in pool_words:
        seen_prefix: set[tuple] = set()
        stack: list[tuple[tuple[Event, ...], Word]] = [((), source)]
        while stack:
            events, b = stack.pop()
            visited += 1
            if visited > cap:
                raise BudgetExceeded(f"enumeration exceeded {cap} states")
            m = PremonoidalMorphism(graph, source, b, events)
            canon = canonical_form(m)
            prefix_key = (source.items, canon.events)
            if prefix_key in seen_prefix:
                continue
            seen_prefix.add(prefix_key)
            if b in pool_set and prefix_key not in results:
                if len(results) >= cap:
                    raise BudgetExceeded(f"enumeration exceeded {cap} morphisms")
                results[prefix_key] = canonical_morphism(m)
            if len(events) < max_events:
                for e in applicable_events(graph, b):
                    nb = e.left + graph.cod(e.gen) + e.right
                    stack.append((events + (e,), nb))
    out = sorted(
        results.values(),
        key=lambda m: (len(m.events), m.source.sort_key(), tuple(e.key() for e in m.events)),
    )
    return out
