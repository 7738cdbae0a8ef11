import random

import pytest
from hypothesis import given, settings, strategies as st

from restrace.graphs import DeviceGraph, MonoidalGraph, Word, device_free
from restrace.freecat import (
    BoundaryMismatch,
    Event,
    GraphMismatch,
    NotPure,
    NotSwappable,
    PremonoidalMorphism,
    bfs_equiv,
    boundaries,
    canonical_form,
    compose,
    dependence_relation,
    devices_of,
    embed_pure,
    enumerate_morphisms,
    gen_event,
    identity,
    interchange_holds,
    left_whisker,
    map_morphism,
    morphisms_equal,
    right_whisker,
    swap_adjacent,
    swap_variants,
    tensor_pure,
    trace,
)
from restrace.graphs import DeviceGraphMorphism
from util import (
    W,
    printer_theory,
    random_graph,
    random_morphism,
    random_swaps,
    two_printer_graph,
)


@pytest.fixture
def printer():
    return printer_theory().impure


def test_identity_has_no_events(printer):
    m = identity(printer, W("Doc"))
    assert m.source == m.target == W("Doc")
    assert m.events == ()
    assert identity(printer, W()).events == ()


def test_identity_is_unit(printer):
    f = gen_event(printer, W(), "print", W())
    assert compose(identity(printer, f.source), f) == f
    assert compose(f, identity(printer, f.target)) == f


def test_gen_event_boundaries(printer):
    m = gen_event(printer, W(), "print", W("Doc"))
    assert m.source == W("Doc", "Doc") and m.target == W("Doc")
    d = gen_event(printer, W(), "doc", W())
    assert d.source == W() and d.target == W("Doc")


def test_zero_width_event_at_offset():
    g = DeviceGraph(
        MonoidalGraph(frozenset({"A"}), {"f": (W(), W())}), frozenset(), {"f": frozenset()}
    )
    m = gen_event(g, W("A"), "f", W())
    assert m.source == m.target == W("A")
    assert len(m.events) == 1


def test_compose_threads_boundaries(printer):
    two = compose(gen_event(printer, W(), "print", W("Doc")), gen_event(printer, W(), "print", W()))
    assert two.source == W("Doc", "Doc") and two.target == W()
    assert len(two.events) == 2
    roundtrip = compose(gen_event(printer, W(), "doc", W()), gen_event(printer, W(), "print", W()))
    assert roundtrip.source == W() and roundtrip.target == W()


def test_compose_mismatch_raises(printer):
    with pytest.raises(BoundaryMismatch):
        compose(gen_event(printer, W(), "doc", W()), gen_event(printer, W(), "doc", W()))


def test_compose_graph_mismatch(printer):
    other = two_printer_graph()
    with pytest.raises(GraphMismatch):
        compose(identity(printer, W("Doc")), identity(other, W("Doc")))


def test_whisker_laws(printer):
    f = gen_event(printer, W(), "print", W())
    assert left_whisker(W(), f) == f
    assert right_whisker(f, W()) == f
    ab = left_whisker(W("Doc"), left_whisker(W("Doc"), f))
    assert ab == left_whisker(W("Doc", "Doc"), f)
    assert left_whisker(W("Doc"), f) == gen_event(printer, W("Doc"), "print", W())


def test_devices_of(printer):
    assert devices_of(identity(printer, W("Doc"))) == frozenset()
    assert devices_of(gen_event(printer, W(), "print", W())) == frozenset({"p"})
    two = two_printer_graph()
    both = compose(gen_event(two, W(), "lp", W("Doc")), gen_event(two, W(), "rp", W()))
    assert devices_of(both) == frozenset({"l", "r"})


def test_swap_two_printers(printer):
    two = two_printer_graph()
    m = compose(gen_event(two, W(), "lp", W("Doc")), gen_event(two, W(), "rp", W()))
    swapped = swap_adjacent(m, 0)
    assert swapped.source == m.source and swapped.target == m.target
    assert [e.gen for e in swapped.events] == ["rp", "lp"]
    assert swap_adjacent(swapped, 0) == m


def test_swap_same_printer_rejected(printer):
    m = compose(gen_event(printer, W(), "print", W("Doc")), gen_event(printer, W(), "print", W()))
    with pytest.raises(NotSwappable) as e:
        swap_adjacent(m, 0)
    assert e.value.reason == "shared-device"


def test_swap_wire_locked_rejected(printer):
    m = compose(gen_event(printer, W(), "doc", W()), gen_event(printer, W(), "print", W()))
    with pytest.raises(NotSwappable) as e:
        swap_adjacent(m, 0)
    assert e.value.reason == "overlapping-span"


def test_swap_zero_width_same_position():
    g = DeviceGraph(
        MonoidalGraph(frozenset(), {"f": (W(), W()), "h": (W(), W())}),
        frozenset({"d", "e"}),
        {"f": frozenset({"d"}), "h": frozenset({"e"})},
    )
    m = compose(gen_event(g, W(), "f", W()), gen_event(g, W(), "h", W()))
    swapped = swap_adjacent(m, 0)
    assert [e.gen for e in swapped.events] == ["h", "f"]
    assert swap_adjacent(swapped, 0) == m


def test_swap_index_out_of_range(printer):
    with pytest.raises(IndexError):
        swap_adjacent(identity(printer, W("Doc")), 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 40))
def test_swap_preserves_invariants(seed, kseed):
    rng = random.Random(seed)
    g = random_graph(rng)
    m = random_morphism(rng, g, 6)
    if len(m.events) < 2:
        return
    k = kseed % (len(m.events) - 1)
    variants = swap_variants(m, k)
    for v in variants:
        assert v.source == m.source and v.target == m.target
        assert devices_of(v) == devices_of(m)
        assert sorted(e.gen for e in v.events) == sorted(e.gen for e in m.events)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 40))
def test_swap_involution_when_unambiguous(seed, kseed):
    # the swap relation forks at zero-width spans sharing a position; away
    # from that corner the deterministic swap is an involution
    rng = random.Random(seed)
    g = random_graph(rng)
    m = random_morphism(rng, g, 6)
    if len(m.events) < 2:
        return
    k = kseed % (len(m.events) - 1)
    try:
        s = swap_adjacent(m, k)
    except NotSwappable:
        return
    if len(swap_variants(m, k)) == 1 and len(swap_variants(s, k)) == 1:
        assert swap_adjacent(s, k) == m


def test_swap_fork_identified_by_engine():
    # both readings of an ambiguous zero-width swap stay in one class
    g = DeviceGraph(
        MonoidalGraph(frozenset({"B"}), {"mk": (W(), W("B")), "rm": (W("B"), W())}),
        frozenset(),
        {"mk": frozenset(), "rm": frozenset()},
    )
    m = trace(g, W("B"), [Event("rm", W(), W()), Event("mk", W(), W())])
    variants = swap_variants(m, 0)
    assert len(variants) == 2
    for v in variants:
        assert morphisms_equal(m, v)
        assert bfs_equiv(m, v) is True


def test_dependence_relation_edges(printer):
    m = compose(gen_event(printer, W(), "print", W("Doc")), gen_event(printer, W(), "print", W()))
    rel = dependence_relation(m)
    assert (0, 1) in rel.device_edges
    chained = compose(gen_event(printer, W(), "doc", W()), gen_event(printer, W(), "print", W()))
    rel2 = dependence_relation(chained)
    assert (0, 1) in rel2.wire_edges and not rel2.device_edges


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_dependence_invariant_under_swap(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    m = random_morphism(rng, g, 6)
    for k in range(len(m.events) - 1):
        try:
            s = swap_adjacent(m, k)
        except NotSwappable:
            continue
        perm = list(range(len(m.events)))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        rel = dependence_relation(m)
        rel_s = dependence_relation(s)
        mapped = {tuple(sorted((perm[a], perm[b]))) for a, b in rel.edges}
        mapped_s = {tuple(sorted((a, b))) for a, b in rel_s.edges}
        assert mapped == mapped_s


def test_one_printer_orders_differ(printer):
    a = compose(gen_event(printer, W(), "print", W("Doc")), gen_event(printer, W(), "print", W()))
    b = compose(gen_event(printer, W("Doc"), "print", W()), gen_event(printer, W(), "print", W()))
    assert not morphisms_equal(a, b)
    assert bfs_equiv(a, b) is False


def test_two_printer_orders_equal():
    two = two_printer_graph()
    a = compose(gen_event(two, W(), "lp", W("Doc")), gen_event(two, W(), "rp", W()))
    b = compose(gen_event(two, W("Doc"), "rp", W()), gen_event(two, W(), "lp", W()))
    assert morphisms_equal(a, b)
    assert bfs_equiv(a, b) is True


def test_document_recreation_class(printer):
    # print the incoming document and emit a fresh one: all three schedules agree
    m1 = trace(printer, W("Doc"), [Event("doc", W(), W("Doc")), Event("print", W("Doc"), W())])
    m2 = trace(printer, W("Doc"), [Event("print", W(), W()), Event("doc", W(), W())])
    m3 = trace(printer, W("Doc"), [Event("doc", W("Doc"), W()), Event("print", W(), W("Doc"))])
    assert morphisms_equal(m1, m2) and morphisms_equal(m2, m3)
    assert canonical_form(m1) == canonical_form(m3)


def test_floating_scalar_position_matters():
    g = DeviceGraph(
        MonoidalGraph(frozenset({"A", "B"}), {"f": (W(), W()), "h": (W("A", "A"), W("B"))}),
        frozenset(),
        {"f": frozenset(), "h": frozenset()},
    )
    inside = trace(g, W("A", "A"), [Event("f", W("A"), W("A")), Event("h", W(), W())])
    left = trace(g, W("A", "A"), [Event("f", W(), W("A", "A")), Event("h", W(), W())])
    right = trace(g, W("A", "A"), [Event("f", W("A", "A"), W()), Event("h", W(), W())])
    assert not morphisms_equal(inside, left)
    assert not morphisms_equal(inside, right)
    assert not morphisms_equal(left, right)
    after = trace(g, W("A", "A"), [Event("h", W(), W()), Event("f", W(), W("B"))])
    assert morphisms_equal(left, after)


def test_canonical_identity_empty(printer):
    cf = canonical_form(identity(printer, W("Doc")))
    assert cf.events == () and cf.heights == ()


def test_canonical_foata_layers(printer):
    # fresh doc and print of an old one are independent: one layer
    m = trace(printer, W("Doc"), [Event("doc", W(), W("Doc")), Event("print", W("Doc"), W())])
    cf = canonical_form(m)
    assert cf.heights == (1, 1)
    seq = compose(gen_event(printer, W(), "doc", W()), gen_event(printer, W(), "print", W()))
    assert canonical_form(seq).heights == (1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_canonical_sound_under_swaps(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    m = random_morphism(rng, g, 6)
    m2 = random_swaps(rng, m, 12)
    assert canonical_form(m) == canonical_form(m2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_equality_matches_oracle(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    f = random_morphism(rng, g, 5)
    h = random_morphism(rng, g, 5)
    if f.source != h.source or f.target != h.target:
        return
    oracle = bfs_equiv(f, h, max_states=100_000)
    if oracle is None:
        return
    assert morphisms_equal(f, h) == oracle


def test_bfs_permutation_count():
    g = DeviceGraph(
        MonoidalGraph(frozenset(), {"a": (W(), W()), "b": (W(), W()), "c": (W(), W())}),
        frozenset({"x", "y", "z"}),
        {"a": frozenset({"x"}), "b": frozenset({"y"}), "c": frozenset({"z"})},
    )
    m = trace(g, W(), [Event("a", W(), W()), Event("b", W(), W()), Event("c", W(), W())])
    from restrace.freecat import _orbit

    orbit = _orbit(g, W(), m.events, 1000)
    assert len(orbit) == 6  # all 3! interleavings of orthogonal zero-width events
    perm = trace(g, W(), [Event("c", W(), W()), Event("a", W(), W()), Event("b", W(), W())])
    assert bfs_equiv(m, perm) is True


def test_bfs_inconclusive_on_tiny_cap():
    g = DeviceGraph(
        MonoidalGraph(frozenset(), {"a": (W(), W()), "d1": (W(), W()), "d2": (W(), W())}),
        frozenset({"q"}),
        {"a": frozenset(), "d1": frozenset({"q"}), "d2": frozenset({"q"})},
    )
    start = trace(g, W(), [Event("a", W(), W()), Event("d1", W(), W()), Event("d2", W(), W())])
    goal = trace(g, W(), [Event("a", W(), W()), Event("d2", W(), W()), Event("d1", W(), W())])
    assert bfs_equiv(start, goal, max_states=1) is None
    assert bfs_equiv(start, goal, max_states=1000) is False


def test_interchange_orthogonal_pair():
    two = two_printer_graph()
    lp = gen_event(two, W(), "lp", W())
    rp = gen_event(two, W(), "rp", W())
    assert interchange_holds(lp, rp)


def test_interchange_fails_shared_device(printer):
    p = gen_event(printer, W(), "print", W())
    assert not interchange_holds(p, p)


def test_interchange_with_identity(printer):
    p = gen_event(printer, W(), "print", W())
    assert interchange_holds(p, identity(printer, W("Doc")))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_orthogonal_morphisms_interchange(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    f = random_morphism(rng, g, 3)
    h = random_morphism(rng, g, 3)
    if devices_of(f) & devices_of(h):
        return
    assert interchange_holds(f, h)


def test_tensor_pure_laws():
    eff = printer_theory()
    pure = device_free(eff.pure)
    d = gen_event(pure, W(), "doc", W())
    i = identity(pure, W("Doc"))
    assert tensor_pure(i, i) == identity(pure, W("Doc", "Doc"))
    dd = tensor_pure(d, d)
    assert dd.source == W() and dd.target == W("Doc", "Doc")
    # functoriality up to the congruence
    lhs = compose(tensor_pure(d, d), tensor_pure(i, i))
    rhs = tensor_pure(compose(d, identity(pure, W("Doc"))), compose(d, identity(pure, W("Doc"))))
    assert morphisms_equal(lhs, rhs)


def test_tensor_pure_rejects_devices(printer):
    with pytest.raises(NotPure):
        tensor_pure(gen_event(printer, W(), "print", W()), identity(printer, W()))


def test_embed_pure_central():
    eff = printer_theory()
    pure = device_free(eff.pure)
    d = embed_pure(eff, gen_event(pure, W(), "doc", W()))
    assert devices_of(d) == frozenset()
    p = gen_event(eff.impure, W(), "print", W())
    assert interchange_holds(d, p)


def test_map_morphism_printer_into_two_printers():
    eff = printer_theory()
    two = two_printer_graph()
    alpha = DeviceGraphMorphism(
        eff.impure, two, {"Doc": "Doc"}, {"doc": "doc", "print": "lp"}
    )
    m = compose(gen_event(eff.impure, W(), "print", W("Doc")), gen_event(eff.impure, W(), "print", W()))
    image = map_morphism(alpha, m)
    assert [e.gen for e in image.events] == ["lp", "lp"]
    assert image.source == W("Doc", "Doc")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_map_morphism_preserves_equality(seed):
    rng = random.Random(seed)
    eff = printer_theory()
    two = two_printer_graph()
    alpha = DeviceGraphMorphism(eff.impure, two, {"Doc": "Doc"}, {"doc": "doc", "print": "lp"})
    m = random_morphism(rng, eff.impure, 4)
    m2 = random_swaps(rng, m, 8)
    assert morphisms_equal(map_morphism(alpha, m), map_morphism(alpha, m2))


def test_enumerate_printer_one_event(printer):
    pool = [W(), W("Doc")]
    ms = enumerate_morphisms(printer, 1, pool)
    keys = {(str(m.source), str(m.target), tuple(e.gen for e in m.events)) for m in ms}
    assert keys == {
        ("", "", ()),
        ("Doc", "Doc", ()),
        ("", "Doc", ("doc",)),
        ("Doc", "", ("print",)),
    }


def test_enumerate_zero_events(printer):
    ms = enumerate_morphisms(printer, 0, [W(), W("Doc")])
    assert all(not m.events for m in ms)
    assert len(ms) == 2


def test_enumerate_one_printer_two_orders(printer):
    ms = enumerate_morphisms(printer, 2, [W("Doc", "Doc"), W()])
    two_prints = [m for m in ms if [e.gen for e in m.events] == ["print", "print"]]
    assert len(two_prints) == 2  # the two print orders stay distinct


def test_enumerate_budget():
    from restrace.freecat import BudgetExceeded

    printer = printer_theory().impure
    with pytest.raises(BudgetExceeded):
        enumerate_morphisms(printer, 3, [W(), W("Doc")], cap=5)


def test_free_effectful_category_wrapper():
    from restrace.freecat import FreeEffectfulCategory

    eff = printer_theory()
    cat = FreeEffectfulCategory(eff)
    assert cat.pure_side == device_free(eff.pure)
    assert cat.impure_side == eff.impure
    d = gen_event(cat.pure_side, W(), "doc", W())
    image = cat.embed(d)
    assert devices_of(image) == frozenset()
    assert image.graph == eff.impure


def test_canonical_layers_match_trace_foata():
    # over a distribution, the engine's layers are exactly the Foata layers
    from restrace.traces import DependencyRelation, dependency_to_distribution, foata_nf, word_morphism

    d = DependencyRelation(frozenset("abcd"), frozenset({("a", "b"), ("b", "d")}))
    dist = dependency_to_distribution(d)
    rng = random.Random(11)
    for _ in range(50):
        w = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        cf = canonical_form(word_morphism(dist, w))
        layers = tuple(tuple(sorted(e.gen for e in layer)) for layer in cf.layers())
        assert layers == foata_nf(d, w)
