"""Shared builders for the test suite: the printer theory, random graphs,
random morphisms and random legal swap chains."""

from __future__ import annotations

import random

from restrace.graphs import DeviceGraph, EffectfulGraph, MonoidalGraph, Word
from restrace.freecat import PremonoidalMorphism, applicable_events, swap_variants, trace

W = Word


def printer_theory() -> EffectfulGraph:
    """One document generator, one printer: doc : ε→Doc, print : Doc→ε @ p."""
    pure = MonoidalGraph(frozenset({"Doc"}), {"doc": (W(), W("Doc"))})
    impure = DeviceGraph(
        MonoidalGraph(frozenset({"Doc"}), {"doc": (W(), W("Doc")), "print": (W("Doc"), W())}),
        frozenset({"p"}),
        {"doc": frozenset(), "print": frozenset({"p"})},
    )
    return EffectfulGraph(pure, impure, {"doc": "doc"})


def two_printer_graph() -> DeviceGraph:
    return DeviceGraph(
        MonoidalGraph(
            frozenset({"Doc"}),
            {"doc": (W(), W("Doc")), "lp": (W("Doc"), W()), "rp": (W("Doc"), W())},
        ),
        frozenset({"l", "r"}),
        {"doc": frozenset(), "lp": frozenset({"l"}), "rp": frozenset({"r"})},
    )


OBJECTS = ["A", "B", "C"]


def random_graph(rng: random.Random, max_gens: int = 5, max_devices: int = 3) -> DeviceGraph:
    objects = frozenset(rng.sample(OBJECTS, rng.randint(1, len(OBJECTS))))
    objs = sorted(objects)
    devices = [f"d{i}" for i in range(rng.randint(0, max_devices))]
    gens = {}
    dev = {}
    for i in range(rng.randint(1, max_gens)):
        name = f"g{i}"
        dom = W(*(rng.choice(objs) for _ in range(rng.randint(0, 2))))
        cod = W(*(rng.choice(objs) for _ in range(rng.randint(0, 2))))
        gens[name] = (dom, cod)
        k = rng.randint(0, min(2, len(devices)))
        dev[name] = frozenset(rng.sample(devices, k)) if k else frozenset()
    return DeviceGraph(MonoidalGraph(objects, gens), frozenset(devices), dev)


def random_effectful_graph(rng: random.Random) -> EffectfulGraph:
    impure = random_graph(rng)
    device_free = sorted(
        g for g in impure.underlying.generators if not impure.devices_of(g)
    )
    pure_names = device_free[: rng.randint(0, len(device_free))]
    pure = MonoidalGraph(
        impure.objects, {g: impure.underlying.generators[g] for g in pure_names}
    )
    return EffectfulGraph(pure, impure, {g: g for g in pure_names})


def random_morphism(rng: random.Random, g: DeviceGraph, max_events: int) -> PremonoidalMorphism:
    objs = sorted(g.objects)
    source = W(*(rng.choice(objs) for _ in range(rng.randint(0, 3))))
    events = []
    b = source
    for _ in range(rng.randint(0, max_events)):
        options = applicable_events(g, b)
        if not options:
            break
        e = rng.choice(options)
        events.append(e)
        b = e.left + g.cod(e.gen) + e.right
    return trace(g, source, events)


def random_swaps(rng: random.Random, m: PremonoidalMorphism, steps: int) -> PremonoidalMorphism:
    for _ in range(steps):
        if len(m.events) < 2:
            break
        k = rng.randrange(len(m.events) - 1)
        variants = swap_variants(m, k)
        if variants:
            m = rng.choice(variants)
    return m


def random_dependency(rng: random.Random, max_symbols: int = 8):
    from restrace.traces import DependencyRelation

    n = rng.randint(1, max_symbols)
    symbols = [f"s{i}" for i in range(n)]
    pairs = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                pairs.add((symbols[i], symbols[j]))
    return DependencyRelation(frozenset(symbols), frozenset(pairs))
