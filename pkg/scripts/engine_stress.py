#!/usr/bin/env python3
"""Randomized cross-validation of the canonical-form engine.

Generates random device graphs (including nullary and co-nullary
generators), random morphisms, and random legal swap chains, then checks

  * soundness: canonical forms are invariant under legal swaps, and
  * completeness: canonical equality agrees with the breadth-first
    closure of the swap relation on random same-boundary pairs.

Run:  python scripts/engine_stress.py [--trials N] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import sys

from restrace.graphs import DeviceGraph, MonoidalGraph, Word
from restrace.freecat import (
    PremonoidalMorphism,
    applicable_events,
    bfs_equiv,
    canonical_form,
    morphisms_equal,
    swap_variants,
    trace,
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
        dom = Word(*(rng.choice(objs) for _ in range(rng.randint(0, 2))))
        cod = Word(*(rng.choice(objs) for _ in range(rng.randint(0, 2))))
        gens[name] = (dom, cod)
        k = rng.randint(0, min(2, len(devices)))
        dev[name] = frozenset(rng.sample(devices, k)) if k else frozenset()
    return DeviceGraph(MonoidalGraph(objects, gens), frozenset(devices), dev)


def random_morphism(rng: random.Random, g: DeviceGraph, max_events: int) -> PremonoidalMorphism:
    objs = sorted(g.objects)
    source = Word(*(rng.choice(objs) for _ in range(rng.randint(0, 3))))
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


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-events", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    sound_fail = comp_fail = inconclusive = 0
    for t in range(args.trials):
        g = random_graph(rng)
        m = random_morphism(rng, g, args.max_events)
        m2 = random_swaps(rng, m, 20)
        try:
            if canonical_form(m) != canonical_form(m2):
                sound_fail += 1
                print(f"[{t}] soundness failure:\n  {m}\n  {m2}")
        except Exception as e:  # engine errors are failures too
            sound_fail += 1
            print(f"[{t}] engine error (soundness): {e!r}\n  {m}\n  {m2}")
            continue

        other = random_morphism(rng, g, min(len(m.events) + 1, 6))
        small = random_morphism(rng, g, 6)
        for f, h in ((m if len(m.events) <= 6 else small, other),):
            if f.source != h.source or f.target != h.target:
                continue
            oracle = bfs_equiv(f, h, max_states=200_000)
            if oracle is None:
                inconclusive += 1
                continue
            try:
                mine = morphisms_equal(f, h)
            except Exception as e:
                comp_fail += 1
                print(f"[{t}] engine error (equality): {e!r}\n  {f}\n  {h}")
                continue
            if mine != oracle:
                comp_fail += 1
                print(f"[{t}] completeness failure (engine={mine}, bfs={oracle}):\n  {f}\n  {h}")

    print(
        f"trials={args.trials} soundness-failures={sound_fail} "
        f"completeness-failures={comp_fail} inconclusive={inconclusive}"
    )
    return 1 if (sound_fail or comp_fail) else 0


if __name__ == "__main__":
    sys.exit(main())
