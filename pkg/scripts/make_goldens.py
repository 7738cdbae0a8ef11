#!/usr/bin/env python3
"""Regenerate the golden diagram files under tests/golden/.

Inspect the output by eye before committing: the goldens freeze both the
layout policy and the byte-level SVG formatting.
"""

from __future__ import annotations

import pathlib
import sys

from restrace.graphs import Word
from restrace.freecat import compose, gen_event
from restrace.render import layout, render_svg, render_text
from restrace.tensor import commuting_tensor
from restrace.traces import DependencyRelation, dependency_to_distribution, word_morphism

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))
from util import printer_theory  # noqa: E402

W = Word
GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def goldens():
    printer = printer_theory().impure
    one_printer_pair = compose(
        gen_event(printer, W(), "print", W("Doc")), gen_event(printer, W(), "print", W())
    )
    yield "one_printer_two_prints", one_printer_pair

    two = commuting_tensor(printer_theory(), printer_theory()).product.impure
    two_printer_pair = compose(
        gen_event(two, W(), "l·print", W("Doc")), gen_event(two, W(), "r·print", W())
    )
    yield "two_printers_two_prints", two_printer_pair

    greek = DependencyRelation(frozenset("αβγδ"), frozenset({("α", "β"), ("β", "δ")}))
    dist = dependency_to_distribution(greek)
    yield "trace_word", word_morphism(dist, list("γαβαδ"))

    yield "whiskered_print", gen_event(printer, W("Doc"), "print", W())

    fresh_then_both = compose(
        compose(gen_event(two, W(), "doc", W("Doc")), gen_event(two, W(), "l·print", W("Doc"))),
        gen_event(two, W(), "r·print", W()),
    )
    yield "two_printer_full_run", fresh_then_both


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, morphism in goldens():
        lay = layout(morphism)
        (GOLDEN / f"{name}.svg").write_bytes(render_svg(lay))
        (GOLDEN / f"{name}.txt").write_text(render_text(lay), encoding="utf-8")
        print(f"wrote {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
