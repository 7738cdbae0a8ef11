"""Command-line interface: graph files, morphism expressions, subcommands.

Graph files are line oriented; ``#`` starts a comment.  Directives:

    objects N1 N2 ...
    devices D1 D2 ...
    pure NAME : DOM -> COD
    gen NAME : DOM -> COD @ D1 D2 ...

DOM and COD are possibly-empty lists of object names; the ``@`` device list
is optional.  Pure generators are embedded automatically under their own
name.  Morphism expressions follow the grammar

    term := id( WORD ) | NAME [ WORD | WORD ] | term ; term | ( term )

with ``;`` associating to the left.  Every command is a pure function of
its file bytes and arguments; diagnostics go to stderr and errors exit 2.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .graphs import (
    EMPTY,
    DeviceGraph,
    EffectfulGraph,
    MonoidalGraph,
    Word,
    is_valid_name,
    validate_effectful_graph,
)
from .freecat import (
    BoundaryMismatch,
    GraphError,
    PremonoidalMorphism,
    canonical_form,
    compose,
    devices_of,
    expr_string,
    gen_event,
    identity,
    interchange_holds,
    morphisms_equal,
)
from .interference import underlying_device_graph_bounded
from .render import layout, render_svg, render_text
from .tensor import commuting_tensor
from .traces import DependencyRelation, dependency_to_distribution, trace_equal

__all__ = [
    "ParseError",
    "GraphFile",
    "parse_graph_file",
    "format_graph_file",
    "parse_morphism_expr",
    "main",
]


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class GraphFile:
    """A parsed graph file; ``has_pure`` records whether any ``pure``
    directive was present (otherwise the file describes a bare device
    graph, wrapped as an effectful graph with an empty pure part)."""

    effectful: EffectfulGraph
    has_pure: bool

    @property
    def device_graph(self) -> DeviceGraph:
        return self.effectful.impure


def parse_graph_file(text: str) -> GraphFile:
    objects: list[str] = []
    devices: list[str] = []
    pure: dict[str, tuple[Word, Word]] = {}
    gens: dict[str, tuple[Word, Word, tuple[str, ...]]] = {}
    decl_line: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "objects":
            objects.extend(tokens[1:])
        elif head == "devices":
            devices.extend(tokens[1:])
        elif head in ("pure", "gen"):
            if len(tokens) < 3 or tokens[2] != ":":
                raise ParseError(lineno, f"expected '{head} NAME : DOM -> COD'")
            name = tokens[1]
            if not is_valid_name(name):
                raise ParseError(lineno, f"invalid generator name {name!r}")
            if name in pure or name in gens:
                raise ParseError(lineno, f"duplicate generator {name!r}")
            rest = tokens[3:]
            if "->" not in rest:
                raise ParseError(lineno, "missing '->'")
            arrow = rest.index("->")
            dom = Word(*rest[:arrow])
            tail = rest[arrow + 1 :]
            if "@" in tail:
                at = tail.index("@")
                cod = Word(*tail[:at])
                devs = tuple(tail[at + 1 :])
            else:
                cod = Word(*tail)
                devs = ()
            if head == "pure":
                if devs:
                    raise ParseError(lineno, "pure generators take no devices")
                pure[name] = (dom, cod)
            else:
                gens[name] = (dom, cod, devs)
            decl_line[name] = lineno
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")

    all_gens: dict[str, tuple[Word, Word]] = {}
    dev: dict[str, frozenset[str]] = {}
    for name, (dom, cod) in pure.items():
        all_gens[name] = (dom, cod)
        dev[name] = frozenset()
    for name, (dom, cod, devs) in gens.items():
        all_gens[name] = (dom, cod)
        dev[name] = frozenset(devs)

    objset = frozenset(objects)
    impure = DeviceGraph(MonoidalGraph(objset, all_gens), frozenset(devices), dev)
    eff = EffectfulGraph(MonoidalGraph(objset, dict(pure)), impure, {v: v for v in pure})
    problems = validate_effectful_graph(eff)
    if problems:
        details = "; ".join(problems)
        err = ParseError(0, f"invalid graph: {details}")
        err.violations = problems  # type: ignore[attr-defined]
        raise err
    return GraphFile(eff, bool(pure))


def format_graph_file(gf: GraphFile) -> str:
    """Serialize back to the file format; reparsing yields a name-identical
    graph.  Requires pure generators to be embedded under their own name,
    which holds for every graph this tool produces."""
    eff = gf.effectful
    for v, image in eff.embed.items():
        if v != image:
            raise ValueError(f"cannot serialize non-identity embedding {v!r} -> {image!r}")
    lines = []
    if eff.impure.objects:
        lines.append("objects " + " ".join(sorted(eff.impure.objects)))
    if eff.impure.devices:
        lines.append("devices " + " ".join(sorted(eff.impure.devices)))

    def decl(head: str, name: str, dom: Word, cod: Word, devs: list[str]) -> str:
        parts = [head, name, ":", *dom.items, "->", *cod.items]
        if devs:
            parts += ["@", *devs]
        return " ".join(parts)

    for name in sorted(eff.pure.generators):
        dom, cod = eff.pure.generators[name]
        lines.append(decl("pure", name, dom, cod, []))
    for name in sorted(eff.impure.underlying.generators):
        if name in eff.pure.generators:
            continue
        dom, cod = eff.impure.underlying.generators[name]
        lines.append(decl("gen", name, dom, cod, sorted(eff.impure.devices_of(name))))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Morphism expressions

_SYMBOLS = set("()[]|;")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name' or one of ()[]|;
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOLS:
            out.append(_Token(ch, ch, i))
            i += 1
            continue
        if ch == "#" or ch == "@":
            raise ParseError(0, f"unexpected character {ch!r} at position {i}")
        j = i
        while j < len(text) and not text[j].isspace() and text[j] not in _SYMBOLS and text[j] not in "#@":
            j += 1
        out.append(_Token("name", text[i:j], i))
        i = j
    return out


class _ExprParser:
    def __init__(self, text: str, graph: DeviceGraph):
        self.text = text
        self.graph = graph
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, kind: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(0, "unexpected end of expression")
        if kind is not None and tok.kind != kind:
            raise ParseError(0, f"expected {kind!r} at position {tok.pos}, got {tok.value!r}")
        self.i += 1
        return tok

    def parse(self) -> PremonoidalMorphism:
        m, _ = self.sequence()
        if self.peek() is not None:
            tok = self.peek()
            raise ParseError(0, f"trailing input at position {tok.pos}: {tok.value!r}")
        return m

    def sequence(self) -> tuple[PremonoidalMorphism, tuple[int, int]]:
        m, span = self.atom()
        while self.peek() is not None and self.peek().kind == ";":
            self.next(";")
            rhs, rspan = self.atom()
            try:
                m = compose(m, rhs)
            except BoundaryMismatch as e:
                raise ParseError(
                    0,
                    f"boundary mismatch at positions {span[0]}-{rspan[1]}: "
                    f"[{e.got}] does not meet [{e.expected}]",
                ) from None
            span = (span[0], rspan[1])
        return m, span

    def word(self, stop: str) -> Word:
        names = []
        while self.peek() is not None and self.peek().kind == "name":
            names.append(self.next().value)
        return Word(*names)

    def atom(self) -> tuple[PremonoidalMorphism, tuple[int, int]]:
        tok = self.peek()
        if tok is None:
            raise ParseError(0, "unexpected end of expression")
        if tok.kind == "(":
            self.next("(")
            m, span = self.sequence()
            close = self.next(")")
            return m, (tok.pos, close.pos + 1)
        if tok.kind != "name":
            raise ParseError(0, f"unexpected {tok.value!r} at position {tok.pos}")
        name = self.next()
        follow = self.peek()
        if name.value == "id" and follow is not None and follow.kind == "(":
            self.next("(")
            w = self.word(")")
            close = self.next(")")
            try:
                return identity(self.graph, w), (name.pos, close.pos + 1)
            except GraphError as e:
                raise ParseError(0, f"at position {name.pos}: {e}") from None
        self.next("[")
        left = self.word("|")
        self.next("|")
        right = self.word("]")
        close = self.next("]")
        try:
            m = gen_event(self.graph, left, name.value, right)
        except GraphError as e:
            raise ParseError(0, f"at position {name.pos}: {e}") from None
        return m, (name.pos, close.pos + 1)


def parse_morphism_expr(text: str, graph: DeviceGraph) -> PremonoidalMorphism:
    return _ExprParser(text, graph).parse()


# ---------------------------------------------------------------------------
# Subcommands


def _read_graph(path: str) -> GraphFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_file(fh.read())


def _pool_arg(spec: str) -> list[Word]:
    return [Word(*part.split()) for part in spec.split(",")]


def _word_args(alphabet: list[str], raw: str) -> list[str]:
    if all(len(a) == 1 for a in alphabet):
        return list(raw)
    return [tok for tok in raw.split(",") if tok]


def _dep_arg(alphabet: list[str], spec: str) -> DependencyRelation:
    pairs = set()
    if spec.strip():
        for chunk in spec.split(";"):
            parts = chunk.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ParseError(0, f"dependent pair must have two symbols: {chunk!r}")
            pairs.add((parts[0], parts[1]))
    return DependencyRelation(frozenset(alphabet), frozenset(pairs))


def _format_nf(m: PremonoidalMorphism) -> str:
    cf = canonical_form(m)
    lines = []
    for li, layer_events in enumerate(cf.layers()):
        if li:
            lines.append("--")
        for e in layer_events:
            entry = f"{e.gen} [{e.left} | {e.right}]"
            devs = sorted(m.graph.devices_of(e.gen))
            if devs:
                entry += " @ " + " ".join(devs)
            lines.append(entry)
    return "\n".join(lines)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="restrace", description="resourceful trace toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="validate a graph file")
    sp.add_argument("file")

    sp = sub.add_parser("nf", help="print the canonical form of an expression")
    sp.add_argument("file")
    sp.add_argument("-e", "--expr", required=True)

    sp = sub.add_parser("eq", help="decide equality of two expressions (exit 0/1)")
    sp.add_argument("file")
    sp.add_argument("-e", "--expr", action="append", required=True)

    sp = sub.add_parser("devices", help="print the devices used by an expression")
    sp.add_argument("file")
    sp.add_argument("-e", "--expr", required=True)

    sp = sub.add_parser("interfere", help="exit 0 if the two interchange, 1 if they interfere")
    sp.add_argument("file")
    sp.add_argument("-e", "--expr", action="append", required=True)

    sp = sub.add_parser("cliques", help="bounded underlying device graph report")
    sp.add_argument("file")
    sp.add_argument("--max-events", type=int, default=2)
    sp.add_argument("--pool", default="")
    sp.add_argument("--cap", type=int, default=100_000)

    sp = sub.add_parser("tensor", help="commuting tensor product of two graph files")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("-o", "--output", required=True)

    sp = sub.add_parser("trace-eq", help="trace monoid word equality (exit 0/1)")
    sp.add_argument("--alphabet", required=True)
    sp.add_argument("--dep", default="")
    sp.add_argument("word1")
    sp.add_argument("word2")

    sp = sub.add_parser("dist", help="distribution induced by a dependency relation")
    sp.add_argument("--alphabet", required=True)
    sp.add_argument("--dep", default="")

    sp = sub.add_parser("render", help="render an expression to SVG (or text)")
    sp.add_argument("file")
    sp.add_argument("-e", "--expr", required=True)
    sp.add_argument("-o", "--output")
    sp.add_argument("--text", action="store_true")

    return p


def _run(args: argparse.Namespace) -> int:
    if args.command == "check":
        try:
            _read_graph(args.file)
        except ParseError as e:
            violations = getattr(e, "violations", None)
            if violations is None:
                raise
            for v in violations:
                print(v)
            return 1
        print("ok")
        return 0

    if args.command == "nf":
        gf = _read_graph(args.file)
        m = parse_morphism_expr(args.expr, gf.device_graph)
        out = _format_nf(m)
        if out:
            print(out)
        return 0

    if args.command == "eq":
        if len(args.expr) != 2:
            raise ParseError(0, "eq needs exactly two -e expressions")
        gf = _read_graph(args.file)
        m1 = parse_morphism_expr(args.expr[0], gf.device_graph)
        m2 = parse_morphism_expr(args.expr[1], gf.device_graph)
        equal = morphisms_equal(m1, m2)
        print("equal" if equal else "unequal")
        return 0 if equal else 1

    if args.command == "devices":
        gf = _read_graph(args.file)
        m = parse_morphism_expr(args.expr, gf.device_graph)
        print(" ".join(sorted(devices_of(m))))
        return 0

    if args.command == "interfere":
        if len(args.expr) != 2:
            raise ParseError(0, "interfere needs exactly two -e expressions")
        gf = _read_graph(args.file)
        m1 = parse_morphism_expr(args.expr[0], gf.device_graph)
        m2 = parse_morphism_expr(args.expr[1], gf.device_graph)
        ok = interchange_holds(m1, m2)
        print("interchange" if ok else "interfere")
        return 0 if ok else 1

    if args.command == "cliques":
        gf = _read_graph(args.file)
        pool = _pool_arg(args.pool) if args.pool else [EMPTY]
        bounded = underlying_device_graph_bounded(
            gf.device_graph, args.max_events, pool, args.cap
        )
        for h in bounded.handles:
            m = bounded.morphisms[h]
            print(f"gen {h} : {m.source} -> {m.target} = {expr_string(m)}")
        for name in sorted(bounded.device_graph.devices):
            members = sorted(
                h for h in bounded.handles if name in bounded.device_graph.devices_of(h)
            )
            print(f"device {name} : {' '.join(members)}")
        return 0

    if args.command == "tensor":
        gf1 = _read_graph(args.file1)
        gf2 = _read_graph(args.file2)
        result = commuting_tensor(gf1.effectful, gf2.effectful)
        text = format_graph_file(GraphFile(result.product, True))
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        return 0

    if args.command == "trace-eq":
        alphabet = [a for a in args.alphabet.split(",") if a]
        dep = _dep_arg(alphabet, args.dep)
        w1 = _word_args(alphabet, args.word1)
        w2 = _word_args(alphabet, args.word2)
        equal = trace_equal(dep, w1, w2)
        print("equal" if equal else "unequal")
        return 0 if equal else 1

    if args.command == "dist":
        alphabet = [a for a in args.alphabet.split(",") if a]
        dep = _dep_arg(alphabet, args.dep)
        dist = dependency_to_distribution(dep)
        for sym in sorted(dist.underlying.generators):
            devs = sorted(dist.devices_of(sym))
            print(f"{sym}: {' '.join(devs) if devs else '-'}")
        return 0

    if args.command == "render":
        gf = _read_graph(args.file)
        m = parse_morphism_expr(args.expr, gf.device_graph)
        lay = layout(m)
        if args.text:
            text = render_text(lay)
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                print(text, end="")
        else:
            if not args.output:
                raise ParseError(0, "render needs -o OUTPUT for SVG")
            data = render_svg(lay)
            with open(args.output, "wb") as fh:
                fh.write(data)
        return 0

    raise ParseError(0, f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (ParseError, GraphError, BoundaryMismatch, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
