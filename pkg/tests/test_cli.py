import pytest

from restrace.cli import (
    GraphFile,
    ParseError,
    format_graph_file,
    main,
    parse_graph_file,
    parse_morphism_expr,
)
from restrace.graphs import Word
from restrace.freecat import devices_of, morphisms_equal
from util import W, printer_theory

PRINTER = """\
# theory of a printer
objects Doc
devices p
pure doc : -> Doc
gen print : Doc -> @ p
"""


@pytest.fixture
def printer_file(tmp_path):
    path = tmp_path / "printer.graph"
    path.write_text(PRINTER, encoding="utf-8")
    return str(path)


def test_parse_printer_matches_builder():
    gf = parse_graph_file(PRINTER)
    assert gf.has_pure
    assert gf.effectful == printer_theory()


def test_parse_empty_file_ok():
    gf = parse_graph_file("")
    assert not gf.has_pure
    assert not gf.device_graph.objects


def test_parse_unknown_object_rejected():
    with pytest.raises(ParseError) as e:
        parse_graph_file("objects Doc\ngen f : Doc -> X\n")
    assert "unknown object" in str(e.value)


def test_parse_duplicate_generator_rejected():
    with pytest.raises(ParseError) as e:
        parse_graph_file("objects A\ngen f : A -> A\ngen f : -> A\n")
    assert e.value.line == 3


def test_parse_missing_arrow():
    with pytest.raises(ParseError):
        parse_graph_file("objects A\ngen f : A A\n")


def test_format_roundtrip():
    gf = parse_graph_file(PRINTER)
    text = format_graph_file(gf)
    again = parse_graph_file(text)
    assert again.effectful == gf.effectful
    assert format_graph_file(again) == text


def test_expr_identity():
    gf = parse_graph_file(PRINTER)
    m = parse_morphism_expr("id(Doc)", gf.device_graph)
    assert m.source == m.target == W("Doc") and not m.events


def test_expr_empty_identity():
    gf = parse_graph_file(PRINTER)
    m = parse_morphism_expr("id()", gf.device_graph)
    assert m.source == W()


def test_expr_composite():
    gf = parse_graph_file(PRINTER)
    m = parse_morphism_expr("print[ | Doc] ; print[ | ]", gf.device_graph)
    assert m.source == W("Doc", "Doc") and m.target == W()
    assert [e.gen for e in m.events] == ["print", "print"]


def test_expr_fresh_document_run():
    gf = parse_graph_file(PRINTER)
    m = parse_morphism_expr("doc[ | ] ; print[ | ]", gf.device_graph)
    assert m.source == W() and m.target == W()


def test_expr_parens_and_assoc():
    gf = parse_graph_file(PRINTER)
    a = parse_morphism_expr("(doc[ | ] ; print[ | ]) ; doc[ | ]", gf.device_graph)
    b = parse_morphism_expr("doc[ | ] ; (print[ | ] ; doc[ | ])", gf.device_graph)
    assert a == b


def test_expr_boundary_error_reports_positions():
    gf = parse_graph_file(PRINTER)
    with pytest.raises(ParseError) as e:
        parse_morphism_expr("doc[ | ] ; doc[ | ] ; print[ | ]", gf.device_graph)
    assert "boundary mismatch" in str(e.value)


def test_expr_unknown_generator():
    gf = parse_graph_file(PRINTER)
    with pytest.raises(ParseError):
        parse_morphism_expr("scan[ | ]", gf.device_graph)


def test_cli_check_ok(printer_file, capsys):
    assert main(["check", printer_file]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_cli_check_invalid(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("objects A\ngen f : A -> X\n", encoding="utf-8")
    assert main(["check", str(bad)]) == 1
    assert "unknown object" in capsys.readouterr().out


def test_cli_check_parse_error(tmp_path):
    bad = tmp_path / "bad.graph"
    bad.write_text("widgets A\n", encoding="utf-8")
    assert main(["check", str(bad)]) == 2


def test_cli_eq_exit_codes(printer_file):
    same = ["eq", printer_file, "-e", "print[ | Doc] ; print[ | ]", "-e", "print[ | Doc] ; print[ | ]"]
    diff = ["eq", printer_file, "-e", "print[ | Doc] ; print[ | ]", "-e", "print[Doc | ] ; print[ | ]"]
    assert main(same) == 0
    assert main(diff) == 1


def test_cli_nf_layers(printer_file, capsys):
    assert main(["nf", printer_file, "-e", "print[ | Doc] ; print[ | ]"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["print [ | Doc] @ p", "--", "print [ | ] @ p"]


def test_cli_devices(printer_file, capsys):
    assert main(["devices", printer_file, "-e", "doc[ | ] ; print[ | ]"]) == 0
    assert capsys.readouterr().out.strip() == "p"


def test_cli_interfere(printer_file):
    assert main(["interfere", printer_file, "-e", "print[ | ]", "-e", "print[ | ]"]) == 1
    assert main(["interfere", printer_file, "-e", "doc[ | ]", "-e", "print[ | ]"]) == 0


def test_cli_cliques_report(printer_file, capsys):
    assert main(["cliques", printer_file, "--max-events", "2", "--pool", ",Doc,Doc Doc"]) == 0
    out = capsys.readouterr().out
    assert "gen m0" in out and "device " in out


def test_cli_tensor_roundtrip(printer_file, tmp_path, capsys):
    out_path = tmp_path / "two.graph"
    assert main(["tensor", printer_file, printer_file, "-o", str(out_path)]) == 0
    text = out_path.read_text(encoding="utf-8")
    gf = parse_graph_file(text)
    assert sorted(gf.device_graph.underlying.generators) == ["doc", "l·print", "r·print"]
    assert format_graph_file(gf) == text
    # the headline check: the two printers commute, one printer does not
    assert (
        main(["eq", str(out_path), "-e", "l·print[ | Doc] ; r·print[ | ]", "-e", "r·print[Doc | ] ; l·print[ | ]"])
        == 0
    )


def test_cli_trace_eq(capsys):
    args = ["trace-eq", "--alphabet", "α,β,γ,δ", "--dep", "α β; β δ"]
    assert main(args + ["γαβαδ", "αβγδα"]) == 0
    assert main(args + ["αβ", "βα"]) == 1


def test_cli_trace_eq_multichar_symbols():
    args = ["trace-eq", "--alphabet", "get,put", "--dep", "get put"]
    assert main(args + ["get,put", "put,get"]) == 1
    assert main(args + ["get,put", "get,put"]) == 0


def test_cli_dist_table(capsys):
    assert main(["dist", "--alphabet", "α,β,γ,δ", "--dep", "α β; β δ"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "γ: -" in out
    assert "β: α+β β+δ" in out


def test_cli_render_svg_and_text(printer_file, tmp_path, capsys):
    svg_path = tmp_path / "out.svg"
    assert main(["render", printer_file, "-e", "print[ | Doc] ; print[ | ]", "-o", str(svg_path)]) == 0
    data = svg_path.read_bytes()
    assert data.startswith(b"<?xml") and b"</svg>" in data
    assert main(["render", printer_file, "-e", "id(Doc)", "--text"]) == 0
    assert "Doc" in capsys.readouterr().out


def test_cli_error_exit_2(tmp_path, capsys):
    missing = str(tmp_path / "nope.graph")
    assert main(["check", missing]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_determinism(printer_file, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    expr = "doc[ | ] ; print[ | ]"
    main(["render", printer_file, "-e", expr, "-o", str(a)])
    main(["render", printer_file, "-e", expr, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()
