from pathlib import Path

from conftest import GOLDENS, golden
from tecsrust.cli import (
    EXIT_DIAGNOSTICS, EXIT_OK, EXIT_USAGE, emit_diagram, generate, report, run,
)
from tecsrust.frontend import parse_unit
from tecsrust.linker import resolve

SAMPLE = str(GOLDENS / "sample.cdl")

EXPECTED_SAMPLE_FILES = {
    "s_sensor.rs", "s_powerdown.rs", "t_sensor.rs", "t_powerdown.rs",
    "t_sensor_impl.rs", "t_powerdown_impl.rs",
}


def test_run_sample(tmp_path, capsys):
    assert run([SAMPLE, "--out", str(tmp_path / "gen")]) == EXIT_OK
    produced = {p.name for p in (tmp_path / "gen").iterdir()}
    assert produced == EXPECTED_SAMPLE_FILES


def test_no_inputs_is_a_usage_error(capsys):
    assert run([]) == EXIT_USAGE


def test_missing_input_file(tmp_path):
    assert run([str(tmp_path / "nope.cdl")]) == EXIT_USAGE


def test_skeleton_preserved_on_rerun(tmp_path):
    out = tmp_path / "gen"
    assert run([SAMPLE, "--out", str(out)]) == EXIT_OK
    impl = out / "t_sensor_impl.rs"
    edited = impl.read_text().replace(
        "let cell_ref = self.cell.get_cell_ref();",
        "let cell_ref = self.cell.get_cell_ref(); // my code", 1)
    impl.write_text(edited)
    contract = out / "s_sensor.rs"
    contract.write_text("clobber me\n")
    assert run([SAMPLE, "--out", str(out)]) == EXIT_OK
    assert impl.read_text() == edited
    assert contract.read_text() == golden("s_sensor.rs")


def test_errors_write_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.cdl"
    bad.write_text("""
signature sA { void f( void ); };
[generate(RustGenPlugin, "lib")]
celltype tC { call sA cA; };
[generate(RustGenPlugin, "lib")]
cell tC C {};
""")
    out = tmp_path / "gen"
    assert run([str(bad), "--out", str(out)]) == EXIT_DIAGNOSTICS
    assert not out.exists()
    err = capsys.readouterr().err
    assert "error[unbound-call-port]" in err
    assert "bad.cdl" in err


def test_diagnostic_line_format(tmp_path, capsys):
    bad = tmp_path / "bad.cdl"
    bad.write_text("signature sX { void f( [out] int32_t x ); };\n")
    assert run([str(bad), "--out", str(tmp_path / "gen")]) == EXIT_DIAGNOSTICS
    line = capsys.readouterr().err.splitlines()[0]
    path, lineno, col, rest = line.split(":", 3)
    assert path.endswith("bad.cdl")
    assert lineno.isdigit() and col.isdigit()
    assert rest.strip().startswith("error[")


def test_diagram_two_nodes_one_edge(sample_text):
    model, _ = resolve([parse_unit(sample_text, "sample.cdl").unit])
    dot = emit_diagram(model)
    assert dot.count("[label=") == 3  # 2 node labels + 1 edge label
    assert '"Sensor" [label="tSensor\\nSensor"];' in dot
    assert '"Sensor" -> "Powerdown" [label="sPowerdown"];' in dot


def test_diagram_empty_model():
    model, _ = resolve([])
    assert emit_diagram(model) == "digraph components {\n}\n"


def test_diagram_chain_is_deterministic():
    text = """
    signature sA { void f( void ); };
    celltype tEnd { entry sA eA; };
    celltype tMid { call sA cA; entry sA eA; };
    celltype tTop { call sA cA; };
    cell tEnd End {};
    cell tMid Mid { cA = End.eA; };
    cell tTop Top { cA = Mid.eA; };
    """
    unit = parse_unit(text, "chain.cdl").unit
    dots = [emit_diagram(resolve([unit])[0]) for _ in range(2)]
    assert dots[0] == dots[1]
    assert dots[0].count("->") == 2
    assert dots[0].count('[label="t') == 3


def test_diagram_flag_writes_dot(tmp_path):
    dot_path = tmp_path / "components.dot"
    assert run([SAMPLE, "--out", str(tmp_path / "gen"),
                "--diagram", str(dot_path)]) == EXIT_OK
    assert dot_path.read_text().startswith("digraph components {")


def test_report_totals(sample_text):
    files, plan, _, _ = generate([("sample.cdl", sample_text)])
    table = report(plan)
    rep = plan.report
    assert rep.auto_total + rep.skeleton_total == \
        sum(f.content.count("\n") for f in files)
    assert f"{rep.auto_total:>5}" in table
    for f in files:
        assert f.path in table


def test_report_counts_scale_with_methods(sample_text):
    base_files, _, _, _ = generate([("s.cdl", sample_text)])
    grown = sample_text.replace(
        "void light_off( void );",
        "void light_off( void );\n    void extra( void );")
    grown_files, _, _, _ = generate([("s.cdl", grown)])
    base = {f.path: f.content for f in base_files}
    new = {f.path: f.content for f in grown_files}
    # one method = one line in the contract, four lines in the skeleton stub
    assert new["s_sensor.rs"].count("\n") == base["s_sensor.rs"].count("\n") + 1
    assert new["t_sensor_impl.rs"].count("\n") == \
        base["t_sensor_impl.rs"].count("\n") + 4


def test_report_flag_prints_table(tmp_path, capsys):
    assert run([SAMPLE, "--out", str(tmp_path / "gen"), "--report"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "total auto-generated" in out
    assert "t_sensor.rs" in out


def test_bindgen_lite_subcommand(tmp_path, capsys):
    out = tmp_path / "kernel_cfg.rs"
    header = str(GOLDENS / "kernel_cfg.h")
    assert run(["bindgen-lite", header, "-o", str(out)]) == EXIT_OK
    assert out.read_text() == golden("kernel_cfg.rs")


def test_bindgen_lite_missing_header(tmp_path):
    assert run(["bindgen-lite", str(tmp_path / "nope.h"),
                "-o", str(tmp_path / "out.rs")]) == EXIT_USAGE
