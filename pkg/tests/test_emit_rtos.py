import re

import pytest

from tecsrust.emit_rtos import (
    KERNEL_PREAMBLE_LINES, MacroEnv, MacroError, build_env, config_files,
    emit_preamble, run_factory, substitute_macros,
)
from tecsrust.frontend import parse_unit
from tecsrust.linker import plan_emission, resolve


def test_substitute_attr_macro():
    env = MacroEnv(ct="tTask_rs", cell="Task1", attr_values={"id": "1"})
    assert substitute_macros("TSKID_$id$", env) == "TSKID_1"


def test_substitute_ct_macro():
    env = MacroEnv(ct="tTask_rs")
    assert substitute_macros("$ct$_factory.h", env) == "tTask_rs_factory.h"


def test_substitute_without_holes():
    assert substitute_macros("no holes", MacroEnv(ct="tX")) == "no holes"


def test_unknown_macro_is_an_error():
    with pytest.raises(MacroError) as exc:
        substitute_macros("$nope$", MacroEnv(ct="tX"))
    assert exc.value.code == "unresolved-macro"
    assert "nope" in str(exc.value)


def test_unbalanced_holes_are_rejected():
    with pytest.raises(MacroError) as exc:
        substitute_macros("TSKID_$id", MacroEnv(ct="tX", attr_values={"id": "1"}))
    assert exc.value.code == "unbalanced-macro"


def test_single_pass_no_rescan():
    env = MacroEnv(ct="tX", attr_values={"a": "$b$", "b": "2"})
    with pytest.raises(MacroError):
        substitute_macros("$a$", env)  # residual hole is an error, not re-expanded


def test_cell_macro_outside_cell_context():
    with pytest.raises(MacroError):
        substitute_macros("$cell$", MacroEnv(ct="tX", cell=None))


def test_omit_attrs_feed_the_env(kernel_text):
    unit = parse_unit(kernel_text, "kernel_rs.cdl").unit
    ct = next(c for c in unit.celltypes if c.name == "tTask_rs")
    cell = next(c for c in unit.cells if c.name == "Task1")
    env = build_env(ct, cell)
    assert env.attr_values["id"] == "1"
    assert env.attr_values["priority"] == "MID_PRIORITY"


def test_preamble_lines(kernel_outputs):
    files, _, _ = kernel_outputs
    content = files["t_task_rs.rs"].content
    assert content.startswith(emit_preamble())
    assert content.count(KERNEL_PREAMBLE_LINES[0]) == 1


def test_preamble_absent_for_core_plugin(sample_outputs):
    files, _, _ = sample_outputs
    assert "itron" not in files["t_sensor.rs"].content


def test_factory_renders_static_api_line(kernel_outputs):
    files, _, _ = kernel_outputs
    cfg = files["tecsgen.cfg"].content
    lines = cfg.splitlines()
    assert lines[0] == '#include "tTask_rs_tecsgen.h"'
    assert lines[1].startswith("CRE_TSK(TSKID_1,")
    assert "$" not in cfg


def test_factory_header_write(kernel_outputs):
    files, _, _ = kernel_outputs
    assert files["tTask_rs_factory.h"].content == '#include "kernel_cfg.h"\n'


def test_no_factory_blocks_no_writes(sample_text):
    model, _ = resolve([parse_unit(sample_text, "sample.cdl").unit])
    writes, diags = run_factory(model, plan_emission(model))
    assert writes == [] and diags == []


def test_two_task_cells_in_declaration_order(kernel_text):
    text = kernel_text + """
[generate(ItronrsGenPlugin, "lib")]
cell tTask_rs Task2 {
    cTaskBody = MainBody.eBody;
    id = 2;
    attribute = C_EXP("TA_ACT");
    priority = C_EXP("LOW_PRIORITY");
    stackSize = C_EXP("STACK_SIZE");
};
"""
    model, diags = resolve([parse_unit(text, "kernel_rs.cdl").unit])
    assert not diags
    writes, w_diags = run_factory(model, plan_emission(model))
    assert not w_diags
    cre = [w.rendered_line for w in writes if w.rendered_line.startswith("CRE_TSK")]
    assert cre[0].startswith("CRE_TSK(TSKID_1,")
    assert cre[1].startswith("CRE_TSK(TSKID_2,")


def test_task_id_coherence(kernel_outputs):
    files, _, _ = kernel_outputs
    cfg_line = next(l for l in files["tecsgen.cfg"].content.splitlines()
                    if l.startswith("CRE_TSK"))
    cfg_id = re.search(r"CRE_TSK\((TSKID_\d+),", cfg_line).group(1)
    ref_line = next(l for l in files["t_task_rs.rs"].content.splitlines()
                    if "task_ref:" in l and "from_raw_nonnull" in l)
    ref_id = re.search(r"(TSKID_\d+)", ref_line).group(1)
    assert cfg_id == ref_id == "TSKID_1"


def test_config_files_group_in_order():
    from tecsrust.emit_rtos import ConfigWrite
    writes = [ConfigWrite("a.cfg", "one"), ConfigWrite("b.cfg", "x"),
              ConfigWrite("a.cfg", "two")]
    grouped = config_files(writes)
    assert grouped["a.cfg"] == "one\ntwo\n"
    assert grouped["b.cfg"] == "x\n"
