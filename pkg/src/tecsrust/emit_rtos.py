"""RTOS glue: kernel-wrapper preamble, $macro$ substitution, factory writes."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .linker import EmissionPlan, ResolvedModel
from .model import CellDef, CelltypeDef, Diagnostic, SourceLoc, error

ITRONRS_PLUGIN = "ItronrsGenPlugin"

# Imports prepended to definition files that use the kernel wrapper types.
KERNEL_PREAMBLE_LINES = (
    "use crate::kernel_cfg::*;",
    "use itron::abi::*;",
    "use itron::TaskRef::*;",
)


def emit_preamble() -> str:
    return "\n".join(KERNEL_PREAMBLE_LINES) + "\n"


class MacroError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class MacroEnv:
    ct: str
    cell: Optional[str] = None
    attr_values: Dict[str, str] = field(default_factory=dict)

    def lookup(self, name: str) -> str:
        if name == "ct":
            return self.ct
        if name == "cell":
            if self.cell is None:
                raise MacroError("unresolved-macro",
                                 "$cell$ is not available outside a cell context")
            return self.cell
        if name in self.attr_values:
            return self.attr_values[name]
        raise MacroError("unresolved-macro", f"unresolved macro '${name}$'")


_HOLE = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)\$")


def substitute_macros(template: str, env: MacroEnv) -> str:
    """Fill $ct$ / $cell$ / $attr$ holes in a single pass.

    Substituted text is not rescanned; a residual '$' after the pass
    (unbalanced holes, or a hole whose value itself carries holes) is an
    error rather than silent passthrough.
    """
    if template.count("$") % 2 != 0:
        raise MacroError("unbalanced-macro", f"unbalanced '$' holes in {template!r}")
    rendered = _HOLE.sub(lambda m: env.lookup(m.group(1)), template)
    if "$" in rendered:
        raise MacroError("unresolved-macro",
                         f"residual '$' after substitution in {rendered!r}")
    return rendered


def build_env(ct: CelltypeDef, cell: Optional[CellDef]) -> MacroEnv:
    """Macro environment for one cell (or celltype scope when cell is None).

    Attr values are the raw initializer texts: the cell's initializer when
    present, else the celltype default. [omit] attrs participate; they
    exist to feed the factory even though they never reach emitted records.
    """
    values: Dict[str, str] = {}
    for attr in ct.attrs:
        init = cell.init_for(attr.name) if cell is not None else None
        if init is None:
            init = attr.default
        if init is not None:
            values[attr.name] = init.text
    return MacroEnv(ct.name, cell.name if cell is not None else None, values)


@dataclass(frozen=True)
class ConfigWrite:
    target_file: str
    rendered_line: str


def run_factory(model: ResolvedModel, plan: EmissionPlan
                ) -> tuple[List[ConfigWrite], List[Diagnostic]]:
    """Render every planned factory write in plan order.

    Writes aimed at the same target file stay in that order; the CLI joins
    them into one file per target.
    """
    writes: List[ConfigWrite] = []
    diags: List[Diagnostic] = []
    for pw in plan.config_writes:
        env = build_env(pw.celltype, pw.cell)
        try:
            target = substitute_macros(pw.target_template, env)
            line = substitute_macros(pw.line_template, env)
        except MacroError as exc:
            loc = pw.location if isinstance(pw.location, SourceLoc) else SourceLoc()
            diags.append(error(exc.code, str(exc), loc))
            continue
        writes.append(ConfigWrite(target, line))
    return writes, diags


def config_files(writes: List[ConfigWrite]) -> Dict[str, str]:
    """Group rendered lines into per-target file contents (append order kept)."""
    grouped: Dict[str, List[str]] = {}
    for w in writes:
        grouped.setdefault(w.target_file, []).append(w.rendered_line)
    return {target: "\n".join(lines) + "\n" for target, lines in grouped.items()}


def uses_kernel_wrappers(model: ResolvedModel, ct: CelltypeDef) -> bool:
    return model.plugin_by_celltype.get(ct.name) == ITRONRS_PLUGIN
