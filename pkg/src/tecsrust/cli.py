"""Command-line driver: parse CDL inputs, resolve, emit files, report.

Exit codes: 0 success, 1 diagnostics, 2 usage or I/O failure. Any error
diagnostic suppresses all file writes.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import emit_core, emit_rtos, header_const
from .emit_core import EmissionError, GeneratedFile, WritePolicy
from .frontend import parse_unit
from .linker import EmissionPlan, GenerationReport, ResolvedModel, plan_emission, resolve
from .model import Diagnostic, KNOWN_PLUGINS, has_errors, validate_unit

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2


def generate(sources: List[Tuple[str, str]], default_plugin: Optional[str] = None
             ) -> Tuple[List[GeneratedFile], Optional[EmissionPlan],
                        Optional[ResolvedModel], List[Diagnostic]]:
    """Full pipeline over (source_name, text) pairs.

    Returns the rendered files, the plan (with report filled in), the
    resolved model, and all diagnostics. Files are empty whenever any
    error diagnostic occurred.
    """
    diags: List[Diagnostic] = []
    units = []
    for name, text in sources:
        result = parse_unit(text, name)
        diags.extend(result.diagnostics)
        if result.unit is not None:
            diags.extend(validate_unit(result.unit))
            units.append(result.unit)
    if has_errors(diags):
        return [], None, None, diags

    model, link_diags = resolve(units, default_plugin)
    diags.extend(link_diags)
    if model is None or has_errors(diags):
        return [], None, model, diags

    plan = plan_emission(model)
    files: List[GeneratedFile] = []

    for sig in plan.contract_sigs:
        files.append(emit_core.emit_contract(sig))
    for ct in plan.definition_cts:
        try:
            files.append(emit_core.emit_definition(ct, model.cells_of(ct.name), model))
        except EmissionError as exc:
            diags.append(exc.diagnostic)
    for ct in plan.skeleton_cts:
        try:
            files.append(emit_core.emit_skeleton(ct, model))
        except EmissionError as exc:
            diags.append(exc.diagnostic)

    config_writes, rtos_diags = emit_rtos.run_factory(model, plan)
    diags.extend(rtos_diags)
    for target, content in emit_rtos.config_files(config_writes).items():
        files.append(GeneratedFile(target, content, WritePolicy.OVERWRITE))

    if has_errors(diags):
        return [], plan, model, diags

    report = GenerationReport()
    skeleton_paths = set(plan.skeleton_files())
    for f in files:
        report.file_lines[f.path] = f.content.count("\n")
        if f.path in skeleton_paths:
            report.skeleton_files.add(f.path)
    plan.report = report
    return files, plan, model, diags


def write_files(files: List[GeneratedFile], out_dir: Path) -> List[str]:
    """Materialize rendered files, honoring each file's overwrite policy."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for f in files:
        path = out_dir / f.path
        if f.policy is WritePolicy.SKIP_IF_EXISTS and path.exists():
            continue
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f.content, encoding="utf-8", newline="\n")
        written.append(f.path)
    return written


def emit_diagram(model: ResolvedModel) -> str:
    """DOT digraph: one node per cell, one labeled edge per binding."""
    lines = ["digraph components {"]
    if model.cells:
        lines.append('  node [shape=box];')
    for rc in model.cells:
        label = f"{rc.celltype.name}\\n{rc.cell.name}"
        lines.append(f'  "{rc.cell.name}" [label="{label}"];')
    for rc in model.cells:
        for port in rc.celltype.call_ports:
            rb = rc.bindings.get(port.port_name)
            if rb is not None:
                lines.append(f'  "{rc.cell.name}" -> "{rb.target_cell.cell.name}" '
                             f'[label="{port.signature_name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def report(plan: EmissionPlan) -> str:
    """Fixed-width per-file line-count table plus the generated/stub totals."""
    rep = plan.report
    rows = [(path, rep.file_lines[path],
             "skeleton" if path in rep.skeleton_files else "generated")
            for path in sorted(rep.file_lines)]
    name_w = max([len("file")] + [len(r[0]) for r in rows])
    lines = [f"{'file':<{name_w}}  {'lines':>5}  kind",
             f"{'-' * name_w}  {'-' * 5}  {'-' * 9}"]
    for path, count, kind in rows:
        lines.append(f"{path:<{name_w}}  {count:>5}  {kind}")
    lines.append(f"{'-' * name_w}  {'-' * 5}  {'-' * 9}")
    lines.append(f"{'total auto-generated':<{name_w}}  {rep.auto_total:>5}")
    lines.append(f"{'total skeleton stubs':<{name_w}}  {rep.skeleton_total:>5}")
    return "\n".join(lines) + "\n"


def _print_diags(diags: List[Diagnostic], stream) -> None:
    for d in diags:
        print(d, file=stream)


def _run_bindgen_lite(argv: List[str]) -> int:
    parser = argparse.ArgumentParser(
        prog="tecsrust bindgen-lite",
        description="Convert integer #define macros in a kernel header to Rust constants.")
    parser.add_argument("header", help="kernel header file (e.g. kernel_cfg.h)")
    parser.add_argument("-o", "--output", required=True, help="output .rs file")
    args = parser.parse_args(argv)
    try:
        text = Path(args.header).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.header}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    converted, diags = header_const.convert_defines(text, args.header)
    _print_diags(diags, sys.stderr)
    try:
        Path(args.output).write_text(converted, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "bindgen-lite":
        return _run_bindgen_lite(argv[1:])

    parser = argparse.ArgumentParser(
        prog="tecsrust",
        description="Generate Rust component sources and RTOS configuration from CDL files.")
    parser.add_argument("inputs", nargs="+", help="input .cdl files")
    parser.add_argument("--plugin", choices=list(KNOWN_PLUGINS),
                        help="plugin applied to celltypes without a [generate(...)] directive")
    parser.add_argument("--out", default="gen", help="output directory (default: gen)")
    parser.add_argument("--diagram", help="also write a DOT component diagram to this path")
    parser.add_argument("--report", action="store_true",
                        help="print the per-file generation report")
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return EXIT_USAGE

    sources = []
    for name in args.inputs:
        try:
            sources.append((name, Path(name).read_text(encoding="utf-8")))
        except OSError as exc:
            print(f"error: cannot read {name}: {exc}", file=sys.stderr)
            return EXIT_USAGE

    files, plan, model, diags = generate(sources, args.plugin)
    _print_diags(diags, sys.stderr)
    if has_errors(diags):
        return EXIT_DIAGNOSTICS

    out_dir = Path(args.out)
    try:
        written = write_files(files, out_dir)
        if args.diagram and model is not None:
            Path(args.diagram).write_text(emit_diagram(model), encoding="utf-8",
                                          newline="\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.report and plan is not None:
        print(report(plan), end="")
    else:
        rep = plan.report if plan is not None else GenerationReport()
        print(f"generated {len(files)} files ({len(written)} written, "
              f"{rep.auto_total} generated lines, {rep.skeleton_total} stub lines) "
              f"under {out_dir}")
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
