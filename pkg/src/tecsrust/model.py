"""Abstract syntax for the supported CDL subset and the resolved component graph.

Pure value types: no I/O, no mutation after construction. Source locations
are carried for diagnostics but excluded from equality so that a rendered
and re-parsed unit compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


KNOWN_PLUGINS = ("RustGenPlugin", "ItronrsGenPlugin")


@dataclass(frozen=True)
class SourceLoc:
    file: str = "<unknown>"
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: SourceLoc

    def __str__(self) -> str:
        return f"{self.location}: {self.severity.value}[{self.code}]: {self.message}"


def error(code: str, message: str, location: SourceLoc) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, location)


def warning(code: str, message: str, location: SourceLoc) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, location)


def has_errors(diags) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


class ParamSpecifier(Enum):
    IN = "in"
    OUT = "out"


class InitKind(Enum):
    C_EXP = "C_EXP"
    LITERAL = "literal"


@dataclass(frozen=True)
class Initializer:
    kind: InitKind
    text: str


@dataclass(frozen=True)
class ParamDecl:
    specifier: ParamSpecifier
    c_type: str
    pointer_depth: int
    name: str
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    return_type: str
    params: tuple
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class SignatureDef:
    name: str
    functions: tuple
    location: SourceLoc = field(default=SourceLoc(), compare=False)


class PortDirection(Enum):
    CALL = "call"
    ENTRY = "entry"


@dataclass(frozen=True)
class PortDecl:
    direction: PortDirection
    signature_name: str
    port_name: str
    modifiers: frozenset = frozenset()
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class AttrDecl:
    name: str
    c_type: str
    default: Optional[Initializer] = None
    omit: bool = False
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class VarDecl:
    name: str
    type_text: str
    default: Optional[Initializer] = None
    location: SourceLoc = field(default=SourceLoc(), compare=False)


class FactoryScope(Enum):
    PER_CELL = "factory"
    PER_CELLTYPE = "FACTORY"


@dataclass(frozen=True)
class FactoryWrite:
    target_file: str
    template: str
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class FactoryBlock:
    scope: FactoryScope
    writes: tuple


@dataclass(frozen=True)
class PluginDirective:
    plugin_name: str
    argument: str
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class CelltypeDef:
    name: str
    call_ports: tuple = ()
    entry_ports: tuple = ()
    attrs: tuple = ()
    vars: tuple = ()
    factory_blocks: tuple = ()
    generate_directive: Optional[PluginDirective] = None
    location: SourceLoc = field(default=SourceLoc(), compare=False)

    @property
    def ports(self):
        return self.call_ports + self.entry_ports


@dataclass(frozen=True)
class Binding:
    call_port_name: str
    target_cell_name: str
    target_entry_port_name: str
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class AttrInit:
    attr_name: str
    value: Initializer
    location: SourceLoc = field(default=SourceLoc(), compare=False)


@dataclass(frozen=True)
class CellDef:
    name: str
    celltype_name: str
    bindings: tuple = ()
    attr_inits: tuple = ()
    generate_directive: Optional[PluginDirective] = None
    location: SourceLoc = field(default=SourceLoc(), compare=False)

    def binding_for(self, call_port_name: str) -> Optional[Binding]:
        for b in self.bindings:
            if b.call_port_name == call_port_name:
                return b
        return None

    def init_for(self, attr_name: str) -> Optional[Initializer]:
        for init in self.attr_inits:
            if init.attr_name == attr_name:
                return init.value
        return None


@dataclass(frozen=True)
class CdlUnit:
    source_name: str = "<memory>"
    signatures: tuple = ()
    celltypes: tuple = ()
    cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "signatures", tuple(self.signatures))
        object.__setattr__(self, "celltypes", tuple(self.celltypes))
        object.__setattr__(self, "cells", tuple(self.cells))

    def __eq__(self, other):
        if not isinstance(other, CdlUnit):
            return NotImplemented
        # source_name is provenance, not content
        return (
            self.signatures == other.signatures
            and self.celltypes == other.celltypes
            and self.cells == other.cells
        )

    def __hash__(self):
        return hash((self.signatures, self.celltypes, self.cells))


def _dupes(names):
    seen = set()
    out = []
    for n in names:
        if n in seen:
            out.append(n)
        seen.add(n)
    return out


def _balanced_holes(text: str) -> bool:
    return text.count("$") % 2 == 0


def validate_unit(unit: CdlUnit) -> list:
    """Check structural rules on a parsed unit.

    Returns all violations found; an empty list means the unit is
    model-valid and safe to hand to the linker.
    """
    diags = []

    for sig in unit.signatures:
        if not sig.name:
            diags.append(error("empty-name", "signature has empty name", sig.location))
        for fn in _dupes(f.name for f in sig.functions):
            diags.append(error(
                "duplicate-function",
                f"function '{fn}' defined more than once in signature '{sig.name}'",
                sig.location))
        for f in sig.functions:
            for pn in _dupes(p.name for p in f.params):
                diags.append(error(
                    "duplicate-param",
                    f"parameter '{pn}' repeated in function '{f.name}'",
                    f.location))
            for p in f.params:
                if p.specifier is ParamSpecifier.OUT and p.pointer_depth < 1:
                    diags.append(error(
                        "out-requires-pointer",
                        f"[out] parameter '{p.name}' of '{f.name}' must be a pointer",
                        p.location))
                if p.pointer_depth > 1:
                    diags.append(error(
                        "pointer-depth",
                        f"parameter '{p.name}' uses more than one '*'",
                        p.location))

    for ct in unit.celltypes:
        for pn in _dupes(p.port_name for p in ct.ports):
            diags.append(error(
                "duplicate-port",
                f"port '{pn}' declared more than once in celltype '{ct.name}'",
                ct.location))
        for an in _dupes(a.name for a in ct.attrs):
            diags.append(error(
                "duplicate-attr",
                f"attr '{an}' declared more than once in celltype '{ct.name}'",
                ct.location))
        for vn in _dupes(v.name for v in ct.vars):
            diags.append(error(
                "duplicate-var",
                f"var '{vn}' declared more than once in celltype '{ct.name}'",
                ct.location))
        for a in ct.attrs:
            if a.default is not None and not _balanced_holes(a.default.text):
                diags.append(error(
                    "unbalanced-macro",
                    f"unbalanced '$' holes in default of attr '{a.name}'",
                    a.location))
        for block in ct.factory_blocks:
            for w in block.writes:
                if not w.target_file:
                    diags.append(error(
                        "empty-write-target",
                        "factory write has an empty target file", w.location))
                if not _balanced_holes(w.template):
                    diags.append(error(
                        "unbalanced-macro",
                        f"unbalanced '$' holes in write to '{w.target_file}'",
                        w.location))
        _check_directive(ct.generate_directive, diags)

    for cell in unit.cells:
        for bn in _dupes(b.call_port_name for b in cell.bindings):
            diags.append(error(
                "duplicate-binding",
                f"call port '{bn}' bound more than once in cell '{cell.name}'",
                cell.location))
        for an in _dupes(i.attr_name for i in cell.attr_inits):
            diags.append(error(
                "duplicate-attr-init",
                f"attr '{an}' initialized more than once in cell '{cell.name}'",
                cell.location))
        for init in cell.attr_inits:
            if not _balanced_holes(init.value.text):
                diags.append(error(
                    "unbalanced-macro",
                    f"unbalanced '$' holes in initializer of '{init.attr_name}'",
                    init.location))
        _check_directive(cell.generate_directive, diags)

    return diags


def _check_directive(directive, diags):
    if directive is not None and directive.plugin_name not in KNOWN_PLUGINS:
        diags.append(error(
            "unknown-plugin",
            f"unknown plugin '{directive.plugin_name}'",
            directive.location))
