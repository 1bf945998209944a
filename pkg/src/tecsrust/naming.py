"""Identifier, type, and file-name mapping rules for the emitted Rust code.

All functions are pure and total except where noted; bad inputs raise
NamingError, which emitters turn into located diagnostics.
"""

from __future__ import annotations

import re

from .model import ParamSpecifier


class NamingError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# Fixed C -> Rust scalar table; unknown names pass through verbatim on the
# assumption that an external binding layer defines them.
SCALAR_TYPES = {
    "int8_t": "i8",
    "int16_t": "i16",
    "int32_t": "i32",
    "int64_t": "i64",
    "uint8_t": "u8",
    "uint16_t": "u16",
    "uint32_t": "u32",
    "uint64_t": "u64",
    "float": "f32",
    "double": "f64",
    "void": "()",
}


def _camel(name: str) -> str:
    parts = [p for p in name.split("_") if p]
    return "".join(p[0].upper() + p[1:] for p in parts)


def contract_name(signature_name: str) -> str:
    """sSensor -> SSensor, sTask_body -> STaskBody."""
    if len(signature_name) < 2:
        raise NamingError("bad-name", f"signature name '{signature_name}' too short")
    return _camel(signature_name)


def record_name(celltype_name: str) -> str:
    """tSensor -> TSensor, tTask_rs -> TTaskRs."""
    if len(celltype_name) < 2:
        raise NamingError("bad-name", f"celltype name '{celltype_name}' too short")
    return _camel(celltype_name)


def snake_case(name: str) -> str:
    s = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "_", name)
    s = re.sub(r"(?<=[A-Z])(?=[A-Z][a-z])", "_", s)
    s = re.sub(r"__+", "_", s)
    return s.lower()


def field_name(port_or_attr_name: str) -> str:
    """cPowerdown -> c_powerdown."""
    return snake_case(port_or_attr_name)


def entry_impl_name(entry_port: str, celltype: str) -> str:
    """(eSensor, tSensor) -> ESensorForTSensor."""
    return _camel(entry_port) + "For" + record_name(celltype)


def static_instance_name(cell_name: str) -> str:
    return cell_name.upper()


def static_var_name(cell_name: str) -> str:
    return cell_name.upper() + "VAR"


def static_entry_name(entry_port: str, cell_name: str) -> str:
    return entry_port.upper() + "FOR" + cell_name.upper()


def static_names(cell_name: str, entry_ports) -> tuple:
    instance = static_instance_name(cell_name)
    var_instance = static_var_name(cell_name)
    entries = [static_entry_name(p, cell_name) for p in entry_ports]
    return instance, var_instance, entries


_FILE_SUFFIX = {"contract": ".rs", "definition": ".rs", "skeleton": "_impl.rs"}


def file_name(kind: str, name: str) -> str:
    """(contract, sSensor) -> s_sensor.rs; (skeleton, tSensor) -> t_sensor_impl.rs."""
    return snake_case(name) + _FILE_SUFFIX[kind]


def module_name(name: str) -> str:
    return snake_case(name)


def map_base_type(c_type: str) -> str:
    return SCALAR_TYPES.get(c_type, c_type)


def map_param_type(c_type: str, pointer_depth: int, specifier: ParamSpecifier) -> str:
    """[in] T -> &T, [out] T* -> &mut T; one pointer level is consumed by the borrow."""
    base = map_base_type(c_type)
    if specifier is ParamSpecifier.OUT:
        return "&mut " + base
    return "&" + base


_REF_A_MUT = re.compile(r"^Ref_a_mut__(.+)__$")


def demangle_var_type(mangled: str) -> str:
    """Option_Ref_a_mut__pup_device_t__ -> Option<&'a mut pup_device_t>."""
    if mangled.startswith("Option_"):
        return "Option<" + demangle_var_type(mangled[len("Option_"):]) + ">"
    m = _REF_A_MUT.match(mangled)
    if m:
        return "&'a mut " + m.group(1)
    if "__" in mangled or mangled.startswith("Ref_"):
        raise NamingError("unrecognized-mangling",
                          f"cannot demangle var type '{mangled}'")
    return mangled
