"""Transport coefficients, interface kinetics and the interface-condition table."""

from .interfaces import InterfaceKind, interface_kind, require_face_kind
from .kinetics import (
    bv_graphite,
    dmu_dc,
    exchange_counter,
    f_pre,
    f_pre_deriv,
    ocp,
    ocp_slope,
    stripping_current,
)
from .params import (
    DEFAULT_OCP_TABLE,
    FARADAY,
    GAS_CONSTANT,
    MaterialParams,
    PhysConstants,
    load_ocp_csv,
)

__all__ = [
    "InterfaceKind",
    "interface_kind",
    "require_face_kind",
    "bv_graphite",
    "dmu_dc",
    "exchange_counter",
    "f_pre",
    "f_pre_deriv",
    "ocp",
    "ocp_slope",
    "stripping_current",
    "DEFAULT_OCP_TABLE",
    "FARADAY",
    "GAS_CONSTANT",
    "MaterialParams",
    "PhysConstants",
    "load_ocp_csv",
]
