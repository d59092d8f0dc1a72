"""The phase-pair interface condition table.

Every unordered pair of distinct phases maps to exactly one behavior:

==================  =====================================================
CONTINUOUS          same-material flux, no interface term
BV_GRAPHITE         Butler-Volmer intercalation (graphite | electrolyte)
EXCHANGE_COUNTER    exchange current (electrolyte | lithium foil)
STRIPPING           plating/stripping kinetics (electrolyte | plated Li)
BLOCKING            no ion flux, no current (electrolyte | collector)
CONDUCTOR_CONTACT   no ion flux, continuous electron current (solid | solid)
FORBIDDEN           pair never shares a face in a valid geometry
==================  =====================================================

The electrolyte|collector row is treated as fully blocking (N = 0, j = 0);
a unit ion flux into a blocking collector would be physically inconsistent.
"""

from __future__ import annotations

from enum import Enum

from ..errors import ModelError
from ..microgen.phases import Phase


class InterfaceKind(Enum):
    CONTINUOUS = "continuous"
    BV_GRAPHITE = "bv_graphite"
    EXCHANGE_COUNTER = "exchange_counter"
    STRIPPING = "stripping"
    BLOCKING = "blocking"
    CONDUCTOR_CONTACT = "conductor_contact"
    FORBIDDEN = "forbidden"


_P = Phase
_TABLE: dict[frozenset, InterfaceKind] = {}


def _put(a: Phase, b: Phase, kind: InterfaceKind):
    _TABLE[frozenset((a, b))] = kind


_put(_P.GRAPHITE, _P.ELECTROLYTE, InterfaceKind.BV_GRAPHITE)
_put(_P.ELECTROLYTE, _P.LI_FOIL, InterfaceKind.EXCHANGE_COUNTER)
_put(_P.ELECTROLYTE, _P.PLATED_LI, InterfaceKind.STRIPPING)
_put(_P.ELECTROLYTE, _P.COLLECTOR_WORKING, InterfaceKind.BLOCKING)
_put(_P.ELECTROLYTE, _P.COLLECTOR_COUNTER, InterfaceKind.BLOCKING)
_put(_P.GRAPHITE, _P.PLATED_LI, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.GRAPHITE, _P.COLLECTOR_WORKING, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.GRAPHITE, _P.COLLECTOR_COUNTER, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.LI_FOIL, _P.COLLECTOR_WORKING, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.LI_FOIL, _P.COLLECTOR_COUNTER, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.PLATED_LI, _P.COLLECTOR_WORKING, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.PLATED_LI, _P.COLLECTOR_COUNTER, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.COLLECTOR_WORKING, _P.COLLECTOR_COUNTER, InterfaceKind.CONDUCTOR_CONTACT)
_put(_P.GRAPHITE, _P.LI_FOIL, InterfaceKind.FORBIDDEN)
_put(_P.PLATED_LI, _P.LI_FOIL, InterfaceKind.FORBIDDEN)


def interface_kind(phase_a: Phase, phase_b: Phase) -> InterfaceKind:
    """Interface behavior of an unordered phase pair (symmetric, total)."""
    if phase_a == phase_b:
        return InterfaceKind.CONTINUOUS
    return _TABLE[frozenset((Phase(phase_a), Phase(phase_b)))]


def require_face_kind(phase_a: Phase, phase_b: Phase) -> InterfaceKind:
    """Like :func:`interface_kind` but rejects pairs that must never share a face."""
    kind = interface_kind(phase_a, phase_b)
    if kind is InterfaceKind.FORBIDDEN:
        raise ModelError(
            f"{Phase(phase_a).name} and {Phase(phase_b).name} voxels share a face; "
            "this adjacency is geometrically forbidden")
    return kind
