from itertools import combinations

import pytest

from halfcell import ModelError
from halfcell.echem import InterfaceKind, interface_kind, require_face_kind
from halfcell.microgen import Phase


def test_table_entries():
    assert interface_kind(Phase.GRAPHITE, Phase.ELECTROLYTE) is InterfaceKind.BV_GRAPHITE
    assert interface_kind(Phase.ELECTROLYTE, Phase.LI_FOIL) is InterfaceKind.EXCHANGE_COUNTER
    assert interface_kind(Phase.ELECTROLYTE, Phase.PLATED_LI) is InterfaceKind.STRIPPING
    assert interface_kind(Phase.ELECTROLYTE, Phase.COLLECTOR_WORKING) is InterfaceKind.BLOCKING
    assert interface_kind(Phase.ELECTROLYTE, Phase.COLLECTOR_COUNTER) is InterfaceKind.BLOCKING
    assert interface_kind(Phase.PLATED_LI, Phase.GRAPHITE) is InterfaceKind.CONDUCTOR_CONTACT
    assert interface_kind(Phase.GRAPHITE, Phase.COLLECTOR_WORKING) is InterfaceKind.CONDUCTOR_CONTACT
    assert interface_kind(Phase.LI_FOIL, Phase.COLLECTOR_COUNTER) is InterfaceKind.CONDUCTOR_CONTACT


def test_forbidden_pairs():
    assert interface_kind(Phase.GRAPHITE, Phase.LI_FOIL) is InterfaceKind.FORBIDDEN
    assert interface_kind(Phase.PLATED_LI, Phase.LI_FOIL) is InterfaceKind.FORBIDDEN
    with pytest.raises(ModelError):
        require_face_kind(Phase.GRAPHITE, Phase.LI_FOIL)
    with pytest.raises(ModelError):
        require_face_kind(Phase.LI_FOIL, Phase.PLATED_LI)


def test_total_and_symmetric():
    phases = list(Phase)
    for a, b in combinations(phases, 2):
        k1 = interface_kind(a, b)
        k2 = interface_kind(b, a)
        assert k1 is k2
        assert isinstance(k1, InterfaceKind)
    for a in phases:
        assert interface_kind(a, a) is InterfaceKind.CONTINUOUS
