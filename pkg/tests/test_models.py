import numpy as np
import pytest

from heckezeros.errors import ContractError, DomainError
from heckezeros.models import DerivativeJet, EigenformSpec, Rectangle


def test_rectangle_geometry() -> None:
    rect = Rectangle(0.0, 2.0, 10.0, 14.0)
    assert rect.center == 1.0 + 12.0j
    assert rect.diameter == pytest.approx(np.hypot(2.0, 4.0))
    assert rect.contains(2.0 + 14.0j)
    assert not rect.contains(1.0 + 9.9j)


def test_degenerate_rectangle() -> None:
    with pytest.raises(ContractError):
        Rectangle(1.0, 1.0, 0.0, 5.0)
    with pytest.raises(ContractError):
        Rectangle(0.0, 1.0, 5.0, 2.0)


def test_eigenform_spec() -> None:
    spec = EigenformSpec.from_weight(18)
    assert spec.sign == -1
    assert spec.center == 8.5
    assert spec.label == "1.18.a"
    with pytest.raises(DomainError):
        EigenformSpec.from_weight(14)
    with pytest.raises(ContractError):
        EigenformSpec(weight=12, label="1.12.a", sign=-1)


def test_jet_validation() -> None:
    with pytest.raises(ContractError):
        DerivativeJet(0.5 + 1j, 2, np.zeros(2, dtype=complex))
    with pytest.raises(DomainError):
        DerivativeJet(0.5 + 1j, 1, np.array([1.0, np.inf], dtype=complex))


def test_table_arrays_are_read_only(delta_table) -> None:
    with pytest.raises(ValueError):
        delta_table.lam[1] = 2.0
