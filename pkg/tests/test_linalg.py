import numpy as np
import pytest

from p1n.errors import ContractError, ShapeError
from p1n.exact import ExactMatrix
from p1n.linalg import (as_numeric, eigh, expm_antihermitian, hermiticity_defect,
                        max_abs, unitarity_defect)


def test_expm_of_pauli_matches_oracle():
    # oracle: expm(i pi sigma3 / 2) = diag(i, -i)
    s3 = np.diag([1.0, -1.0])
    u = expm_antihermitian(1j * np.pi / 2 * s3)
    assert max_abs(u - np.diag([1j, -1j])) < 1e-15
    assert unitarity_defect(u) < 1e-15


def test_expm_rejects_non_antihermitian():
    with pytest.raises(ContractError):
        expm_antihermitian(np.diag([1.0, 2.0]))


def test_eigh_is_deterministic_and_phased():
    a = np.kron(np.eye(2), np.array([[0, 1], [1, 0]], dtype=complex))
    w1, v1 = eigh(a)
    w2, v2 = eigh(a.copy())
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)
    for i in range(v1.shape[1]):
        lead = v1[np.flatnonzero(np.abs(v1[:, i]) > 1e-8)[0], i]
        assert abs(lead.imag) < 1e-15 and lead.real > 0
    assert max_abs(v1 @ np.diag(w1) @ v1.conj().T - a) < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ContractError):
        eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_as_numeric():
    assert as_numeric(ExactMatrix.identity(2)).dtype == complex
    with pytest.raises(ShapeError):
        as_numeric(np.zeros(3))
    with pytest.raises(ContractError):
        as_numeric(np.array([[np.nan]]))
    assert hermiticity_defect(np.array([[0, 1j], [1j, 0]])) == 2.0
