import numpy as np
import pytest

from p1n.fw import (energy_sign_matrix, fw_angle, fw_apply, fw_spin_residuals, fw_split_kdp,
                    fw_unitary, fw_unitary_axis)
from p1n.kdp import build_beta15, build_beta6
from p1n.linalg import max_abs


def _momenta(count, kappa, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = rng.normal(size=4)
        out.append(d / np.linalg.norm(d) * rng.uniform(0, 10 * kappa))
    return out


@pytest.mark.parametrize("family", ["dirac4", "dirac8", "dirac18b"])
def test_dirac_diagonalization(family):
    kappa = 1.3
    for p in _momenta(100, kappa, seed=11):
        r = fw_apply(family, p, kappa)
        assert r.unitarity <= 1e-12
        assert r.residual <= 1e-10
        assert r.passed


def test_dirac8_matches_oracle():
    r = fw_apply("dirac8", (1, 2, 0, -1), 2.0)
    assert r.energy == pytest.approx(3.1622776601683795, abs=1e-15)
    assert r.residual < 1e-12
    assert np.array_equal(r.B, np.diag([1.0] * 4 + [-1.0] * 4))


def test_b_per_family():
    assert np.array_equal(energy_sign_matrix("dirac4"), np.diag([1.0, 1, -1, -1]))
    assert np.array_equal(energy_sign_matrix("dirac18b"), np.diag([-1.0, -1, 1, 1]))


def test_unitary_is_identity_at_rest():
    for family in ("dirac4", "dirac8", "kdp6", "kdp15"):
        U = fw_unitary(family, (0, 0, 0, 0), 1.0).U
        assert np.array_equal(U, np.eye(U.shape[0]))


def test_group_property_along_one_axis():
    n = (0.3, -1.0, 0.2, 0.5)
    a = fw_unitary_axis("dirac8", n, 0.4)
    b = fw_unitary_axis("dirac8", n, 0.7)
    assert max_abs(a @ b - fw_unitary_axis("dirac8", n, 1.1)) < 1e-13


def test_angle_sign_for_second_equation():
    assert fw_angle((3, 0, 0, 0), 3.0) == pytest.approx(np.pi / 4)
    assert fw_angle((3, 0, 0, 0), 3.0, "dirac18b") == pytest.approx(-np.pi / 4)


def test_spin_commutes_after_transformation():
    r = fw_apply("dirac4", (0.5, -0.2, 1.0, 0.7), 1.0)
    assert fw_spin_residuals(r) < 1e-12


def test_kdp_literal_exponent_does_not_decouple():
    split = fw_split_kdp(build_beta15(), (1, 0.5, -0.3, 2), 1.2, form="literal")
    assert split.coupling_residual == pytest.approx(2.25, abs=0.05)
    assert not split.passed


@pytest.mark.parametrize("build", [build_beta6, build_beta15])
def test_kdp_corrected_exponent_decouples(build):
    for p in _momenta(20, 1.2, seed=5):
        split = fw_split_kdp(build(), p, 1.2, form="corrected")
        assert split.coupling_residual < 1e-12
        assert split.principal_residual < 1e-12
        assert split.passed


def test_fw_input_validation():
    with pytest.raises(ValueError):
        fw_unitary("dirac4", (1, 0, 0), 1.0)
    with pytest.raises(ValueError):
        fw_unitary("dirac4", (1, 0, 0, 0), 0.0)
    with pytest.raises(KeyError):
        fw_unitary("dirac5", (1, 0, 0, 0), 1.0)
    with pytest.raises(ValueError):
        fw_apply("kdp6", (1, 0, 0, 0), 1.0, form="other")
