import time
from fractions import Fraction

import numpy as np
import pytest

from p1n.classify import (EQUATIONS, EquationSpec, RepContent, classify, classify_dirac18b,
                          classify_kdp6, equation_spec, is_ptc_pattern, joint_eigenspaces,
                          snap_spin)
from p1n.errors import ClassificationError, ContractError, ShapeError

H = "1/2"

EXPECTED = {
    "dirac18a": RepContent.of([(1, H, 0), (-1, 0, H)]),
    "dirac18b": RepContent.of([(-1, H, 0), (1, 0, H)]),
    "dirac26": RepContent.of([(1, H, 0), (-1, H, 0), (1, 0, H), (-1, 0, H)]),
    "kdp6": RepContent.of([(1, 0, 0), (-1, 0, 0)], [(H, H)]),
    "kdp15": RepContent.of([(1, H, H), (-1, H, H)], [(1, 0), (0, 1), (0, 0)]),
}
PTC = {"dirac18a": False, "dirac18b": False, "dirac26": True, "kdp6": True, "kdp15": True}


@pytest.mark.parametrize("name", EQUATIONS)
def test_content(name):
    content = classify(equation_spec(name))
    assert content == EXPECTED[name]
    assert is_ptc_pattern(content) is PTC[name]
    assert content.dim == equation_spec(name).dim


def test_kdp15_principal_and_redundant_counts():
    content = classify(equation_spec("kdp15"))
    assert content.principal_dim == 8
    assert content.dim - content.principal_dim == 7


def test_content_strings():
    assert str(EXPECTED["dirac18a"]) == "D+(1/2,0) + D-(0,1/2)"
    assert str(EXPECTED["kdp6"]) == "D+(0,0) + D-(0,0) | redundant: D(1/2,1/2)"


def test_shortcuts_and_sign_flip():
    assert classify_dirac18b() == EXPECTED["dirac18b"]
    assert classify_kdp6() == EXPECTED["kdp6"]
    assert EXPECTED["dirac18a"].flipped() == EXPECTED["dirac18b"]


def test_json_roundtrip():
    for content in EXPECTED.values():
        assert RepContent.from_json(content.to_json()) == content


def test_kappa_independence():
    assert classify(equation_spec("kdp15", kappa=3.7)) == EXPECTED["kdp15"]


def test_snap_spin():
    assert snap_spin(0.75) == Fraction(1, 2)
    assert snap_spin(2.0) == Fraction(1)
    with pytest.raises(ClassificationError):
        snap_spin(1.3)
    with pytest.raises(ClassificationError):
        snap_spin(-0.5)


def test_non_commuting_family_rejected():
    spec = equation_spec("dirac18a")
    s1 = np.asarray(spec.S_ops[0].to_numpy())
    with pytest.raises(ContractError):
        EquationSpec("bad", lambda p: s1, spec.S_ops, spec.T_ops, spec.energy_sign_op)
    with pytest.raises(ShapeError):
        EquationSpec("bad", spec.H_at, spec.S_ops[:2], spec.T_ops, spec.energy_sign_op)


def test_joint_eigenspaces_dimensions():
    a = np.diag([1.0, 1.0, 2.0])
    b = np.diag([0.0, 1.0, 0.0])
    spaces = joint_eigenspaces([a, b])
    assert sorted(v for v, _ in spaces) == [(1.0, 0.0), (1.0, 1.0), (2.0, 0.0)]
    assert sum(basis.shape[1] for _, basis in spaces) == 3


def test_ptc_pattern_edge_cases():
    assert not is_ptc_pattern(RepContent(()))
    assert is_ptc_pattern(RepContent.of([(1, 1, 0), (-1, 1, 0), (1, 0, 1), (-1, 0, 1)]))
    assert not is_ptc_pattern(RepContent.of([(1, 1, 0), (-1, 1, 0), (1, 0, 1)]))


def test_classify_runtime():
    t = time.perf_counter()
    for name in EQUATIONS:
        classify(equation_spec(name))
    assert time.perf_counter() - t < 5.0
