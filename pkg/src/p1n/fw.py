"""Foldy-Wouthuysen type unitaries for the Dirac-type and KDP Hamiltonians.

Every unitary has the form ``U = exp(-i c A_k p_k / p * theta)`` with
``theta = arctan(p / kappa)``.  For the Dirac families ``A_k = i gamma_k`` and
``c = 1/2``, which takes ``H`` to ``B sqrt(p^2 + kappa^2)``.  For the KDP
families the literal choice ``A_k = beta_k``, ``c = 1/2`` (``form="literal"``)
does not decouple principal from redundant components; ``form="corrected"``
uses ``c = -1``, which does.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import equation_spec
from .clifford import build_gamma_5d, build_gamma_8d
from .kdp import BetaSet, build_beta15, build_beta6, kdp_hamiltonian
from .linalg import as_numeric, expm_antihermitian, max_abs, to_numeric, unitarity_defect

DIRAC_TOL = 1e-10
SPLIT_TOL = 1e-8

ALIASES = {"dirac4": "dirac18a", "dirac8": "dirac26"}
FAMILIES = ("dirac18a", "dirac18b", "dirac26", "kdp6", "kdp15")
FORMS = ("literal", "corrected")


def canonical_family(family: str) -> str:
    family = ALIASES.get(family, family)
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}")
    return family


def _generators(family: str) -> list[np.ndarray]:
    """The matrices ``A_k`` (k = 1..4) multiplying ``-i p_k / p`` in the exponent."""
    if family in ("dirac18a", "dirac18b"):
        g = build_gamma_5d()
        return [1j * to_numeric(g[k]) for k in range(1, 5)]
    if family == "dirac26":
        g = build_gamma_8d()
        return [1j * to_numeric(g[k]) for k in range(1, 5)]
    bset = build_beta6() if family == "kdp6" else build_beta15()
    return [to_numeric(bset[k]) for k in range(1, 5)]


def _coefficient(family: str, form: str) -> float:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    if family.startswith("kdp") and form == "corrected":
        return -1.0
    return 0.5


def energy_sign_matrix(family: str) -> np.ndarray:
    """``B`` of the diagonal form: ``beta``, ``-beta``, ``Gamma_0`` or ``beta_5``."""
    return as_numeric(equation_spec(canonical_family(family)).energy_sign_op)


def fw_angle(p, kappa: float, family: str = "dirac18a") -> float:
    """``arctan(p / kappa)``; the second Dirac equation carries ``-kappa``."""
    p = float(np.linalg.norm(np.asarray(p, dtype=float)))
    k = -kappa if canonical_family(family) == "dirac18b" else kappa
    return float(np.arctan(p / k))


@dataclass(frozen=True)
class FwUnitary:
    U: np.ndarray
    p: tuple
    kappa: float
    family: str
    form: str = "literal"

    @property
    def unitarity(self) -> float:
        return unitarity_defect(self.U)


def fw_unitary_axis(family: str, direction, angle: float, form: str = "literal") -> np.ndarray:
    """``exp(-i c A.n angle)`` for a unit direction ``n``; used for the group property."""
    family = canonical_family(family)
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    A = sum(a * nk for a, nk in zip(_generators(family), n))
    return expm_antihermitian(-1j * _coefficient(family, form) * angle * A, tol=1e-10)


def fw_unitary(family: str, p, kappa: float, form: str = "literal") -> FwUnitary:
    """The momentum-dependent unitary; exactly the identity at ``p = 0``."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    family = canonical_family(family)
    p = tuple(float(x) for x in p)
    if len(p) != 4:
        raise ValueError("momentum must have four components")
    dim = _generators(family)[0].shape[0]
    pn = float(np.linalg.norm(p))
    if pn == 0.0:
        return FwUnitary(np.eye(dim, dtype=complex), p, kappa, family, form)
    U = fw_unitary_axis(family, p, fw_angle(p, kappa, family), form)
    return FwUnitary(U, p, kappa, family, form)


def hamiltonian(family: str, p, kappa: float) -> np.ndarray:
    return np.asarray(equation_spec(canonical_family(family), kappa).H_at(np.asarray(p, float)))


@dataclass(frozen=True)
class FwResult:
    H_prime: np.ndarray
    B: np.ndarray
    energy: float
    residual: float
    unitarity: float
    family: str

    @property
    def passed(self) -> bool:
        return self.residual <= DIRAC_TOL and self.unitarity <= 1e-12


def fw_apply(family: str, p, kappa: float, form: str = "literal") -> FwResult:
    """``H' = U H(p) U^+`` and its distance from ``B sqrt(p^2 + kappa^2)``."""
    family = canonical_family(family)
    fu = fw_unitary(family, p, kappa, form)
    H = hamiltonian(family, p, kappa)
    Hp = fu.U @ H @ fu.U.conj().T
    B = energy_sign_matrix(family)
    E = float(np.sqrt(np.dot(fu.p, fu.p) + kappa ** 2))
    return FwResult(Hp, B, E, max_abs(Hp - B * E), fu.unitarity, family)


def fw_spin_residuals(result: FwResult) -> float:
    """Largest ``[H', S_a]`` or ``[H', T_a]`` after the transformation."""
    spec = equation_spec(result.family)
    ops = [as_numeric(m) for m in (*spec.S_ops, *spec.T_ops)]
    return max(max_abs(result.H_prime @ m - m @ result.H_prime) for m in ops)


@dataclass(frozen=True)
class KdpSplit:
    principal: np.ndarray
    redundant: np.ndarray
    coupling_residual: float
    principal_residual: float
    form: str

    @property
    def passed(self) -> bool:
        return self.coupling_residual <= SPLIT_TOL


def fw_split_kdp(bset: BetaSet, p, kappa: float, form: str = "literal") -> KdpSplit:
    """Transform the KDP Hamiltonian and split along the range and kernel of ``beta_5^2``.

    ``coupling_residual`` is the largest off-block entry; ``principal_residual``
    measures the principal block against ``E beta_5`` restricted to the range.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    family = {6: "kdp6", 15: "kdp15"}.get(bset.dim)
    p = tuple(float(x) for x in p)
    H = kdp_hamiltonian(bset, p, kappa).H
    b5 = to_numeric(bset[5])
    pn = float(np.linalg.norm(p))
    if pn == 0.0:
        U = np.eye(bset.dim, dtype=complex)
    else:
        A = sum(to_numeric(bset[k]) * pk for k, pk in zip(range(1, 5), p)) / pn
        c = _coefficient(family or "kdp", form)
        U = expm_antihermitian(-1j * c * np.arctan(pn / kappa) * A, tol=1e-10)
    Hp = U @ H @ U.conj().T
    rng = np.flatnonzero(np.abs(np.diag(b5 @ b5)) > 0.5)
    ker = np.setdiff1d(np.arange(bset.dim), rng)
    E = float(np.sqrt(pn ** 2 + kappa ** 2))
    principal = Hp[np.ix_(rng, rng)]
    redundant = Hp[np.ix_(ker, ker)]
    coupling = max(max_abs(Hp[np.ix_(rng, ker)]), max_abs(Hp[np.ix_(ker, rng)]))
    principal_res = max_abs(principal - E * b5[np.ix_(rng, rng)])
    return KdpSplit(principal, redundant, coupling, principal_res, form)
