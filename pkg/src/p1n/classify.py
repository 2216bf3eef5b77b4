"""Representation content of a wave equation from its rest-frame invariants.

The commuting family ``{S^2, T^2, S_3, T_3, eps}`` is diagonalized jointly;
each joint eigenspace contributes ``(eps, s, t)`` with ``s(s+1)`` and
``t(t+1)`` read off the Casimir eigenvalues.  Eigenspaces where the energy
sign vanishes are the redundant components.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .clifford import SpinIsospinPair, build_gamma_5d, build_gamma_8d, spin_isospin_split, spin_tensor
from .errors import ClassificationError, ContractError, ShapeError
from .kdp import build_beta15, build_beta6, kdp_hamiltonian, kdp_spin_tensor
from .linalg import as_numeric, eigh, max_abs

COMMUTE_TOL = 1e-10
REST_FRAME_TOL = 1e-12
SNAP_TOL = 1e-6
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class EquationSpec:
    """Matrix data of one wave equation in Hamiltonian form."""

    name: str
    H_at: Callable
    S_ops: tuple
    T_ops: tuple
    energy_sign_op: object
    kappa: float = 1.0

    def __post_init__(self):
        if len(self.S_ops) != 3 or len(self.T_ops) != 3:
            raise ShapeError("S_ops and T_ops must be triples")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        mats = [as_numeric(m) for m in (*self.S_ops, *self.T_ops, self.energy_sign_op)]
        h0 = as_numeric(self.H_at(np.zeros(self.momentum_dim)))
        if len({m.shape for m in mats + [h0]}) != 1:
            raise ShapeError("inconsistent matrix dimensions in equation spec")
        for m in mats[:6]:
            r = max_abs(h0 @ m - m @ h0)
            if r > REST_FRAME_TOL:
                raise ContractError(f"rest-frame Hamiltonian does not commute with spin data ({r:.2e})")

    @property
    def momentum_dim(self) -> int:
        return 4

    @property
    def dim(self) -> int:
        return as_numeric(self.energy_sign_op).shape[0]

    def numeric_family(self) -> dict[str, np.ndarray]:
        S = [as_numeric(m) for m in self.S_ops]
        T = [as_numeric(m) for m in self.T_ops]
        return {
            "S^2": sum(s @ s for s in S),
            "T^2": sum(t @ t for t in T),
            "S3": S[2],
            "T3": T[2],
            "eps": as_numeric(self.energy_sign_op),
        }

    def with_sign(self, sign: int) -> "EquationSpec":
        """Same equation with the energy-sign operator multiplied by ``sign``."""
        return EquationSpec(self.name, self.H_at, self.S_ops, self.T_ops,
                            as_numeric(self.energy_sign_op) * sign, self.kappa)


@dataclass(frozen=True, order=True)
class Block:
    epsilon: int
    s: Fraction
    t: Fraction
    mult: int

    @property
    def dim(self) -> int:
        return int((2 * self.s + 1) * (2 * self.t + 1)) * self.mult

    def label(self) -> str:
        sign = "+" if self.epsilon > 0 else "-"
        return f"D{sign}({self.s},{self.t})" + (f"x{self.mult}" if self.mult > 1 else "")


@dataclass(frozen=True, order=True)
class RedundantBlock:
    s: Fraction
    t: Fraction
    mult: int

    @property
    def dim(self) -> int:
        return int((2 * self.s + 1) * (2 * self.t + 1)) * self.mult

    def label(self) -> str:
        return f"D({self.s},{self.t})" + (f"x{self.mult}" if self.mult > 1 else "")


def _block_key(b: Block):
    return (-b.epsilon, -b.s, -b.t)


def _redundant_key(b: RedundantBlock):
    return (-b.s, -b.t)


@dataclass(frozen=True)
class RepContent:
    blocks: tuple[Block, ...]
    redundant: tuple[RedundantBlock, ...] = ()

    def __post_init__(self):
        if any(b.mult < 1 for b in (*self.blocks, *self.redundant)):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks, key=_block_key)))
        object.__setattr__(self, "redundant", tuple(sorted(self.redundant, key=_redundant_key)))

    @classmethod
    def of(cls, blocks=(), redundant=()) -> "RepContent":
        """Shorthand: ``RepContent.of([(1, '1/2', 0)], [(1, 0)])``; repeats add up."""
        bc = Counter((int(e), Fraction(s), Fraction(t)) for e, s, t in blocks)
        rc = Counter((Fraction(s), Fraction(t)) for s, t in redundant)
        return cls(tuple(Block(e, s, t, m) for (e, s, t), m in bc.items()),
                   tuple(RedundantBlock(s, t, m) for (s, t), m in rc.items()))

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks) + sum(b.dim for b in self.redundant)

    @property
    def principal_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def multiplicity(self, epsilon: int, s, t) -> int:
        s, t = Fraction(s), Fraction(t)
        return sum(b.mult for b in self.blocks if (b.epsilon, b.s, b.t) == (epsilon, s, t))

    def flipped(self) -> "RepContent":
        return RepContent(tuple(Block(-b.epsilon, b.s, b.t, b.mult) for b in self.blocks), self.redundant)

    def to_dict(self) -> dict:
        return {
            "blocks": [{"epsilon": b.epsilon, "s": str(b.s), "t": str(b.t), "mult": b.mult}
                       for b in self.blocks],
            "redundant": [{"s": str(b.s), "t": str(b.t), "mult": b.mult} for b in self.redundant],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "RepContent":
        d = json.loads(text)
        return cls(
            tuple(Block(int(b["epsilon"]), Fraction(b["s"]), Fraction(b["t"]), int(b["mult"]))
                  for b in d["blocks"]),
            tuple(RedundantBlock(Fraction(b["s"]), Fraction(b["t"]), int(b["mult"]))
                  for b in d["redundant"]),
        )

    def __str__(self):
        text = " + ".join(b.label() for b in self.blocks) or "0"
        if self.redundant:
            text += " | redundant: " + " + ".join(b.label() for b in self.redundant)
        return text


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def joint_eigenspaces(ops: list[np.ndarray], tol: float = CLUSTER_TOL):
    """Split the space into joint eigenspaces of commuting Hermitian matrices.

    Returns a list of ``(eigenvalue tuple, basis)`` pairs.
    """
    dim = ops[0].shape[0]
    spaces = [((), np.eye(dim, dtype=complex))]
    for op in ops:
        refined = []
        for vals, basis in spaces:
            sub = basis.conj().T @ op @ basis
            w, v = eigh(0.5 * (sub + sub.conj().T), tol=1e-9)
            for idx in _clusters(w, tol * max(1.0, float(np.max(np.abs(w))))):
                refined.append((vals + (float(np.mean(w[idx])),), basis @ v[:, idx]))
        spaces = refined
    return spaces


def snap_spin(casimir: float) -> Fraction:
    """The half-integer ``s`` with ``s(s+1)`` equal to ``casimir``."""
    if casimir < -SNAP_TOL:
        raise ClassificationError(f"negative Casimir eigenvalue {casimir}")
    s = (-1 + math.sqrt(1 + 4 * max(casimir, 0.0))) / 2
    snapped = Fraction(round(2 * s), 2)
    if abs(float(snapped * (snapped + 1)) - casimir) > SNAP_TOL:
        raise ClassificationError(f"eigenvalue {casimir} is not s(s+1) for a half-integer s")
    return snapped


def classify(spec: EquationSpec) -> RepContent:
    """Decompose the rest-frame solution space into ``D^eps(s, t)`` blocks."""
    fam = spec.numeric_family()
    names = list(fam)
    mats = [fam[k] for k in names]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            r = max_abs(mats[i] @ mats[j] - mats[j] @ mats[i])
            if r > COMMUTE_TOL:
                raise ContractError(f"[{names[i]}, {names[j]}] = {r:.2e}; family does not commute")
    counts: Counter = Counter()
    for (s2, t2, _s3, _t3, e), basis in joint_eigenspaces(mats):
        s, t = snap_spin(s2), snap_spin(t2)
        eps = 0 if abs(e) < SNAP_TOL else (1 if e > 0 else -1)
        counts[(eps, s, t)] += basis.shape[1]
    blocks, redundant = [], []
    for (eps, s, t), d in counts.items():
        size = int((2 * s + 1) * (2 * t + 1))
        if d % size:
            raise ClassificationError(f"dimension {d} of (eps={eps}, s={s}, t={t}) is not a multiple of {size}")
        if eps == 0:
            redundant.append(RedundantBlock(s, t, d // size))
        else:
            blocks.append(Block(eps, s, t, d // size))
    return RepContent(tuple(blocks), tuple(redundant))


def is_ptc_pattern(content: RepContent) -> bool:
    """True when the principal blocks group into ``D+(s,t) D-(s,t) D+(t,s) D-(t,s)``."""
    if not content.blocks:
        return False
    for b in content.blocks:
        m = [content.multiplicity(e, s, t) for e in (1, -1) for s, t in ((b.s, b.t), (b.t, b.s))]
        if len(set(m)) != 1:
            return False
    return True


# -- shipped equations -----------------------------------------------------

def _dirac_hamiltonian(beta: np.ndarray, gammas: list[np.ndarray], sign: int, kappa: float):
    alphas = [beta @ g for g in gammas]

    def H_at(p):
        p = np.asarray(p, dtype=float)
        return sum(a * pk for a, pk in zip(alphas, p)) + sign * kappa * beta

    return H_at


def _split_numeric(pair: SpinIsospinPair):
    return tuple(pair.S), tuple(pair.T)


def equation_spec(name: str, kappa: float = 1.0) -> EquationSpec:
    """Matrix data for ``dirac18a``, ``dirac18b``, ``dirac26``, ``kdp6`` or ``kdp15``."""
    if name in ("dirac18a", "dirac18b"):
        g = build_gamma_5d()
        sign = 1 if name == "dirac18a" else -1
        beta = as_numeric(g[0])
        H = _dirac_hamiltonian(beta, [as_numeric(g[k]) for k in range(1, 5)], sign, kappa)
        S, T = _split_numeric(spin_isospin_split(spin_tensor(g)))
        return EquationSpec(name, H, S, T, g[0] * sign, kappa)
    if name == "dirac26":
        g = build_gamma_8d()
        beta = as_numeric(g[0])
        H = _dirac_hamiltonian(beta, [as_numeric(g[k]) for k in range(1, 5)], 1, kappa)
        S, T = _split_numeric(spin_isospin_split(spin_tensor(g).restrict(range(1, 5))))
        return EquationSpec(name, H, S, T, g[0], kappa)
    if name in ("kdp6", "kdp15"):
        bset = build_beta6() if name == "kdp6" else build_beta15()
        # the KDP tensor obeys the all-plus rotation algebra; its negative
        # carries the sign convention the spin/isospin split is written for
        spin = kdp_spin_tensor(bset).scaled(-1).restrict(range(1, 5))
        S, T = _split_numeric(spin_isospin_split(spin))

        def H(p):
            return kdp_hamiltonian(bset, tuple(p), kappa).H

        return EquationSpec(name, H, S, T, bset[5], kappa)
    raise KeyError(f"unknown equation {name!r}")


EQUATIONS = ("dirac18a", "dirac18b", "dirac26", "kdp6", "kdp15")


def classify_dirac18b() -> RepContent:
    return classify(equation_spec("dirac18b"))


def classify_kdp6() -> RepContent:
    return classify(equation_spec("kdp6"))
