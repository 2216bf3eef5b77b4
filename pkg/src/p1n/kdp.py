"""Kemmer-Duffin-Petiau matrices: the 6x6 and 15x15 sets and their checks."""
from __future__ import annotations

import itertools
import random
from dataclasses import InitVar, dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .clifford import SpinTensor
from .errors import ConstructionError, ShapeError
from .exact import ExactMatrix, ExactScalar, MetricSignature, commutator
from .linalg import to_numeric
from .reports import RelationItem, RelationReport

I = ExactScalar(0, 1)
LABELS = (1, 2, 3, 4, 5)

# Non-zero cells of the 15x15 table as printed, one string per cell, sign
# prefixed.  Most cells are accompanied by their mirror image; the third
# matrix carries several damaged cells which `repair_table` reconstructs.
PRINTED_TABLE = {
    1: ["4,15", "15,4", "7,14", "14,7", "9,13", "13,9", "10,12", "12,10"],
    2: ["3,15", "15,3", "6,14", "14,6", "8,13", "13,8", "-10,11", "-11,10"],
    3: ["2,15", "5,12", "15,14", "14,55", "-8,12", "-12,8", "-9,11", "-11,9"],
    4: ["1,15", "15,1", "-5,13", "-13,5", "-6,12", "-12,6", "-7,11", "-11,7"],
    5: ["-1,14", "-14,1", "-2,13", "-13,2", "-3,12", "-12,3", "-4,11", "-11,4"],
}

BETA5_SQ_DIAG15 = (1,) * 4 + (0,) * 6 + (1,) * 4 + (0,)


@dataclass(frozen=True)
class BetaSet:
    """Five Hermitian matrices obeying the trilinear KDP relation."""

    matrices: tuple[ExactMatrix, ...]
    metric: MetricSignature = MetricSignature.euclidean(LABELS)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if len(self.matrices) != 5:
            raise ShapeError("a KDP set has five matrices")
        if len({m.shape for m in self.matrices}) != 1 or not self.matrices[0].is_square():
            raise ShapeError("beta matrices must be square and of equal size")
        if check:
            for mu, b in zip(LABELS, self.matrices):
                if not b.is_hermitian():
                    raise ConstructionError(f"beta_{mu} is not Hermitian")
            report = verify_kdp(self)
            if not report.passed:
                raise ConstructionError(f"KDP relation fails for triple {report.failures[0].name}")

    @property
    def dim(self) -> int:
        return self.matrices[0].rows

    def __getitem__(self, mu: int) -> ExactMatrix:
        return self.matrices[self.metric.index(mu)]

    def replace(self, mu: int, matrix: ExactMatrix) -> "BetaSet":
        mats = list(self.matrices)
        mats[self.metric.index(mu)] = matrix
        return BetaSet(tuple(mats), self.metric, check=False)


def _delta(a: int, b: int) -> int:
    return int(a == b)


def verify_kdp(bset: BetaSet) -> RelationReport:
    """``b_mu b_nu b_la + b_la b_nu b_mu = d_{mu nu} b_la + d_{la nu} b_mu`` for all 125 triples."""
    items = []
    pairs = {(m, n): bset[m] @ bset[n] for m in LABELS for n in LABELS}
    for mu, nu, la in itertools.product(LABELS, repeat=3):
        lhs = pairs[mu, nu] @ bset[la] + pairs[la, nu] @ bset[mu]
        rhs = bset[la] * _delta(mu, nu) + bset[mu] * _delta(la, nu)
        items.append(RelationItem(f"{mu},{nu},{la}", lhs == rhs))
    return RelationReport("kdp", tuple(items))


def build_beta6() -> BetaSet:
    """``beta_mu = E_{mu,6} + E_{6,mu}``."""
    return BetaSet(tuple(
        ExactMatrix.from_entries(6, 6, {(mu - 1, 5): 1, (5, mu - 1): 1}) for mu in LABELS
    ))


def _parse_cell(cell: str):
    sign = -1 if cell.startswith("-") else 1
    r, c = cell.lstrip("-").split(",")
    return sign, r, c


def _index_readings(token: str, dim: int) -> list[int]:
    """Plausible 1-based indices for a printed token; a token out of range is
    read with one character dropped (a doubled digit, say)."""
    if token.isdigit() and 1 <= int(token) <= dim:
        return [int(token)]
    out = []
    for k in range(len(token)):
        t = token[:k] + token[k + 1:]
        if t.isdigit() and 1 <= int(t) <= dim and int(t) not in out:
            out.append(int(t))
    return out


def _sorted_pair(r, c):
    return (r, c) if r <= c else (c, r)


def _triage(cells: list[str], dim: int):
    """Split a matrix's printed cells into trusted symmetric entries and
    candidate positions.  A cell is trusted when its mirror is printed with the
    same sign."""
    parsed = []
    for cell in cells:
        sign, r, c = _parse_cell(cell)
        parsed.append((sign, _index_readings(r, dim), _index_readings(c, dim)))
    exact = {}
    for sign, rs, cs in parsed:
        if len(rs) == 1 and len(cs) == 1:
            exact.setdefault((rs[0], cs[0]), []).append(sign)
    trusted, candidates = {}, []
    for sign, rs, cs in parsed:
        if len(rs) == 1 and len(cs) == 1 and exact.get((cs[0], rs[0])) == [sign] \
                and exact.get((rs[0], cs[0])) == [sign]:
            trusted[_sorted_pair(rs[0], cs[0])] = sign
            continue
        for r in rs:
            for c in cs:
                pos = _sorted_pair(r, c)
                if r != c and pos not in candidates:
                    candidates.append(pos)
    candidates = [p for p in candidates if p not in trusted]
    return trusted, candidates


def _dense(entries: dict, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim))
    for (r, c), v in entries.items():
        m[r - 1, c - 1] = m[c - 1, r - 1] = v
    return m


def _failures(mats: list[np.ndarray]) -> list[tuple[int, int, int]]:
    bad = []
    for mu, nu, la in itertools.product(range(5), repeat=3):
        lhs = mats[mu] @ mats[nu] @ mats[la] + mats[la] @ mats[nu] @ mats[mu]
        rhs = _delta(mu, nu) * mats[la] + _delta(la, nu) * mats[mu]
        if np.any(lhs != rhs):
            bad.append((mu + 1, nu + 1, la + 1))
    return bad


@dataclass(frozen=True)
class RepairResult:
    entries: dict  # mu -> {(row, col): value}, 1-based, row < col
    candidates: dict  # mu -> tuple of candidate positions
    completions: int  # number of passing assignments found

    def matrices(self, dim: int = 15) -> tuple[ExactMatrix, ...]:
        out = []
        for mu in LABELS:
            cells = {}
            for (r, c), v in self.entries[mu].items():
                cells[(r - 1, c - 1)] = v
                cells[(c - 1, r - 1)] = v
            out.append(ExactMatrix.from_entries(dim, dim, cells))
        return tuple(out)


def repair_table(printed: dict | None = None, dim: int = 15,
                 beta5_sq_diag=BETA5_SQ_DIAG15, values=(-1, 0, 1)) -> RepairResult:
    """Reconstruct the 15x15 set from its damaged printed form.

    Cells whose mirror is printed consistently are kept.  Every remaining cell
    contributes symmetric candidate positions, each of which is tried with
    every value in ``values``.  The lexicographically smallest assignment
    satisfying all 125 trilinear relations and the prescribed ``beta_5**2``
    diagonal wins.
    """
    printed = PRINTED_TABLE if printed is None else printed
    trusted, cands = {}, {}
    for mu in LABELS:
        trusted[mu], cands[mu] = _triage(printed[mu], dim)
    slots = [(mu, pos) for mu in LABELS for pos in cands[mu]]
    target = np.diag(np.asarray(beta5_sq_diag, dtype=float))
    winners = []
    best = None
    for assignment in itertools.product(values, repeat=len(slots)):
        entries = {mu: dict(trusted[mu]) for mu in LABELS}
        for (mu, pos), v in zip(slots, assignment):
            if v:
                entries[mu][pos] = v
        mats = [_dense(entries[mu], dim) for mu in LABELS]
        if np.any(mats[4] @ mats[4] != target):
            continue
        bad = _failures(mats)
        if not bad:
            winners.append(entries)
        elif best is None or len(bad) < len(best):
            best = bad
    if not winners:
        where = best[0] if best else "beta_5 squared"
        raise ConstructionError(f"no completion of the table passes; first violation at {where}")
    chosen = winners[0]
    result = RepairResult(
        {mu: dict(sorted(chosen[mu].items())) for mu in LABELS},
        {mu: tuple(cands[mu]) for mu in LABELS},
        len(winners),
    )
    BetaSet(result.matrices(dim))  # exact confirmation
    return result


def _read_frozen() -> dict:
    text = resources.files("p1n").joinpath("data/beta15.tsv").read_text()
    entries = {mu: {} for mu in LABELS}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        mu, r, c, v = (int(x) for x in line.split())
        entries[mu][(r - 1, c - 1)] = v
    return entries


def write_frozen_table(result: RepairResult) -> str:
    """Render a repair result in the packaged ``matrix row col value`` format."""
    lines = ["# matrix\trow\tcol\tvalue (1-based)"]
    for mu in LABELS:
        cells = {}
        for (r, c), v in result.entries[mu].items():
            cells[(r, c)] = v
            cells[(c, r)] = v
        for (r, c), v in sorted(cells.items()):
            lines.append(f"{mu}\t{r}\t{c}\t{v:+d}")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def build_beta15() -> BetaSet:
    """The 15x15 set, loaded from the frozen repaired table shipped with the package."""
    entries = _read_frozen()
    return BetaSet(tuple(ExactMatrix.from_entries(15, 15, entries[mu]) for mu in LABELS))


def kdp_spin_tensor(bset: BetaSet) -> SpinTensor:
    """``S_{mu nu} = i(beta_mu beta_nu - beta_nu beta_mu)`` for ``mu < nu``."""
    comps = {}
    for a, mu in enumerate(LABELS):
        for nu in LABELS[a + 1:]:
            comps[(mu, nu)] = commutator(bset[mu], bset[nu]) * I
    return SpinTensor(comps, LABELS)


def so5_closure_check(bset: BetaSet) -> RelationReport:
    """Five-dimensional rotation algebra of the KDP spin tensor, all-plus metric:
    ``-i[S_mn, S_rs] = d_ms S_nr + d_nr S_ms - d_mr S_ns - d_ns S_mr``."""
    S = kdp_spin_tensor(bset)
    pairs = [(m, n) for m in LABELS for n in LABELS if m < n]
    items = []
    for (m, n), (r, s) in itertools.product(pairs, repeat=2):
        lhs = commutator(S[m, n], S[r, s]) * (-I)
        rhs = (S[n, r] * _delta(m, s) + S[m, s] * _delta(n, r)
               - S[n, s] * _delta(m, r) - S[m, r] * _delta(n, s))
        items.append(RelationItem(f"S{m}{n},S{r}{s}", lhs == rhs))
    return RelationReport("so5", tuple(items))


def covariance_check(bset: BetaSet) -> RelationReport:
    """Vector covariance of ``beta_mu`` under the spin tensor:
    ``-i[beta_mu, S_rs] = d_{mu r} beta_s - d_{mu s} beta_r``."""
    S = kdp_spin_tensor(bset)
    items = []
    for mu, r, s in itertools.product(LABELS, repeat=3):
        lhs = commutator(bset[mu], S[r, s]) * (-I)
        rhs = bset[s] * _delta(mu, r) - bset[r] * _delta(mu, s)
        items.append(RelationItem(f"{mu},{r},{s}", lhs == rhs))
    return RelationReport("covariance", tuple(items))


@dataclass(frozen=True)
class KdpHamiltonian:
    H: object  # ExactMatrix or ndarray
    p: tuple
    kappa: object

    @property
    def exact(self) -> bool:
        return isinstance(self.H, ExactMatrix)

    def numeric(self) -> np.ndarray:
        return to_numeric(self.H) if self.exact else self.H


def kdp_hamiltonian(bset: BetaSet, p, kappa, exact: bool = False) -> KdpHamiltonian:
    """``H = S_{5k} p_k + beta_5 kappa`` (k = 1..4).

    With ``exact=True`` the momenta and ``kappa`` are converted to fractions
    and ``H`` is an :class:`ExactMatrix`.
    """
    p = tuple(p)
    if len(p) != 4:
        raise ShapeError("momentum must have four components")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    S = kdp_spin_tensor(bset)
    if exact:
        p = tuple(Fraction(x) for x in p)
        kappa = Fraction(kappa)
        H = bset[5] * kappa
        for k, pk in zip(range(1, 5), p):
            if pk:
                H = H + S[5, k] * pk
        return KdpHamiltonian(H, p, kappa)
    H = to_numeric(bset[5]) * float(kappa)
    for k, pk in zip(range(1, 5), p):
        H = H + to_numeric(S[5, k]) * float(pk)
    return KdpHamiltonian(H, tuple(float(x) for x in p), float(kappa))


def psquared_check(bset: BetaSet, trials: int = 5, seed: int = 0) -> RelationReport:
    """Exact test of the invariant ``P^2 = H^2 - p^2`` on the principal subspace.

    ``H^2 - p^2`` equals ``kappa^2 beta_5^2`` only in the rest frame; away from
    it the invariant statement is that ``H`` has eigenvalues ``+-E`` and ``0``
    with ``E^2 = p^2 + kappa^2``, i.e. ``H^3 = E^2 H``, and that the number of
    principal components (``rank H``) equals ``rank beta_5^2``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    b5sq = bset[5] @ bset[5]
    rank = b5sq.rank()
    items = []
    for t in range(trials):
        p = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(4))
        kappa = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        H = kdp_hamiltonian(bset, p, kappa, exact=True).H
        e_sq = sum(x * x for x in p) + kappa * kappa
        H2 = H @ H
        items.append(RelationItem(f"trial{t}:H^3=E^2H", H2 @ H == H * e_sq))
        items.append(RelationItem(f"trial{t}:rank", H.rank() == rank))
    H0 = kdp_hamiltonian(bset, (0, 0, 0, 0), Fraction(3, 2), exact=True).H
    items.append(RelationItem("rest:H^2-p^2=kappa^2*beta5^2", H0 @ H0 == b5sq * Fraction(9, 4)))
    return RelationReport("psquared", tuple(items))
