"""Dirac-type matrix sets: gamma matrices, spin tensors, spin/isospin operators."""
from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement

import sympy

from .errors import ClassificationError, ConstructionError, ResourceError, ShapeError
from .exact import ExactMatrix, ExactScalar, MetricSignature, anticommutator, commutator, kron
from .reports import RelationItem, RelationReport

I = ExactScalar(0, 1)
HALF = Fraction(1, 2)

ID2 = ExactMatrix.identity(2)
SIGMA = (
    ExactMatrix.from_rows([[0, 1], [1, 0]]),
    ExactMatrix.from_rows([[0, -1j], [1j, 0]]),
    ExactMatrix.from_rows([[1, 0], [0, -1]]),
)

MAX_GENERIC_SPATIAL = 12


@dataclass(frozen=True)
class GammaSet:
    """Matrices ``gamma_mu``, one per metric label, with ``{g_mu, g_nu} = 2 g_{mu nu}``.

    ``designated`` optionally stores the fixed matrix that the full product of
    the spatial matrices must reproduce (the eight-dimensional set carries one).
    """

    metric: MetricSignature
    matrices: tuple[ExactMatrix, ...]
    designated: ExactMatrix | None = None
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if len(self.matrices) != len(self.metric):
            raise ShapeError("one matrix per metric label required")
        dims = {m.shape for m in self.matrices}
        if len(dims) != 1 or not self.matrices[0].is_square():
            raise ShapeError("gamma matrices must be square and of equal size")
        if check:
            report = verify_clifford(self)
            if not report.passed:
                bad = ", ".join(it.name for it in report.failures)
                raise ConstructionError(f"Clifford relations fail for pairs {bad}")

    @property
    def dim(self) -> int:
        return self.matrices[0].rows

    def __getitem__(self, label: int) -> ExactMatrix:
        return self.matrices[self.metric.index(label)]

    def __len__(self):
        return len(self.matrices)

    def restrict(self, labels) -> "GammaSet":
        labels = tuple(labels)
        metric = MetricSignature(labels, tuple(self.metric.g(l, l) for l in labels))
        return GammaSet(metric, tuple(self[l] for l in labels), None)

    def replace(self, label: int, matrix: ExactMatrix, check: bool = False) -> "GammaSet":
        mats = list(self.matrices)
        mats[self.metric.index(label)] = matrix
        return GammaSet(self.metric, tuple(mats), self.designated, check=check)


def build_gamma_5d() -> GammaSet:
    """The 4x4 set: ``gamma_a = [[0, s_a], [-s_a, 0]]``, ``gamma_4 = i[[0, 1], [1, 0]]``, ``gamma_0 = diag(1, -1)``."""
    Z = ExactMatrix.zeros(2)
    gammas = [ExactMatrix.block([[ID2, Z], [Z, -ID2]])]
    gammas += [ExactMatrix.block([[Z, s], [-s, Z]]) for s in SIGMA]
    gammas.append(ExactMatrix.block([[Z, ID2], [ID2, Z]]) * I)
    return GammaSet(MetricSignature.lorentz(4), tuple(gammas))


def build_gamma_8d() -> GammaSet:
    """The 8x8 set ``Gamma_0..Gamma_6`` built from the 4x4 gammas in 2x2 block form."""
    g = build_gamma_5d()
    Z4 = ExactMatrix.zeros(4)
    I4 = ExactMatrix.identity(4)
    mats = [ExactMatrix.block([[I4, Z4], [Z4, -I4]])]
    mats += [ExactMatrix.block([[Z4, g[k]], [g[k], Z4]]) for k in range(1, 5)]
    mats.append(ExactMatrix.block([[Z4, g[0]], [g[0], Z4]]) * I)
    mats.append(ExactMatrix.block([[Z4, I4], [-I4, Z4]]))
    # -i Gamma_1...Gamma_6; equals -Gamma_0 in this basis
    designated = ExactMatrix.block([[-I4, Z4], [Z4, I4]])
    return GammaSet(MetricSignature.lorentz(6), tuple(mats), designated)


def build_gamma_generic(num_spatial: int) -> GammaSet:
    """Clifford set for ``diag(+, -, ..., -)`` with ``num_spatial`` minus signs.

    Uses the tensor-product (Jordan-Wigner) recursion in dimension
    ``2**((num_spatial + 1) // 2)``; the timelike matrix is ``sigma_3`` tensored
    with itself and therefore diagonal.
    """
    if num_spatial < 1:
        raise ValueError("num_spatial must be >= 1")
    if num_spatial > MAX_GENERIC_SPATIAL:
        raise ResourceError(f"num_spatial > {MAX_GENERIC_SPATIAL} exceeds the dimension cap")
    m = (num_spatial + 1) // 2
    s1, s2, s3 = SIGMA

    def chain(factors):
        return reduce(kron, factors)

    euclid = []
    for j in range(m):
        head = [s3] * j
        tail = [ID2] * (m - j - 1)
        euclid.append(chain(head + [s1] + tail))
        euclid.append(chain(head + [s2] + tail))
    gamma0 = chain([s3] * m)
    spatial = [e * I for e in euclid[:num_spatial]]
    return GammaSet(MetricSignature.lorentz(num_spatial), tuple([gamma0] + spatial))


def verify_clifford(gset: GammaSet) -> RelationReport:
    """Check ``{gamma_mu, gamma_nu} = 2 g_{mu nu} I`` for every ordered pair."""
    ident = ExactMatrix.identity(gset.dim)
    items = []
    labels = gset.metric.labels
    cache = {}
    for mu in labels:
        for nu in labels:
            key = (min(mu, nu), max(mu, nu))
            if key not in cache:
                lhs = anticommutator(gset[mu], gset[nu])
                cache[key] = lhs == ident * (2 * gset.metric.g(mu, nu))
            items.append(RelationItem(f"{mu},{nu}", cache[key]))
    return RelationReport("clifford", tuple(items))


@dataclass(frozen=True)
class ProductConstraint:
    holds_17: bool | None
    holds_17prime: bool | None


def check_product_constraint(gset: GammaSet) -> ProductConstraint:
    """Test ``gamma_0 = gamma_1 gamma_2 gamma_3 gamma_4`` (five matrices) or
    ``Gamma = -i Gamma_1 ... Gamma_6`` against the designated matrix (seven)."""
    n = len(gset)
    if n == 5:
        labels = gset.metric.labels
        prod = reduce(lambda a, b: a @ b, (gset[l] for l in labels[1:]))
        return ProductConstraint(prod == gset[labels[0]], None)
    if n == 7:
        if gset.designated is None:
            return ProductConstraint(None, None)
        labels = gset.metric.labels
        prod = reduce(lambda a, b: a @ b, (gset[l] for l in labels[1:])) * (-I)
        return ProductConstraint(None, prod == gset.designated)
    raise ShapeError(f"product constraint needs 5 or 7 matrices, got {n}")


@dataclass(frozen=True)
class SpinTensor:
    """Antisymmetric family ``S_{kl}``; stored for ``k < l``."""

    components: dict
    labels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        comps = dict(self.components)
        for (k, l), m in comps.items():
            if not k < l:
                raise ValueError("store components with k < l")
            if not m.is_hermitian():
                raise ConstructionError(f"S_{k}{l} is not Hermitian")
        labels = self.labels or tuple(sorted({i for kl in comps for i in kl}))
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def dim(self) -> int:
        return next(iter(self.components.values())).rows

    def __getitem__(self, kl) -> ExactMatrix:
        k, l = kl
        if k == l:
            return ExactMatrix.zeros(self.dim)
        if k < l:
            return self.components[(k, l)]
        return -self.components[(l, k)]

    def has(self, k: int, l: int) -> bool:
        return (min(k, l), max(k, l)) in self.components

    def scaled(self, factor) -> "SpinTensor":
        return SpinTensor({kl: m * factor for kl, m in self.components.items()}, self.labels)

    def restrict(self, labels) -> "SpinTensor":
        labels = tuple(labels)
        return SpinTensor(
            {(k, l): m for (k, l), m in self.components.items() if k in labels and l in labels},
            labels,
        )


def spin_tensor(gset: GammaSet) -> SpinTensor:
    """``S_{kl} = (i/4)(gamma_k gamma_l - gamma_l gamma_k)`` over the spatial labels."""
    spatial = gset.metric.spatial
    comps = {}
    for a, k in enumerate(spatial):
        for l in spatial[a + 1:]:
            comps[(k, l)] = commutator(gset[k], gset[l]) * (I / 4)
    return SpinTensor(comps, spatial)


@dataclass(frozen=True)
class SpinIsospinPair:
    S: tuple[ExactMatrix, ExactMatrix, ExactMatrix]
    T: tuple[ExactMatrix, ExactMatrix, ExactMatrix]
    S_sq: ExactMatrix
    T_sq: ExactMatrix

    def bracket_report(self) -> RelationReport:
        """``[S_a, S_b] = i S_c``, ``[T_a, T_b] = i T_c``, ``[S_a, T_b] = 0`` and
        the squares commuting with every component."""
        items = []
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            items.append(RelationItem(
                f"[S{a+1},S{b+1}]=iS{c+1}", commutator(self.S[a], self.S[b]) == self.S[c] * I))
            items.append(RelationItem(
                f"[T{a+1},T{b+1}]=iT{c+1}", commutator(self.T[a], self.T[b]) == self.T[c] * I))
        for a in range(3):
            for b in range(3):
                items.append(RelationItem(
                    f"[S{a+1},T{b+1}]=0", commutator(self.S[a], self.T[b]).is_zero()))
        for name, sq in (("S^2", self.S_sq), ("T^2", self.T_sq)):
            for a in range(3):
                items.append(RelationItem(f"[{name},S{a+1}]=0", commutator(sq, self.S[a]).is_zero()))
                items.append(RelationItem(f"[{name},T{a+1}]=0", commutator(sq, self.T[a]).is_zero()))
        return RelationReport("spin-isospin", tuple(items))


def spin_isospin_split(S: SpinTensor) -> SpinIsospinPair:
    """``S_a = (S_bc + S_4a)/2`` and ``T_a = (S_bc - S_4a)/2`` for cyclic ``(a, b, c)``."""
    for k in range(1, 5):
        for l in range(k + 1, 5):
            if not S.has(k, l):
                raise ShapeError(f"spin tensor lacks component S_{k}{l}")
    s_ops, t_ops = [], []
    for a, b, c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        rot, boost = S[b, c], S[4, a]
        s_ops.append((rot + boost) * HALF)
        t_ops.append((rot - boost) * HALF)
    s_sq = reduce(lambda x, y: x + y, (s @ s for s in s_ops))
    t_sq = reduce(lambda x, y: x + y, (t @ t for t in t_ops))
    return SpinIsospinPair(tuple(s_ops), tuple(t_ops), s_sq, t_sq)


def casimir_spectrum(m: ExactMatrix) -> dict[Fraction, int]:
    """Factor the characteristic polynomial of a Casimir-type matrix exactly.

    Returns ``{s: multiplicity}`` where each eigenvalue equals ``s(s+1)`` with
    ``2s`` a non-negative integer.  Anything else raises
    :class:`ClassificationError`.
    """
    coeffs = m.charpoly()
    if any(c.im != 0 for c in coeffs):
        raise ClassificationError("characteristic polynomial is not real")
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.re.numerator, c.re.denominator) for c in coeffs], x, domain="QQ")
    _, factors = sympy.factor_list(poly)
    out: dict[Fraction, int] = {}
    for fac, mult in factors:
        if fac.degree() != 1:
            raise ClassificationError(f"irreducible factor {fac.as_expr()} has no rational root")
        a, b = fac.all_coeffs()
        root = Fraction(int(sympy.fraction(-b / a)[0]), int(sympy.fraction(-b / a)[1]))
        disc = 1 + 4 * root
        num, den = disc.numerator, disc.denominator
        rn, rd = sympy.integer_nthroot(num, 2), sympy.integer_nthroot(den, 2)
        if disc < 0 or not (rn[1] and rd[1]):
            raise ClassificationError(f"eigenvalue {root} is not of the form s(s+1)")
        s = (Fraction(int(rn[0]), int(rd[0])) - 1) / 2
        if (2 * s).denominator != 1 or s < 0:
            raise ClassificationError(f"eigenvalue {root} gives non-half-integer s={s}")
        out[s] = out.get(s, 0) + int(mult)
    return dict(sorted(out.items()))
