"""Momentum-space realizations of the P(1,n) generators on a periodic grid.

Generators are kept as first-order differential operators in normal order,

    A = sum_k a_k(p) X_k + sum_M A_M(p) M,       X_k = i d/dp_k,

with scalar sympy coefficients ``a_k`` and spin matrices ``M`` weighted by
scalar functions ``A_M``.  Commutators of such operators are again first
order, so a relation like ``-i[J_01, J_12] = J_02`` reduces to one operator
whose action on a state needs only the spectral derivatives ``X_k psi`` of the
state itself.  Derivatives of the coefficient fields (the square roots in
``p_0``) are then taken analytically and never see the grid.
:func:`commutator_residuals` also offers ``method="sequential"``, which
composes operators on the grid instead and is limited by how well the grid
resolves ``sqrt(p^2 + kappa^2)``.
"""
from __future__ import annotations

import itertools
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft
import sympy

from .clifford import SpinTensor, build_gamma_generic
from .errors import DomainError, ResourceError, ShapeError
from .exact import ExactMatrix, commutator as mat_commutator
from .linalg import to_numeric
from .reports import RelationItem, RelationReport

RELATION_TOL = 1e-5
MAX_POINTS = 2 ** 24
FIELD_CACHE_BYTES = 512 * 2 ** 20
CLASS_TAGS = {"I": 1, "III": 3}
HEADER = struct.Struct("<qqdqqd")

X0 = sympy.Symbol("x0", real=True)
MASS = sympy.Symbol("kappa", positive=True)


def momentum_symbols(n: int) -> tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"p{k}", real=True) for k in range(1, n + 1))


# -- grid and states ---------------------------------------------------------

@dataclass(frozen=True)
class MomentumGrid:
    """Uniform periodic grid on ``[-L, L)`` in each of ``n`` momentum axes."""

    n: int
    points_per_axis: int
    extent: float

    def __post_init__(self):
        N = self.points_per_axis
        if not 1 <= self.n <= 4:
            raise ShapeError("grid dimension must be between 1 and 4")
        if N < 8 or N & (N - 1):
            raise ShapeError("points_per_axis must be a power of two >= 8")
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        if N ** self.n > MAX_POINTS:
            raise ResourceError(f"{N}^{self.n} grid points exceed the cap of {MAX_POINTS}")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points_per_axis, endpoint=False)

    @property
    def spacing(self) -> float:
        return 2 * self.extent / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.n

    @property
    def total_points(self) -> int:
        return self.points_per_axis ** self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    def mesh(self) -> list[np.ndarray]:
        """Sparse (broadcastable) coordinate arrays ``p_1 .. p_n``."""
        return np.meshgrid(*([self.axis] * self.n), indexing="ij", sparse=True)

    def wavenumbers(self) -> np.ndarray:
        k = 2 * np.pi * scipy.fft.fftfreq(self.points_per_axis, d=self.spacing)
        k[self.points_per_axis // 2] = 0.0  # odd derivative: drop the Nyquist mode
        return k

    def momentum_squared(self) -> np.ndarray:
        return sum(q * q for q in self.mesh())


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Spinor-valued function on a momentum grid; the spin index is last."""

    grid: MomentumGrid
    spin_dim: int
    data: np.ndarray
    kappa_or_eta: float = 1.0
    class_tag: str = "I"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        expected = self.grid.shape + (self.spin_dim,)
        if data.shape != expected:
            data = data.reshape(expected)
        if not np.all(np.isfinite(data)):
            raise ValueError("wavefunction has non-finite entries")
        if self.class_tag not in CLASS_TAGS:
            raise ValueError("class_tag must be 'I' or 'III'")
        object.__setattr__(self, "data", data)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2) * self.grid.cell_volume))

    def with_data(self, data: np.ndarray) -> "GridWavefunction":
        return GridWavefunction(self.grid, self.spin_dim, data, self.kappa_or_eta, self.class_tag)

    def save(self, path) -> None:
        """Binary container: little-endian header then complex128 data, spin index fastest."""
        g = self.grid
        head = HEADER.pack(g.n, g.points_per_axis, g.extent, self.spin_dim,
                           CLASS_TAGS[self.class_tag], self.kappa_or_eta)
        Path(path).write_bytes(head + np.ascontiguousarray(self.data, dtype="<c16").tobytes())

    @classmethod
    def load(cls, path) -> "GridWavefunction":
        raw = Path(path).read_bytes()
        if len(raw) < HEADER.size:
            raise ValueError("state file is truncated")
        n, N, L, d, tag, k = HEADER.unpack_from(raw)
        tags = {v: t for t, v in CLASS_TAGS.items()}
        if tag not in tags:
            raise ValueError(f"unknown class tag {tag}")
        grid = MomentumGrid(n, N, L)
        data = np.frombuffer(raw, dtype="<c16", offset=HEADER.size)
        if data.size != grid.total_points * d:
            raise ValueError("state file size does not match its header")
        return cls(grid, d, data.reshape(grid.shape + (d,)).astype(complex), k, tags[tag])


def gaussian_state(grid: MomentumGrid, center, sigma: float, spin_vector=None,
                   kappa_or_eta: float = 1.0, class_tag: str = "I") -> GridWavefunction:
    """``exp(-|p - c|^2 / (2 sigma^2))`` times a constant spinor, unit norm."""
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.n,):
        raise ShapeError("center needs one entry per axis")
    spin = np.array([1.0], dtype=complex) if spin_vector is None else np.asarray(spin_vector, complex)
    env = np.exp(-sum((q - c) ** 2 for q, c in zip(grid.mesh(), center)) / (2 * sigma ** 2))
    state = GridWavefunction(grid, spin.size, env[..., None] * spin, kappa_or_eta, class_tag)
    return state.with_data(state.data / state.norm())


def gaussian_suite(grid: MomentumGrid, count: int = 3, spin_dim: int = 1, seed: int = 0,
                   sigma: float | None = None, kappa_or_eta: float = 1.0, class_tag: str = "I",
                   center_box=None) -> list[GridWavefunction]:
    """Seeded Gaussians with random centers and complex spinors.

    Centers keep ``6 sigma`` clear of the grid edge unless ``center_box``
    (a per-axis list of ``(low, high)``) is given.
    """
    rng = np.random.default_rng(seed)
    sigma = grid.extent / 8 if sigma is None else sigma
    if center_box is None:
        reach = grid.extent - 6 * sigma
        if reach < 0:
            raise ValueError("sigma too wide for 6-sigma clearance")
        center_box = [(-reach, reach)] * grid.n
    states = []
    for _ in range(count):
        c = [rng.uniform(lo, hi) for lo, hi in center_box]
        v = rng.normal(size=spin_dim) + 1j * rng.normal(size=spin_dim)
        states.append(gaussian_state(grid, c, sigma, v / np.linalg.norm(v), kappa_or_eta, class_tag))
    return states


def admissible_suite(grid: MomentumGrid, eta: float, count: int = 2, spin_dim: int = 1,
                     seed: int = 0) -> list[GridWavefunction]:
    """Class III test states: width ``L/16``, centered ``6 sigma`` inside the
    top edge of the last axis and near the axis elsewhere, well outside the
    shell ``|p| = eta``.  Raises :class:`DomainError` if the grid is too coarse
    for the support margin."""
    sigma = grid.extent / 16
    top = grid.extent - 6 * sigma
    box = [(-sigma, sigma)] * (grid.n - 1) + [(top, top)]
    states = gaussian_suite(grid, count, spin_dim, seed, sigma, eta, "III", box)
    for s in states:
        check_class3_support(s, eta)
    return states


def x_operator(state: GridWavefunction, k: int) -> np.ndarray:
    """``X_k psi = i d psi / d p_k`` by FFT differentiation along axis ``k`` (0-based)."""
    kk = state.grid.wavenumbers().reshape([-1 if a == k else 1 for a in range(state.grid.n)] + [1])
    return -scipy.fft.ifft(kk * scipy.fft.fft(state.data, axis=k), axis=k)


# -- first-order operators ---------------------------------------------------

def _clean(expr) -> sympy.Expr:
    return sympy.sympify(expr)


@dataclass(frozen=True, eq=False)
class FirstOrderOperator:
    """``sum_k coeffs[k] X_k + sum_M zeroth[M] M`` with scalar sympy coefficients."""

    coeffs: tuple
    zeroth: dict
    spin_dim: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_clean(c) for c in self.coeffs))
        z = {}
        for m, e in self.zeroth.items():
            e = _clean(e)
            if e != 0 and not m.is_zero():
                z[m] = z.get(m, sympy.S.Zero) + e
        object.__setattr__(self, "zeroth", {m: e for m, e in z.items() if e != 0})

    @classmethod
    def zero(cls, n: int, spin_dim: int) -> "FirstOrderOperator":
        return cls((0,) * n, {}, spin_dim)

    @classmethod
    def scalar(cls, n: int, spin_dim: int, f) -> "FirstOrderOperator":
        return cls((0,) * n, {ExactMatrix.identity(spin_dim): f}, spin_dim)

    @classmethod
    def matrix(cls, n: int, m: ExactMatrix, f=1) -> "FirstOrderOperator":
        return cls((0,) * n, {m: f}, m.rows)

    @classmethod
    def x_times(cls, n: int, spin_dim: int, k: int, f, symbols) -> "FirstOrderOperator":
        """The composition ``X_k o f`` for scalar ``f``: ``f X_k + i df/dp_k``."""
        coeffs = [0] * n
        coeffs[k] = f
        ident = ExactMatrix.identity(spin_dim)
        return cls(tuple(coeffs), {ident: sympy.I * sympy.diff(f, symbols[k])}, spin_dim)

    @classmethod
    def times_x(cls, n: int, spin_dim: int, k: int, f) -> "FirstOrderOperator":
        """``f X_k``."""
        coeffs = [0] * n
        coeffs[k] = f
        return cls(tuple(coeffs), {}, spin_dim)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "FirstOrderOperator") -> "FirstOrderOperator":
        z = dict(self.zeroth)
        for m, e in other.zeroth.items():
            z[m] = z.get(m, sympy.S.Zero) + e
        return FirstOrderOperator(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), z, self.spin_dim)

    def __neg__(self) -> "FirstOrderOperator":
        return self * -1

    def __sub__(self, other: "FirstOrderOperator") -> "FirstOrderOperator":
        return self + (-other)

    def __mul__(self, c) -> "FirstOrderOperator":
        c = sympy.sympify(c)
        return FirstOrderOperator(tuple(a * c for a in self.coeffs),
                                  {m: e * c for m, e in self.zeroth.items()}, self.spin_dim)

    __rmul__ = __mul__

    def diff_x0(self) -> "FirstOrderOperator":
        return FirstOrderOperator(tuple(sympy.diff(a, X0) for a in self.coeffs),
                                  {m: sympy.diff(e, X0) for m, e in self.zeroth.items()}, self.spin_dim)

    def free_symbols(self) -> set:
        out = set()
        for e in (*self.coeffs, *self.zeroth.values()):
            out |= e.free_symbols
        return out


def commutator(A: FirstOrderOperator, B: FirstOrderOperator, symbols) -> FirstOrderOperator:
    """``[A, B]`` in normal order; second-order terms cancel because the
    derivative coefficients are scalars."""
    n = A.n
    coeffs = []
    for l in range(n):
        c = sum((A.coeffs[k] * sympy.diff(B.coeffs[l], symbols[k])
                 - B.coeffs[k] * sympy.diff(A.coeffs[l], symbols[k])) for k in range(n))
        coeffs.append(sympy.I * c)
    z: dict = {}

    def add(m, e):
        if e != 0 and not m.is_zero():
            z[m] = z.get(m, sympy.S.Zero) + e

    for k in range(n):
        if A.coeffs[k] != 0:
            for m, e in B.zeroth.items():
                add(m, sympy.I * A.coeffs[k] * sympy.diff(e, symbols[k]))
        if B.coeffs[k] != 0:
            for m, e in A.zeroth.items():
                add(m, -sympy.I * B.coeffs[k] * sympy.diff(e, symbols[k]))
    for (ma, ea), (mb, eb) in itertools.product(A.zeroth.items(), B.zeroth.items()):
        add(mat_commutator(ma, mb), ea * eb)
    return FirstOrderOperator(tuple(coeffs), z, A.spin_dim)


class FieldEvaluator:
    """Evaluates scalar coefficient expressions on the grid, with caching."""

    def __init__(self, grid: MomentumGrid, symbols, params: dict, domain_mask=None):
        self.grid = grid
        self.symbols = tuple(symbols)
        self.params = dict(params)
        self.args = tuple(self.symbols) + tuple(self.params)
        self.mesh = grid.mesh()
        self.mask = domain_mask
        self._funcs: dict = {}
        self._fields: OrderedDict = OrderedDict()
        self._bytes = 0

    def function(self, expr):
        f = self._funcs.get(expr)
        if f is None:
            f = sympy.lambdify(self.args, expr, modules="numpy")
            self._funcs[expr] = f
        return f

    def field(self, expr) -> np.ndarray | complex:
        if expr in self._fields:
            self._fields.move_to_end(expr)
            return self._fields[expr]
        coeff, rest = expr.as_coeff_Mul()
        if not rest.free_symbols & set(self.symbols):
            return complex(expr.subs(self.params))
        with np.errstate(all="ignore"):
            val = self.function(rest)(*self.mesh, *self.params.values())
        val = np.broadcast_to(val, self.grid.shape)
        bad = ~np.isfinite(val)
        if self.mask is not None or bad.any():
            val = np.array(val)
            val[bad] = 0
            if self.mask is not None:
                val[~self.mask] = 0
        if complex(coeff) != 1:
            val = val * complex(coeff) if complex(coeff).imag else val * float(coeff)
        self._fields[expr] = val
        self._bytes += val.nbytes
        while self._bytes > FIELD_CACHE_BYTES and len(self._fields) > 1:
            _, old = self._fields.popitem(last=False)
            self._bytes -= old.nbytes
        return val


def apply_operator(op: FirstOrderOperator, state: GridWavefunction, ev: FieldEvaluator,
                   xcache: dict | None = None) -> np.ndarray:
    """``op psi`` as a raw array (``X_k psi`` computed spectrally, optionally cached)."""
    psi = state.data
    out = np.zeros_like(psi)
    for k, a in enumerate(op.coeffs):
        if a == 0:
            continue
        if xcache is not None and k in xcache:
            xk = xcache[k]
        else:
            xk = x_operator(state, k)
            if xcache is not None:
                xcache[k] = xk
        f = ev.field(a)
        out += (f[..., None] if isinstance(f, np.ndarray) else f) * xk
    for m, e in op.zeroth.items():
        f = ev.field(e)
        f = f[..., None] if isinstance(f, np.ndarray) else f
        if m == ExactMatrix.identity(op.spin_dim):
            out += f * psi
        else:
            out += f * (psi @ to_numeric(m).T)
    return out


# -- generator sets ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """``P_mu`` and ``J_{mu nu}`` (mu < nu) of one realization on a grid."""

    grid: MomentumGrid
    P: tuple
    J: dict
    spin: object
    class_tag: str
    epsilon: int
    mass: float
    x0: float = 0.0
    metric: tuple = ()
    symbols: tuple = ()
    mass_symbol: sympy.Symbol = MASS
    p0_expr: sympy.Expr = sympy.S.Zero
    domain: object = None
    _evaluator: list = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def spin_dim(self) -> int:
        return self.P[0].spin_dim

    def g(self, mu: int, nu: int) -> int:
        return self.metric[mu] if mu == nu else 0

    def names(self) -> list[str]:
        out = [f"P{mu}" for mu in range(self.n + 1)]
        out += [f"J{mu}{nu}" for mu, nu in sorted(self.J)]
        return out

    def __getitem__(self, name: str) -> FirstOrderOperator:
        if name.startswith("P"):
            return self.P[int(name[1:])]
        mu, nu = int(name[1]), int(name[2])
        return self.Jmn(mu, nu)

    def Jmn(self, mu: int, nu: int) -> FirstOrderOperator:
        if mu == nu:
            return FirstOrderOperator.zero(self.n, self.spin_dim)
        if mu < nu:
            return self.J[(mu, nu)]
        return -self.J[(nu, mu)]

    def evaluator(self) -> FieldEvaluator:
        if not self._evaluator:
            params = {X0: self.x0, self.mass_symbol: self.mass}
            mask = self.domain(self.grid) if self.domain is not None else None
            self._evaluator.append(FieldEvaluator(self.grid, self.symbols, params, mask))
        return self._evaluator[0]

    def apply(self, name_or_op, state: GridWavefunction) -> GridWavefunction:
        op = self[name_or_op] if isinstance(name_or_op, str) else name_or_op
        return state.with_data(apply_operator(op, state, self.evaluator()))

    def check_state(self, state: GridWavefunction) -> None:
        if state.spin_dim != self.spin_dim:
            raise ShapeError(f"state has spin dimension {state.spin_dim}, generators act on {self.spin_dim}")
        if state.grid != self.grid:
            raise ShapeError("state lives on a different grid")
        if self.class_tag == "III":
            check_class3_support(state, self.mass)


def _pk(n, spin_dim, k, symbols):
    return FirstOrderOperator.scalar(n, spin_dim, symbols[k])


def _orbital(n, spin_dim, k, l, symbols):
    """``x_k p_l - x_l p_k``."""
    return (FirstOrderOperator.x_times(n, spin_dim, k, symbols[l], symbols)
            - FirstOrderOperator.x_times(n, spin_dim, l, symbols[k], symbols))


def _boost_orbital(n, spin_dim, k, p0, symbols):
    """``x0 p_k - (x_k p0 + p0 x_k) / 2``."""
    sym = (FirstOrderOperator.x_times(n, spin_dim, k, p0, symbols)
           + FirstOrderOperator.times_x(n, spin_dim, k, p0))
    return FirstOrderOperator.scalar(n, spin_dim, X0 * symbols[k]) - sym * sympy.Rational(1, 2)


def build_class1(grid: MomentumGrid, spin: SpinTensor | None, kappa: float, epsilon: int = 1,
                 x0: float = 0.0, boost_spin_sign: int = 1) -> GeneratorSet:
    """Generators with ``p0 = eps sqrt(p^2 + kappa^2)`` and little group O(n).

    ``spin`` carries ``S_kl`` for ``k, l = 1..n`` (``None`` for a scalar).
    ``boost_spin_sign=-1`` flips the spin term of ``J_0k``; it exists to show
    that the relation checks detect such an error.
    """
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if epsilon == -1:
        raise DomainError("epsilon=-1 is not realized: p0 + kappa vanishes at p = 0")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    n = grid.n
    sym = momentum_symbols(n)
    d = 1 if spin is None else spin.dim
    if spin is not None and tuple(spin.labels) != tuple(range(1, n + 1)):
        spin = spin.restrict(range(1, n + 1))
        if tuple(spin.labels) != tuple(range(1, n + 1)):
            raise ShapeError("spin tensor must carry labels 1..n")
    p0 = sympy.sqrt(sum(s ** 2 for s in sym) + MASS ** 2)

    def S(k, l):
        return spin[k, l] if spin is not None else ExactMatrix.zeros(d)

    P = [FirstOrderOperator.scalar(n, d, p0)] + [_pk(n, d, k, sym) for k in range(n)]
    J = {}
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            J[(k, l)] = _orbital(n, d, k - 1, l - 1, sym) + FirstOrderOperator.matrix(n, S(k, l)) \
                if spin is not None else _orbital(n, d, k - 1, l - 1, sym)
    for k in range(1, n + 1):
        op = _boost_orbital(n, d, k - 1, p0, sym)
        if spin is not None:
            for l in range(1, n + 1):
                if l != k:
                    op = op - FirstOrderOperator.matrix(n, S(k, l), boost_spin_sign * sym[l - 1] / (p0 + MASS))
        J[(0, k)] = op
    return GeneratorSet(grid, tuple(P), J, spin, "I", epsilon, float(kappa), x0,
                        (1,) + (-1,) * n, sym, MASS, p0)


def little_group_spin(n: int):
    """Lowest finite-dimensional ``O(1, n-1)`` matrices ``(S_0a, S_ab)`` built
    from a Clifford set for ``diag(+, -, ..., -)`` with ``n - 1`` minus signs.

    The boost matrices ``S_0a`` are anti-Hermitian (the representation is not
    unitary), which is why they are not stored in a :class:`SpinTensor`.
    """
    if n < 2:
        raise ValueError("class III needs n >= 2")
    g = build_gamma_generic(n - 1)

    def s(mu, nu):
        return mat_commutator(g[mu], g[nu]) * (1j / 4)

    spin_0a = {a: s(0, a) for a in range(1, n)}
    spin_ab = {(a, b): s(a, b) for a in range(1, n) for b in range(a + 1, n)}
    return spin_0a, spin_ab


def _as_exact(m) -> ExactMatrix:
    if isinstance(m, ExactMatrix):
        return m
    return ExactMatrix.from_rows([[complex(v) for v in row] for row in np.asarray(m)])


def class3_domain(eta: float):
    def mask(grid: MomentumGrid) -> np.ndarray:
        mesh = grid.mesh()
        inside = np.broadcast_to(grid.momentum_squared() > eta ** 2, grid.shape)
        return inside & np.broadcast_to(np.abs(mesh[-1] + eta) > 0, grid.shape)
    return mask


def check_class3_support(state: GridWavefunction, eta: float, margin_cells: float = 4.0,
                         tol: float = 1e-6) -> None:
    """Raise :class:`DomainError` if ``|psi|`` exceeds ``tol * max|psi|`` within
    ``margin_cells`` grid spacings of the shell ``|p| = eta`` or of ``p_n = -eta``."""
    grid = state.grid
    amp = np.sqrt(np.sum(np.abs(state.data) ** 2, axis=-1))
    support = amp > tol * amp.max()
    margin = margin_cells * grid.spacing
    mesh = grid.mesh()
    radius = np.sqrt(grid.momentum_squared())
    bad = support & np.broadcast_to((radius < eta + margin), grid.shape)
    bad |= support & np.broadcast_to(np.abs(mesh[-1] + eta) < margin, grid.shape)
    if bad.any():
        raise DomainError("state support comes within the margin of |p| = eta or p_n = -eta")


def build_class3(grid: MomentumGrid, spin_0a, spin_ab, eta: float, sign: int = 1,
                 x0: float = 0.0) -> GeneratorSet:
    """Generators with ``p0 = sign sqrt(p^2 - eta^2)`` and little group O(1, n-1).

    ``spin_0a`` maps ``a`` to ``S_0a`` and ``spin_ab`` maps ``(a, b)``
    (``a < b``) to ``S_ab``, for ``a, b = 1..n-1``.  Pass ``None`` for both to
    get the scalar realization.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if eta <= 0:
        raise ValueError("eta must be positive")
    n = grid.n
    if n < 2:
        raise ShapeError("class III needs n >= 2")
    sym = momentum_symbols(n)
    eta_s = sympy.Symbol("eta", positive=True)
    if spin_0a is None and spin_ab is None:
        d = 1
        s0 = {a: ExactMatrix.zeros(1) for a in range(1, n)}
        sab = {(a, b): ExactMatrix.zeros(1) for a in range(1, n) for b in range(a + 1, n)}
    else:
        s0 = {a: _as_exact(m) for a, m in dict(spin_0a).items()}
        sab = {ab: _as_exact(m) for ab, m in dict(spin_ab or {}).items()}
        d = next(iter(s0.values())).rows
        if set(s0) != set(range(1, n)):
            raise ShapeError("spin_0a needs entries for a = 1..n-1")

    def S(a, b):
        if a == b:
            return ExactMatrix.zeros(d)
        return sab[(a, b)] if a < b else -sab[(b, a)]

    pn = sym[n - 1]
    p0 = sign * sympy.sqrt(sum(s ** 2 for s in sym) - eta_s ** 2)
    denom = pn + eta_s
    mat = lambda m, f=1: FirstOrderOperator.matrix(n, m, f)  # noqa: E731
    P = [FirstOrderOperator.scalar(n, d, p0)] + [_pk(n, d, k, sym) for k in range(n)]
    J = {}
    for a in range(1, n):
        for b in range(a + 1, n):
            J[(a, b)] = _orbital(n, d, a - 1, b - 1, sym) + mat(S(a, b))
        op = _orbital(n, d, a - 1, n - 1, sym)
        for b in range(1, n):
            if b != a:
                op = op - mat(S(a, b), sym[b - 1] / denom)
        op = op + mat(-s0[a], p0 / denom)  # + S_a0 p0 / (p_n + eta), S_a0 = -S_0a
        J[(a, n)] = op
        J[(0, a)] = _boost_orbital(n, d, a - 1, p0, sym) + mat(s0[a])
    op = _boost_orbital(n, d, n - 1, p0, sym)
    for a in range(1, n):
        op = op - mat(s0[a], sym[a - 1] / denom)
    J[(0, n)] = op
    spin = {"0a": s0, "ab": sab}
    return GeneratorSet(grid, tuple(P), J, spin, "III", sign, float(eta), x0,
                        (1,) + (-1,) * n, sym, eta_s, p0, class3_domain(eta))


# -- relation checks ---------------------------------------------------------

def relation_instances(gens: GeneratorSet):
    """Yield ``(name, A, B, rhs)`` with ``-i[A, B] = rhs`` for every pair of generators."""
    n = gens.n
    zero = FirstOrderOperator.zero(n, gens.spin_dim)
    g = gens.g
    P = gens.P
    Jpairs = sorted(gens.J)
    for mu, nu in itertools.combinations(range(n + 1), 2):
        yield f"[P{mu},P{nu}]", P[mu], P[nu], zero
    for mu in range(n + 1):
        for rho, sig in Jpairs:
            rhs = P[sig] * g(mu, rho) - P[rho] * g(mu, sig)
            yield f"[P{mu},J{rho}{sig}]", P[mu], gens.J[(rho, sig)], rhs
    J = gens.Jmn
    for (mu, nu), (rho, sig) in itertools.combinations(Jpairs, 2):
        rhs = (J(nu, rho) * g(mu, sig) + J(mu, sig) * g(nu, rho)
               - J(nu, sig) * g(mu, rho) - J(mu, rho) * g(nu, sig))
        yield f"[J{mu}{nu},J{rho}{sig}]", J(mu, nu), J(rho, sig), rhs


def _rel(x: np.ndarray, state: GridWavefunction) -> float:
    return float(np.linalg.norm(x) / np.linalg.norm(state.data))


def commutator_residuals(gens: GeneratorSet, test_states, method: str = "normal_ordered",
                         names=None, tol: float = RELATION_TOL) -> RelationReport:
    """Relative residuals ``||(-i[A, B] - rhs) psi|| / ||psi||``, maximized over states.

    ``method="normal_ordered"`` forms the commutator symbolically in normal
    order and applies it once; ``"sequential"`` applies ``A`` and ``B`` in turn
    on the grid.
    """
    test_states = list(test_states)
    if not test_states:
        raise ValueError("at least one test state is required")
    if method not in ("normal_ordered", "sequential"):
        raise ValueError("method must be 'normal_ordered' or 'sequential'")
    for s in test_states:
        gens.check_state(s)
    ev = gens.evaluator()
    xcaches = [dict() for _ in test_states]
    items = []
    for name, A, B, rhs in relation_instances(gens):
        if names is not None and name not in names:
            continue
        worst = 0.0
        if method == "normal_ordered":
            D = commutator(A, B, gens.symbols) * (-sympy.I) - rhs
            for s, xc in zip(test_states, xcaches):
                worst = max(worst, _rel(apply_operator(D, s, ev, xc), s))
        else:
            for s, xc in zip(test_states, xcaches):
                a_psi = s.with_data(apply_operator(A, s, ev, xc))
                b_psi = s.with_data(apply_operator(B, s, ev, xc))
                lhs = -1j * (apply_operator(A, b_psi, ev) - apply_operator(B, a_psi, ev))
                worst = max(worst, _rel(lhs - apply_operator(rhs, s, ev, xc), s))
        items.append(RelationItem(name, worst <= tol, worst))
    return RelationReport(f"commutators-{method}", tuple(items))


def invariance_residual(gens: GeneratorSet, Q: str, test_states) -> float:
    """``max ||(i dQ/dx0 + [Q, P0]) psi|| / ||psi||`` over the states."""
    op = gens[Q]
    D = op.diff_x0() * sympy.I + commutator(op, gens.P[0], gens.symbols)
    ev = gens.evaluator()
    worst = 0.0
    for s in test_states:
        gens.check_state(s)
        worst = max(worst, _rel(apply_operator(D, s, ev), s))
    return worst


def invariance_report(gens: GeneratorSet, test_states, tol: float = RELATION_TOL) -> RelationReport:
    items = []
    for name in gens.names():
        r = invariance_residual(gens, name, test_states)
        items.append(RelationItem(f"inv:{name}", r <= tol, r))
    return RelationReport("invariance", tuple(items))


def heisenberg_residuals(state: GridWavefunction) -> RelationReport:
    """``[x_k, p_l] = i delta_kl`` and ``[x_k, x_l] = 0`` composed on the grid."""
    mesh = state.grid.mesh()
    items = []
    n = state.grid.n
    for k in range(n):
        for l in range(n):
            pl = mesh[l][..., None]
            # x_k (p_l psi) - p_l (x_k psi) should be i delta_kl psi
            lhs = x_operator(state.with_data(pl * state.data), k) - pl * x_operator(state, k)
            r = _rel(lhs - (1j * state.data if k == l else 0), state)
            items.append(RelationItem(f"[x{k+1},p{l+1}]", r <= 1e-8, r))
    for k, l in itertools.combinations(range(n), 2):
        xl = state.with_data(x_operator(state, l))
        xk = state.with_data(x_operator(state, k))
        r = _rel(x_operator(xl, k) - x_operator(xk, l), state)
        items.append(RelationItem(f"[x{k+1},x{l+1}]", r <= 1e-10, r))
    return RelationReport("heisenberg", tuple(items))


# -- evolution -----------------------------------------------------------------

HAMILTONIANS = ("irreducible_p0", "dirac", "kdp")


def _matrix_hamiltonian(kind: str, spin_dim: int):
    """``(A_1..A_4, B)`` with ``H(p) = A_k p_k + B kappa``."""
    from .clifford import build_gamma_5d
    from .kdp import build_beta15, build_beta6, kdp_spin_tensor

    if kind == "dirac":
        if spin_dim != 4:
            raise ShapeError("the Dirac Hamiltonian acts on 4 spin components")
        g = build_gamma_5d()
        beta = to_numeric(g[0])
        return [beta @ to_numeric(g[k]) for k in range(1, 5)], beta
    if spin_dim not in (6, 15):
        raise ShapeError("the KDP Hamiltonian acts on 6 or 15 components")
    bset = build_beta6() if spin_dim == 6 else build_beta15()
    S = kdp_spin_tensor(bset)
    return [to_numeric(S[5, k]) for k in range(1, 5)], to_numeric(bset[5])


def evolve(state: GridWavefunction, hamiltonian: str, t: float) -> GridWavefunction:
    """``exp(-i H(p) t) psi`` pointwise in ``p``.

    The matrix Hamiltonians satisfy ``H^2 = E^2`` (Dirac) or ``H^3 = E^2 H``
    (KDP) with ``E = sqrt(p^2 + kappa^2)``, so the exponential is evaluated
    from its minimal polynomial at every grid point.
    """
    if hamiltonian not in HAMILTONIANS:
        raise ValueError(f"hamiltonian must be one of {HAMILTONIANS}")
    grid = state.grid
    kappa = state.kappa_or_eta
    if t == 0:
        return state.with_data(state.data.copy())
    if hamiltonian == "irreducible_p0":
        p2 = grid.momentum_squared()
        if state.class_tag == "I":
            p0 = np.sqrt(p2 + kappa ** 2)
        else:
            with np.errstate(invalid="ignore"):
                p0 = np.sqrt(p2 - kappa ** 2)
            p0 = np.where(np.isfinite(p0), p0, 0.0)
        return state.with_data(np.exp(-1j * p0 * t)[..., None] * state.data)
    if grid.n != 4:
        raise ShapeError("matrix Hamiltonians need a four-dimensional momentum grid")
    if state.class_tag != "I":
        raise DomainError("matrix Hamiltonians are class I")
    A, B = _matrix_hamiltonian(hamiltonian, state.spin_dim)
    mesh = grid.mesh()
    out = np.empty_like(state.data)
    for i in range(grid.points_per_axis):  # slab by slab along the first axis
        psi = state.data[i]
        p = [mesh[0][i]] + [m[0] for m in mesh[1:]]
        E = np.sqrt(sum(q * q for q in p) + kappa ** 2)[..., None]

        def H(v):
            acc = kappa * (v @ B.T)
            for a, q in zip(A, p):
                acc = acc + q[..., None] * (v @ a.T)
            return acc

        hpsi = H(psi)
        if hamiltonian == "dirac":
            out[i] = np.cos(E * t) * psi - 1j * np.sin(E * t) / E * hpsi
        else:
            out[i] = psi - 1j * np.sin(E * t) / E * hpsi + (np.cos(E * t) - 1) / E ** 2 * H(hpsi)
    return state.with_data(out)
