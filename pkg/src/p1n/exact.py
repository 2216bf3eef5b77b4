"""Exact Gaussian-rational scalars and matrices.

The gamma, beta and spin matrices have entries in
``{0, +-1, +-i, +-1/2, +-3/4}``, so all algebraic identities can be checked with
no tolerance at all.  :class:`ExactMatrix` stores its entries in a sympy
``DomainMatrix`` over ``QQ_I`` (sparse format), which keeps the long product
chains of the KDP checks cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import ShapeError

__all__ = [
    "ExactScalar",
    "ExactMatrix",
    "MetricSignature",
    "commutator",
    "anticommutator",
    "kron",
    "exact",
]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


@dataclass(frozen=True)
class ExactScalar:
    """A Gaussian rational ``re + i*im``; both parts are reduced fractions."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if hasattr(value, "x") and hasattr(value, "y"):  # QQ_I element
            return cls(_frac(value.x), _frac(value.y))
        return cls(_frac(value), Fraction(0))

    def to_domain(self):
        return QQ_I(
            QQ(self.re.numerator, self.re.denominator),
            QQ(self.im.numerator, self.im.denominator),
        )

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def __add__(self, other):
        o = ExactScalar.coerce(other)
        return ExactScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        o = ExactScalar.coerce(other)
        return ExactScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ExactScalar.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return ExactScalar(num.re / den, num.im / den)

    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"ExactScalar({self.re})"
        return f"ExactScalar({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def exact(value) -> ExactScalar:
    """Shorthand for :meth:`ExactScalar.coerce`."""
    return ExactScalar.coerce(value)


def _dom(value):
    return ExactScalar.coerce(value).to_domain()


class ExactMatrix:
    """Dense-semantics exact matrix over the Gaussian rationals.

    Instances are immutable.  Equality is exact, entrywise.
    """

    __slots__ = ("_dm",)

    def __init__(self, dm: DomainMatrix):
        if dm.domain != QQ_I:
            dm = dm.convert_to(QQ_I)
        self._dm = dm.to_sparse()

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        if any(len(r) != nc for r in rows):
            raise ShapeError("ragged rows")
        data: dict[int, dict[int, object]] = {}
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                d = _dom(v)
                if d:
                    data.setdefault(i, {})[j] = d
        return cls(DomainMatrix(data, (nr, nc), QQ_I))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: dict) -> "ExactMatrix":
        """Build from a ``{(i, j): value}`` mapping (0-based)."""
        data: dict[int, dict[int, object]] = {}
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ShapeError(f"entry ({i}, {j}) outside {rows}x{cols}")
            d = _dom(v)
            if d:
                data.setdefault(i, {})[j] = d
        return cls(DomainMatrix(data, (rows, cols), QQ_I))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        return cls(DomainMatrix({}, (rows, rows if cols is None else cols), QQ_I))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(DomainMatrix.eye(n, QQ_I))

    @classmethod
    def diag(cls, values: Iterable) -> "ExactMatrix":
        values = list(values)
        n = len(values)
        return cls.from_entries(n, n, {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def block(cls, blocks: Sequence[Sequence["ExactMatrix | int"]]) -> "ExactMatrix":
        """Assemble a block matrix; the integer ``0`` stands for a zero block."""
        heights = []
        for brow in blocks:
            hs = {b.rows for b in brow if isinstance(b, ExactMatrix)}
            if len(hs) != 1:
                raise ShapeError("each block row needs one consistent height")
            heights.append(hs.pop())
        widths = []
        for j in range(len(blocks[0])):
            ws = {brow[j].cols for brow in blocks if isinstance(brow[j], ExactMatrix)}
            if len(ws) != 1:
                raise ShapeError("each block column needs one consistent width")
            widths.append(ws.pop())
        data: dict[int, dict[int, object]] = {}
        r0 = 0
        for bi, brow in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(brow):
                if isinstance(b, ExactMatrix):
                    for i, row in b._dm.rep.items():
                        for j, v in row.items():
                            data.setdefault(r0 + i, {})[c0 + j] = v
                elif b != 0:
                    raise ShapeError("only 0 may stand in for a block")
                c0 += widths[bj]
            r0 += heights[bi]
        return cls(DomainMatrix(data, (sum(heights), sum(widths)), QQ_I))

    # -- inspection ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._dm.shape

    @property
    def rows(self) -> int:
        return self._dm.shape[0]

    @property
    def cols(self) -> int:
        return self._dm.shape[1]

    @property
    def domain_matrix(self) -> DomainMatrix:
        return self._dm

    def __getitem__(self, ij) -> ExactScalar:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        v = self._dm.rep.get(i, {}).get(j)
        return ExactScalar() if v is None else ExactScalar.coerce(v)

    @property
    def entries(self) -> tuple[ExactScalar, ...]:
        """Row-major tuple of all entries."""
        return tuple(self[i, j] for i in range(self.rows) for j in range(self.cols))

    def nonzero(self) -> dict[tuple[int, int], ExactScalar]:
        return {
            (i, j): ExactScalar.coerce(v)
            for i, row in sorted(self._dm.rep.items())
            for j, v in sorted(row.items())
        }

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(row for row in self._dm.rep.values())

    # -- algebra ------------------------------------------------------
    def _check_same(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix(self._dm + other._dm)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix(self._dm - other._dm)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(-self._dm)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return ExactMatrix(self._dm * other._dm)

    def __mul__(self, scalar) -> "ExactMatrix":
        if isinstance(scalar, ExactMatrix):
            raise TypeError("use @ for matrix products")
        s = _dom(scalar)
        if not s:
            return ExactMatrix.zeros(self.rows, self.cols)
        return ExactMatrix(self._dm * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "ExactMatrix":
        return self * (ExactScalar(1) / ExactScalar.coerce(scalar))

    def __pow__(self, k: int) -> "ExactMatrix":
        if not self.is_square():
            raise ShapeError("power of a non-square matrix")
        out = ExactMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and (self._dm - other._dm).is_zero_matrix

    def __hash__(self):
        return hash((self.shape, tuple(sorted(
            (i, j, (v.x, v.y)) for i, row in self._dm.rep.items() for j, v in row.items()
        ))))

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self._dm.transpose())

    @property
    def H(self) -> "ExactMatrix":
        """Conjugate transpose."""
        data: dict[int, dict[int, object]] = {}
        for i, row in self._dm.rep.items():
            for j, v in row.items():
                data.setdefault(j, {})[i] = QQ_I(v.x, -v.y)
        return ExactMatrix(DomainMatrix(data, (self.cols, self.rows), QQ_I))

    def is_hermitian(self) -> bool:
        return self.is_square() and self == self.H

    def is_antihermitian(self) -> bool:
        return self.is_square() and self == -self.H

    def trace(self) -> ExactScalar:
        if not self.is_square():
            raise ShapeError("trace of a non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), ExactScalar())

    def inverse(self) -> "ExactMatrix":
        if not self.is_square():
            raise ShapeError("inverse of a non-square matrix")
        return ExactMatrix(self._dm.to_dense().inv())

    def rank(self) -> int:
        return self._dm.to_dense().rank()

    def charpoly(self) -> list[ExactScalar]:
        """Coefficients of ``det(x I - A)``, highest degree first."""
        if not self.is_square():
            raise ShapeError("characteristic polynomial of a non-square matrix")
        return [ExactScalar.coerce(c) for c in self._dm.to_dense().charpoly()]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix.from_rows([[self[i, j] for j in cols] for i in rows])

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for i, row in self._dm.rep.items():
            for j, v in row.items():
                out[i, j] = complex(float(_frac(v.x)), float(_frac(v.y)))
        return out

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={sum(len(r) for r in self._dm.rep.values())})"

    def __str__(self):
        cells = [[str(self[i, j]) for j in range(self.cols)] for i in range(self.rows)]
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(w) for c in r) + "]" for r in cells)


def _square_pair(a: ExactMatrix, b: ExactMatrix):
    if not (a.is_square() and b.is_square()) or a.shape != b.shape:
        raise ShapeError(f"need square matrices of equal size, got {a.shape} and {b.shape}")


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """``AB - BA``."""
    _square_pair(a, b)
    return a @ b - b @ a


def anticommutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """``AB + BA``."""
    _square_pair(a, b)
    return a @ b + b @ a


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product; the block ``(i, j)`` of the result is ``a[i, j] * b``."""
    br, bc = b.shape
    data: dict[int, dict[int, object]] = {}
    for i, arow in a.domain_matrix.rep.items():
        for j, av in arow.items():
            for k, brow in b.domain_matrix.rep.items():
                for l, bv in brow.items():
                    data.setdefault(i * br + k, {})[j * bc + l] = av * bv
    return ExactMatrix(DomainMatrix(data, (a.rows * br, a.cols * bc), QQ_I))


@dataclass(frozen=True)
class MetricSignature:
    """Diagonal metric: ``labels[i]`` carries the sign ``diag[i]``."""

    labels: tuple[int, ...]
    diag: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "diag", tuple(int(d) for d in self.diag))
        if len(self.labels) != len(self.diag):
            raise ShapeError("labels and diag must have the same length")
        if any(d not in (1, -1) for d in self.diag):
            raise ValueError("metric entries must be +1 or -1")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate metric labels")

    @classmethod
    def lorentz(cls, num_spatial: int) -> "MetricSignature":
        """``diag(+, -, ..., -)`` on labels ``0..num_spatial``."""
        return cls(tuple(range(num_spatial + 1)), (1,) + (-1,) * num_spatial)

    @classmethod
    def euclidean(cls, labels: Iterable[int]) -> "MetricSignature":
        labels = tuple(labels)
        return cls(labels, (1,) * len(labels))

    def __len__(self):
        return len(self.labels)

    def index(self, label: int) -> int:
        return self.labels.index(label)

    def g(self, mu: int, nu: int) -> int:
        if mu != nu:
            return 0
        return self.diag[self.index(mu)]

    @property
    def spatial(self) -> tuple[int, ...]:
        """Labels with negative signature."""
        return tuple(l for l, d in zip(self.labels, self.diag) if d == -1)

    @property
    def timelike(self) -> tuple[int, ...]:
        return tuple(l for l, d in zip(self.labels, self.diag) if d == 1)
