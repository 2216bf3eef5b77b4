"""Variable-mass observables: ``m = sqrt(p_4^2 + kappa^2)`` and the mass distribution.

The distribution over ``m^2`` is computed in momentum space.  By unitarity of
the Fourier transform in ``x_4``, the weight carried at ``m^2`` is the
``p_4``-marginal of ``|psi|^2`` at ``p_4 = +sqrt(m^2 - kappa^2)`` times the
Jacobian ``dp_4 / d(m^2) = 1 / (2 sqrt(m^2 - kappa^2))``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.fft

from .errors import DomainError, ShapeError
from .realization import GridWavefunction, MomentumGrid

HALF = Fraction(1, 2)
DEFAULT_BINS = 128

# (s3, t3) of each spin component in the standard bases
DEFAULT_CHANNELS = {
    1: ((Fraction(0), Fraction(0)),),
    4: ((HALF, Fraction(0)), (-HALF, Fraction(0)), (Fraction(0), HALF), (Fraction(0), -HALF)),
}


def _require_4d(grid: MomentumGrid) -> None:
    if grid.n != 4:
        raise ShapeError("mass observables need n = 4 (the fourth momentum is the mass variable)")


def mass_multiplier(grid: MomentumGrid, kappa: float) -> np.ndarray:
    """``m(p) = sqrt(p_4^2 + kappa^2)`` on every grid point."""
    _require_4d(grid)
    p4 = grid.mesh()[3]
    return np.broadcast_to(np.sqrt(p4 ** 2 + kappa ** 2), grid.shape)


def default_edges(grid: MomentumGrid, kappa: float, bins: int = DEFAULT_BINS) -> np.ndarray:
    """``bins`` uniform bins in ``m^2`` from ``kappa^2`` to the grid maximum."""
    return np.linspace(kappa ** 2, kappa ** 2 + grid.extent ** 2, bins + 1)


def _fmt_half(x: Fraction) -> str:
    return f"{float(x):g}"


@dataclass(frozen=True, eq=False)
class MassDistribution:
    edges: np.ndarray
    values: np.ndarray  # shape (bins, channels), density per unit m^2
    channels: tuple
    kappa: float

    @property
    def m_sq(self) -> np.ndarray:
        """Bin midpoints."""
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def total(self) -> float:
        return float(np.sum(self.values * self.widths[:, None]))

    def summed(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def bin_of(self, m_sq: float) -> int:
        i = int(np.searchsorted(self.edges, m_sq, side="right")) - 1
        if not 0 <= i < len(self.m_sq):
            raise ValueError(f"m^2 = {m_sq} lies outside the binned range")
        return i

    def peak_bin(self, channel: int | None = None) -> int:
        v = self.summed() if channel is None else self.values[:, channel]
        return int(np.argmax(v))

    def fwhm(self, channel: int | None = None) -> float:
        """Full width at half maximum in ``m^2`` around the peak (linear
        interpolation between bin midpoints); 0 for an all-zero channel."""
        v = self.summed() if channel is None else self.values[:, channel]
        if not np.any(v > 0):
            return 0.0
        x = self.m_sq
        i = int(np.argmax(v))
        half = v[i] / 2
        lo = i
        while lo > 0 and v[lo] > half:
            lo -= 1
        hi = i
        while hi < len(v) - 1 and v[hi] > half:
            hi += 1

        def cross(a, b):
            if v[a] == v[b]:
                return x[a]
            return x[a] + (half - v[a]) * (x[b] - x[a]) / (v[b] - v[a])

        left = cross(lo, lo + 1) if v[lo] <= half else x[lo]
        right = cross(hi - 1, hi) if v[hi] <= half else x[hi]
        return float(right - left)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("m_sq,s3,t3,rho\n")
        for i, m in enumerate(self.m_sq):
            for c, (s3, t3) in enumerate(self.channels):
                buf.write(f"{m:.12g},{_fmt_half(s3)},{_fmt_half(t3)},{self.values[i, c]:.12g}\n")
        return buf.getvalue()


def p4_marginal(state: GridWavefunction) -> np.ndarray:
    """``f_c(p_4) = sum_{p_1..p_3} |psi_c|^2 dp^3``, shape ``(points, spin_dim)``."""
    _require_4d(state.grid)
    return np.sum(np.abs(state.data) ** 2, axis=(0, 1, 2)) * state.grid.spacing ** 3


def _trig_interpolate(f: np.ndarray, grid: MomentumGrid, q: np.ndarray) -> np.ndarray:
    """Band-limited interpolation of the periodic samples ``f`` (axis 0) at ``q``.

    The Nyquist mode enters as a cosine so the interpolant stays real and
    reproduces the samples exactly.
    """
    N = grid.points_per_axis
    coef = scipy.fft.fft(f, axis=0) / N
    k = 2 * np.pi * scipy.fft.fftfreq(N, d=grid.spacing)
    phase = np.exp(1j * np.outer(q - grid.axis[0], k))
    phase[:, N // 2] = np.cos(k[N // 2] * (q - grid.axis[0]))
    return np.real(phase @ coef)


def mass_distribution(state: GridWavefunction, kappa: float, bins=DEFAULT_BINS,
                      channels=None, include_negative: bool = False) -> MassDistribution:
    """Distribution of ``m^2`` per ``(s3, t3)`` channel.

    ``bins`` is a bin count (uniform from ``kappa^2`` to the grid maximum) or
    an array of edges.  Only the ``p_4 >= 0`` branch contributes unless
    ``include_negative`` is set.
    """
    grid = state.grid
    _require_4d(grid)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if np.isscalar(bins):
        edges = default_edges(grid, kappa, int(bins))
    else:
        edges = np.asarray(bins, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if edges[0] < kappa ** 2 - 1e-12:
            raise DomainError("bins below kappa^2 carry no mass states")
    if channels is None:
        if state.spin_dim not in DEFAULT_CHANNELS:
            raise ValueError(f"pass channel labels for spin dimension {state.spin_dim}")
        channels = DEFAULT_CHANNELS[state.spin_dim]
    channels = tuple((Fraction(s), Fraction(t)) for s, t in channels)
    if len(channels) != state.spin_dim:
        raise ShapeError("one (s3, t3) label per spin component")
    f = p4_marginal(state)
    axis = grid.axis
    mid = 0.5 * (edges[1:] + edges[:-1])
    q = np.sqrt(mid - kappa ** 2)
    inside = (q <= axis[-1])
    vals = np.where(inside[:, None], np.clip(_trig_interpolate(f, grid, q), 0, None), 0.0)
    if include_negative:
        neg_inside = (-q >= axis[0])
        vals = vals + np.where(neg_inside[:, None], np.clip(_trig_interpolate(f, grid, -q), 0, None), 0.0)
    rho = vals / (2 * q[:, None])
    return MassDistribution(edges, rho, channels, float(kappa))


def half_norm(state: GridWavefunction) -> float:
    """Squared norm carried by the ``p_4 >= 0`` half of the grid."""
    f = p4_marginal(state)
    keep = state.grid.axis >= 0
    return float(np.sum(f[keep]) * state.grid.spacing)


def dispersion_check(state_or_grid, kappa: float) -> float:
    """Largest relative violation of ``p_0^2 - p_1^2 - p_2^2 - p_3^2 = m^2`` on the grid."""
    grid = state_or_grid.grid if isinstance(state_or_grid, GridWavefunction) else state_or_grid
    _require_4d(grid)
    p = grid.mesh()
    p0 = np.sqrt(grid.momentum_squared() + kappa ** 2)
    m = mass_multiplier(grid, kappa)
    lhs = p0 ** 2 - (p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
    return float(np.max(np.abs(lhs - m ** 2) / np.maximum(1.0, p0 ** 2)))
