from fractions import Fraction

import numpy as np
import pytest

from p1n.errors import DomainError, ShapeError
from p1n.realization import MomentumGrid, evolve, gaussian_state
from p1n.spectrum import (default_edges, dispersion_check, half_norm, mass_distribution,
                          mass_multiplier, p4_marginal)

KAPPA = 1.0
# analytic density of m^2 for a p4 Gaussian of amplitude width 0.2 at p4 = 2,
# evaluated at the midpoints of bins 40..42 (1 <= m^2 <= 1 + 3.5^2, 128 bins)
ORACLE_RHO = [0.6991520068101286, 0.7068573475645413, 0.6944678606854269]
ORACLE_PEAK_EDGES = (4.923828125, 5.01953125)


@pytest.fixture(scope="module")
def packet():
    grid = MomentumGrid(4, 64, 3.5)
    return gaussian_state(grid, (0, 0, 0, 2.0), 0.2, kappa_or_eta=KAPPA)


@pytest.fixture(scope="module")
def small():
    grid = MomentumGrid(4, 32, 3.5)
    return gaussian_state(grid, (0.3, 0, -0.2, 2.0), 0.5, [1, 1j, 0, 0.5], kappa_or_eta=KAPPA)


def test_peak_bin_contains_mass_five(packet):
    d = mass_distribution(packet, KAPPA)
    assert d.peak_bin() == d.bin_of(5.0) == 41
    assert tuple(d.edges[41:43]) == ORACLE_PEAK_EDGES


def test_density_matches_oracle(packet):
    d = mass_distribution(packet, KAPPA)
    assert np.max(np.abs(d.values[40:43, 0] - ORACLE_RHO)) < 1e-3


def test_parseval(packet):
    d = mass_distribution(packet, KAPPA)
    assert abs(d.total() - half_norm(packet)) < 1e-2
    full = mass_distribution(packet, KAPPA, include_negative=True)
    assert abs(full.total() - d.total()) < 1e-4  # only interpolation tails at p4 < 0


def test_invariant_under_free_evolution(small):
    before = mass_distribution(small, KAPPA).values
    for kind in ("irreducible_p0", "dirac"):
        after = mass_distribution(evolve(small, kind, 2.3), KAPPA).values
        if kind == "dirac":
            # the Dirac flow mixes spin components, so only the channel sum is
            # invariant; bins in the far tail carry clipped interpolation ringing
            before_s, after_s = before.sum(axis=1), after.sum(axis=1)
            body = before_s > 1e-3 * before_s.max()
            assert np.max(np.abs(after_s - before_s)[body]) <= 1e-10
            f0, f1 = p4_marginal(small), p4_marginal(evolve(small, kind, 2.3))
            assert np.max(np.abs(f0.sum(axis=1) - f1.sum(axis=1))) <= 1e-12
        else:
            assert np.max(np.abs(after - before)) <= 1e-10


def test_dispersion(small):
    assert dispersion_check(small, KAPPA) < 1e-12


def test_channels_and_fwhm(small):
    d = mass_distribution(small, KAPPA, bins=32)
    assert d.channels[0] == (Fraction(1, 2), Fraction(0))
    assert d.values.shape == (32, 4)
    assert d.fwhm(channel=1) == 0.0 or np.any(d.values[:, 1] > 0)
    assert d.fwhm() > 0


def test_csv_layout(small):
    text = mass_distribution(small, KAPPA, bins=4).to_csv()
    lines = text.splitlines()
    assert lines[0] == "m_sq,s3,t3,rho"
    assert len(lines) == 1 + 4 * 4
    assert lines[1].split(",")[1:3] == ["0.5", "0"]


def test_mass_multiplier_bounded_below(small):
    m = mass_multiplier(small.grid, KAPPA)
    assert m.min() >= KAPPA


def test_invalid_inputs(small):
    with pytest.raises(DomainError):
        mass_distribution(small, KAPPA, bins=np.array([0.5, 1.0, 2.0]))
    with pytest.raises(ValueError):
        mass_distribution(small, KAPPA, bins=np.array([2.0, 1.5]))
    with pytest.raises(ValueError):
        mass_distribution(small, 0.0)
    flat = gaussian_state(MomentumGrid(3, 16, 3.0), (0, 0, 0), 0.5)
    with pytest.raises(ShapeError):
        mass_distribution(flat, KAPPA)
    assert default_edges(small.grid, KAPPA, 8)[0] == KAPPA ** 2
