import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cooktwin.errors import OscillatoryConvergenceError
from cooktwin.gci import GciReport, GridSample, gci_three_grid

# published grid-verification series for the oven benchmark:
# (control volumes, surface temperature at t = 200 s)
PUBLISHED_GRIDS = ((176640, 327.3358951064525), (44800, 328.123347),
                   (11200, 329.23090), (2760, 331.207169))
# published outputs: extrapolated value and safety-factored error window
PUBLISHED_EXTRAPOLATED = 326.666701292857
PUBLISHED_WINDOW = 1.82080713392898


def _samples(pairs):
    return [GridSample(phi=phi, n_cells=n, volume=2.1e-5) for n, phi in pairs]


def test_manufactured_power_law_trivial():
    samples = [GridSample(phi=1.0 + h**2, h=h) for h in (1.0, 2.0, 4.0)]
    rep = gci_three_grid(samples)
    assert rep.apparent_order == pytest.approx(2.0, abs=1e-9)
    assert rep.phi_extrapolated == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("p_true", [0.82, 1.0, 2.0, 0.5, 3.0])
@pytest.mark.parametrize("ratios", [(1.0, 2.0, 4.0), (1.0, 1.58, 2.47)])
def test_manufactured_order_recovery(p_true, ratios):
    phi_star, a = 326.0, 4.3
    samples = [GridSample(phi=phi_star + a * h**p_true, h=h) for h in ratios]
    rep = gci_three_grid(samples)
    assert rep.apparent_order == pytest.approx(p_true, abs=1e-9)
    assert rep.phi_extrapolated == pytest.approx(phi_star, abs=1e-9)


def test_scale_invariance():
    samples = [GridSample(phi=2.0 + 0.5 * h**1.3, h=h) for h in (1.0, 1.7, 3.1)]
    rep1 = gci_three_grid(samples)
    scaled = [GridSample(phi=s.phi, h=7.7 * s.h) for s in samples]
    rep2 = gci_three_grid(scaled)
    assert rep2.apparent_order == pytest.approx(rep1.apparent_order, rel=1e-12)
    assert rep2.phi_extrapolated == pytest.approx(rep1.phi_extrapolated,
                                                  rel=1e-12)
    assert rep2.gci_percent == pytest.approx(rep1.gci_percent, rel=1e-12)


def test_safety_factor_linearity():
    samples = [GridSample(phi=2.0 + 0.5 * h**1.3, h=h) for h in (1.0, 2.0, 4.0)]
    r1 = gci_three_grid(samples, safety=1.25)
    r2 = gci_three_grid(samples, safety=2.50)
    assert r2.gci_percent == pytest.approx(2.0 * r1.gci_percent, rel=1e-12)
    assert r2.error_window == pytest.approx(2.0 * r1.error_window, rel=1e-12)


def test_oscillatory_convergence_rejected():
    samples = [GridSample(phi=phi, h=h)
               for phi, h in ((1.0, 1.0), (1.5, 2.0), (1.2, 4.0))]
    with pytest.raises(OscillatoryConvergenceError):
        gci_three_grid(samples)


def test_degenerate_differences_rejected():
    samples = [GridSample(phi=1.0, h=h) for h in (1.0, 2.0, 4.0)]
    with pytest.raises(ValueError):
        gci_three_grid(samples)


def test_needs_three_grids():
    with pytest.raises(ValueError):
        gci_three_grid(_samples(PUBLISHED_GRIDS[:2]))


def test_four_grids_use_three_finest():
    rep4 = gci_three_grid(_samples(PUBLISHED_GRIDS))
    rep3 = gci_three_grid(_samples(PUBLISHED_GRIDS[:3]))
    assert rep4 == rep3


def test_published_three_finest():
    """The spec's acceptance input: the three finest published grids.

    Values frozen from this implementation of the stated procedure
    (independently cross-checked by hand): the apparent order lands near
    0.72; the GCI and window come out slightly above the published 0.55%
    / 1.82 K, which the published data only reproduce with the three
    coarsest grids (next test).
    """
    rep = gci_three_grid(_samples(PUBLISHED_GRIDS[:3]))
    assert rep.apparent_order == pytest.approx(0.719116, abs=1e-4)
    assert rep.phi_extrapolated == pytest.approx(325.3135, abs=1e-3)
    assert rep.gci_percent == pytest.approx(0.77228, abs=1e-4)
    assert rep.error_window == pytest.approx(2.5279, abs=1e-3)


def test_published_three_coarsest_reproduce_reported_outputs():
    """Feeding the three coarsest published grids reproduces the
    published extrapolated value and error window almost exactly, which
    pins down how those numbers were produced."""
    rep = gci_three_grid(_samples(PUBLISHED_GRIDS[1:]))
    assert rep.phi_extrapolated == pytest.approx(PUBLISHED_EXTRAPOLATED,
                                                 abs=2e-4)
    assert rep.error_window == pytest.approx(PUBLISHED_WINDOW, abs=2e-4)
    assert rep.gci_percent == pytest.approx(0.5549, abs=1e-3)


def test_spacing_from_cell_count():
    s = GridSample(phi=1.0, n_cells=1000, volume=8.0)
    assert s.spacing == pytest.approx(0.2)
    s2 = GridSample(phi=1.0, h=0.3)
    assert s2.spacing == 0.3
    with pytest.raises(ValueError):
        GridSample(phi=1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(1.3, 2.5), st.floats(1.3, 2.5),
       st.floats(-50.0, 50.0), st.floats(0.1, 10.0))
def test_exact_recovery_property(p_true, r1, r2, phi_star, a):
    h = np.array([1.0, r1, r1 * r2])
    samples = [GridSample(phi=phi_star + a * hh**p_true, h=hh) for hh in h]
    rep = gci_three_grid(samples)
    assert rep.apparent_order == pytest.approx(p_true, abs=1e-8)
    assert rep.phi_extrapolated == pytest.approx(phi_star, abs=1e-6)
