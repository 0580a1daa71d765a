"""Boundary angles, oscillation counts, zero-eigenvalue link, tents."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from ccscatter import (
    PotentialSpec,
    RealificationRequiredError,
    WitnessNotFoundError,
    boundary_angles,
    build_problem,
    catalog,
    coefficients_batch,
    negative_eigenvalue_count,
    tent_gradient_energy,
    tent_value,
    tent_witness,
    zero_eigen_check,
)

PI = math.pi


def sine_well_count(lam: float) -> int:
    """Dirichlet spectrum n^2 pi^2 - pi^2 - lam enumerated directly."""
    return sum(1 for n in range(1, 200) if n * n * PI * PI - PI * PI - lam < 0)


def test_boundary_angles_dirichlet(sine_well):
    ang = boundary_angles(sine_well)
    assert ang.theta0 == pytest.approx(0.0, abs=1e-12)
    assert ang.theta1 == pytest.approx(0.0, abs=1e-12)


def test_boundary_angles_neumann(box_barrier):
    ang = boundary_angles(box_barrier)
    assert ang.theta0 == pytest.approx(PI / 2, abs=1e-12)
    assert ang.theta1 == pytest.approx(PI / 2, abs=1e-12)


def test_boundary_angle_mixed():
    prob = build_problem(PotentialSpec.zero(), PotentialSpec.zero(), (0.0, 1.0))
    ang = boundary_angles(prob)  # u0 = x: (1, 1) at the right end
    assert ang.theta1 == pytest.approx(3 * PI / 4, abs=1e-12)


def test_boundary_angles_reject_complex_reference():
    with pytest.raises(RealificationRequiredError):
        boundary_angles(catalog.delta_pair(k=1.0))


def test_count_matches_enumerated_spectrum(sine_well):
    ang = boundary_angles(sine_well)
    for lam in (0.0, 5 * PI * PI, 35 * PI * PI, -PI * PI):
        got = negative_eigenvalue_count(sine_well, lam, ang)
        assert int(got) == sine_well_count(lam), lam
    rng = np.random.default_rng(13)
    for lam in rng.uniform(-60.0, 900.0, 40):
        got = negative_eigenvalue_count(sine_well, float(lam), ang)
        assert int(got) == sine_well_count(float(lam)), lam


def test_count_flags_boundary_degeneracy(sine_well):
    ang = boundary_angles(sine_well)
    flagged = negative_eigenvalue_count(sine_well, 3 * PI * PI, ang)
    assert flagged.boundary_degenerate
    clear = negative_eigenvalue_count(sine_well, 5 * PI * PI, ang)
    assert not clear.boundary_degenerate


def test_count_free_neumann_stays_zero(free_problem):
    ang = boundary_angles(free_problem)
    for lam in (-1000.0, -10.0, 0.0, 7.0, 1000.0):
        assert int(negative_eigenvalue_count(free_problem, lam, ang)) == 0


def test_monotone_counting(sine_well, corpus):
    ang = boundary_angles(sine_well)
    grid = np.linspace(-30.0, 400.0, 87)
    counts = [int(negative_eigenvalue_count(sine_well, float(l), ang)) for l in grid]
    assert all(a <= b for a, b in zip(counts[:-1], counts[1:]))  # V <= 0
    shifted = dict(corpus)["shifted_sine"]
    ang2 = boundary_angles(shifted)
    counts2 = [int(negative_eigenvalue_count(shifted, float(l), ang2)) for l in grid]
    assert all(a >= b for a, b in zip(counts2[:-1], counts2[1:]))  # V >= 0


def test_zero_eigen_check_known_values(sine_well):
    ang = boundary_angles(sine_well)
    assert zero_eigen_check(sine_well, 3 * PI * PI, ang)
    assert not zero_eigen_check(sine_well, 5 * PI * PI, ang)
    assert zero_eigen_check(sine_well, 0.0, ang)


def test_zero_eigen_at_origin_for_all_real_problems(real_corpus):
    for name, prob in real_corpus:
        ang = boundary_angles(prob)
        assert zero_eigen_check(prob, 0.0, ang), name


def test_link_between_phase_and_wronskian(real_corpus):
    """zero_eigen_check(lam) iff |b(lam)| < 1e-8, both directions."""
    grid = np.linspace(-50.0, 50.0, 200)
    for name, prob in real_corpus:
        ang = boundary_angles(prob)
        b = np.abs(coefficients_batch(prob, grid.astype(complex))[1])
        for lam, ab in zip(grid, b):
            assert zero_eigen_check(prob, float(lam), ang) == (ab < 1e-8), (
                name,
                lam,
            )


def test_link_with_interior_spike():
    prob = build_problem(
        PotentialSpec.zero(), PotentialSpec.deltas([(0.5, 1.0)]), (1.0, 0.0)
    )
    ang = boundary_angles(prob)
    grid = np.linspace(-40.0, 40.0, 81)
    b = np.abs(coefficients_batch(prob, grid.astype(complex))[1])
    for lam, ab in zip(grid, b):
        assert zero_eigen_check(prob, float(lam), ang) == (ab < 1e-8), lam


def test_tent_normalization():
    for eps in (0.25, 0.04, 1e-3):
        val, _ = quad(lambda x: tent_value(x, eps) ** 2, -eps, eps, epsabs=1e-15)
        assert val == pytest.approx(1.0, abs=1e-12)
        assert tent_gradient_energy(eps) == pytest.approx(3.0 / eps**2)


def test_witness_box_barrier(box_barrier):
    w = tent_witness(box_barrier, -1e4, 5)
    assert len(w.centers) == 5
    assert w.epsilon > 0
    assert all(q < 0 for q in w.rayleigh_values)
    spacing = np.diff(w.centers)
    assert spacing.min() >= 2 * w.epsilon


def test_witness_soundness(box_barrier):
    """N tents with negative Rayleigh values force >= N negatives."""
    ang = boundary_angles(box_barrier)
    for lam, n in ((-1e4, 5), (-500.0, 3)):
        w = tent_witness(box_barrier, lam, n)
        count = negative_eigenvalue_count(box_barrier, lam, ang)
        assert int(count) >= len(w.centers)


def test_witness_divergence(box_barrier, corpus):
    positive_part = ["box_barrier", "noise_bed", "shifted_sine"]
    lookup = dict(corpus)
    for name in positive_part:
        prob = lookup[name]
        ang = boundary_angles(prob)
        counts = [
            int(negative_eigenvalue_count(prob, lam, ang))
            for lam in (-10.0, -100.0, -1000.0)
        ]
        assert counts[0] < counts[1] < counts[2], name


def test_witness_not_found_cases(free_problem, box_barrier):
    with pytest.raises(WitnessNotFoundError):
        tent_witness(free_problem, -1e6, 1)
    with pytest.raises(WitnessNotFoundError):
        tent_witness(box_barrier, 0.0, 1)


def test_witness_spike_form():
    prob = build_problem(
        PotentialSpec.zero(), PotentialSpec.deltas([(0.5, 1.0)]), (1.0, 0.0)
    )
    w = tent_witness(prob, -1e4, 1)
    # the only negative-energy budget is the spike at 0.5
    assert abs(w.centers[0] - 0.5) <= 2 * w.epsilon
