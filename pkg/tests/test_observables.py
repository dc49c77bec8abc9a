import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jchsim.fockspace import StateVector, fidelity, full_basis, sector_basis
from jchsim.model import collective_mode_ops, collective_number_operators, number_operators
from jchsim.observables import (
    collective_occupations,
    covariance,
    estimated_phonon_variance,
    expectation,
    ground_state_leakage,
    instantaneous_spectrum,
    phonon_variance_rocking_approx,
    rocking_variance_from_atomic,
    total_variance_bounds,
    variance,
    variance_report,
)
from jchsim.propagate import Schedule, evolve, max_stable_step
from jchsim.protocol import (
    reference_tracks,
    state_atI,
    state_phSF,
    state_polaritonicSF,
    sweep_schedule,
)
from jchsim.units import khz, us

from conftest import random_state_amplitudes


def rocking_fock(basis, n):
    """|gg> (x) (a_r^dag)^n |00> / sqrt(n!) built from ladder matrices."""
    full = full_basis(max(n, 1))
    _, a_r = collective_mode_ops(full)
    v = np.zeros(full.dim)
    v[full.position((0, 0, 0, 0))] = 1.0
    for _ in range(n):
        v = a_r.T @ v
    v /= math.sqrt(math.factorial(n))
    return StateVector(full, v).transfer(basis)


def rocking_phonon_ops(basis):
    _, n_rock = collective_number_operators(basis)
    return n_rock


# --- moments ------------------------------------------------------------------


def test_variance_examples():
    basis = sector_basis(2)
    n1, na1, np1 = number_operators(basis, 1)
    assert variance(state_atI(basis), n1) == 0.0
    assert variance(state_phSF(basis), np1) == pytest.approx(0.5)
    assert variance(state_polaritonicSF(basis), na1) == pytest.approx(35 / 144)


def test_variance_bounds_on_polaritonic_state():
    rep = variance_report(state_polaritonicSF(sector_basis(2)), 1)
    assert rep.mean_a == pytest.approx(5 / 12)
    assert rep.mean_p == pytest.approx(7 / 12)
    assert rep.var_a == pytest.approx(35 / 144)
    assert rep.var_p == pytest.approx(59 / 144)
    assert rep.lower == pytest.approx(1 / 6)
    assert rep.upper == pytest.approx((94 + 2 * math.sqrt(2065)) / 144)
    assert rep.var_total_exact == pytest.approx(5 / 12)
    assert rep.brackets_exact()


def test_bounds_trivial_cases():
    assert total_variance_bounds(0, 0, 0, 0) == (0, 0)
    assert total_variance_bounds(0.5, 2.0, 0, 0) == (-2.0, 0.0)
    rep = variance_report(state_atI(sector_basis(2)))
    assert rep.bounds == (0.0, 0.0) and rep.var_total_exact == 0.0


def test_bounds_reject_negative_inputs():
    with pytest.raises(ValueError):
        total_variance_bounds(-1, 0, 0, 0)


def test_bounds_bracket_exact_on_random_sector_states():
    rng = np.random.default_rng(7)
    basis = sector_basis(2)
    ops = number_operators(basis, 1)
    worst = np.inf
    for _ in range(1000):
        rep = variance_report(StateVector(basis, random_state_amplitudes(rng, basis.dim)), 1, ops)
        assert rep.brackets_exact()
        worst = min(worst, rep.var_total_exact - rep.lower, rep.upper - rep.var_total_exact)
    assert worst >= -1e-12


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), site=st.sampled_from([1, 2]))
def test_bounds_bracket_exact_full_space(seed, site):
    basis = full_basis(2)
    psi = StateVector(basis, random_state_amplitudes(np.random.default_rng(seed), basis.dim))
    rep = variance_report(psi, site)
    assert rep.var_a >= 0 and rep.var_p >= 0
    assert rep.brackets_exact()
    # decomposition of the total variance
    assert rep.var_total_exact == pytest.approx(rep.var_a + rep.var_p + 2 * rep.cov_ap, abs=1e-12)


def test_variance_clamps_rounding_only():
    basis = full_basis(1)
    psi = StateVector.basis_state(basis, (1, 0, 0, 0))
    n1 = number_operators(basis, 1)[0]
    assert variance(psi, n1) == 0.0


# --- rocking-mode estimators --------------------------------------------------------


def test_rocking_approx_examples():
    assert phonon_variance_rocking_approx(2, 0) == 0.5
    assert phonon_variance_rocking_approx(0, 0) == 0.0


@pytest.mark.parametrize("n", range(5))
def test_rocking_approx_exact_on_rocking_fock(n):
    basis = full_basis(5)
    psi = rocking_fock(basis, n)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    n_rock = rocking_phonon_ops(basis)
    approx = phonon_variance_rocking_approx(expectation(psi, n_rock), variance(psi, n_rock))
    assert approx == pytest.approx(variance(psi, number_operators(basis, 1)[2]), abs=1e-12)


def zero_com_sector_states(rng, count):
    """Random N=2 sector states with no COM phonons.

    Spanned by: ee00, the two single-rocking-phonon states and gg with two
    rocking phonons. Projects random vectors onto the n_com = 0 eigenspace.
    """
    basis = sector_basis(2)
    n_com, _ = collective_number_operators(basis)
    w, v = np.linalg.eigh(n_com.matrix)
    kernel = v[:, np.abs(w) < 1e-12]
    for _ in range(count):
        c = random_state_amplitudes(rng, kernel.shape[1])
        yield StateVector(basis, kernel @ c)


def test_zero_com_subspace_dimension():
    basis = sector_basis(2)
    n_com, _ = collective_number_operators(basis)
    assert np.sum(np.abs(np.linalg.eigvalsh(n_com.matrix)) < 1e-12) == 4


def test_estimators_exact_on_zero_com_states():
    rng = np.random.default_rng(3)
    basis = sector_basis(2)
    _, na1, np1 = number_operators(basis, 1)
    _, na2, _ = number_operators(basis, 2)
    n_rock = rocking_phonon_ops(basis)
    for psi in zero_com_sector_states(rng, 200):
        assert collective_occupations(psi)[0] == pytest.approx(0.0, abs=1e-12)
        var_r = rocking_variance_from_atomic(variance(psi, na1), variance(psi, na2),
                                             covariance(psi, na1, na2))
        assert var_r == pytest.approx(variance(psi, n_rock), abs=1e-10)
        assert phonon_variance_rocking_approx(expectation(psi, n_rock), variance(psi, n_rock)) \
            == pytest.approx(variance(psi, np1), abs=1e-10)
        assert estimated_phonon_variance(psi) == pytest.approx(variance(psi, np1), abs=1e-10)


def test_rocking_from_atomic_on_reference_states():
    basis = sector_basis(2)
    _, na1, _ = number_operators(basis, 1)
    _, na2, _ = number_operators(basis, 2)
    n_rock = rocking_phonon_ops(basis)
    assert rocking_variance_from_atomic(0, 0, 0) == 0.0
    assert variance(state_phSF(basis), n_rock) == pytest.approx(0.0, abs=1e-14)
    psi = state_polaritonicSF(basis)
    assert variance(psi, na1) == pytest.approx(35 / 144)
    assert variance(psi, na2) == pytest.approx(35 / 144)
    est = rocking_variance_from_atomic(variance(psi, na1), variance(psi, na2),
                                       covariance(psi, na1, na2))
    assert est == pytest.approx(variance(psi, n_rock), abs=1e-10)


def test_rocking_from_atomic_negative_control():
    # (|ee> + |gg>)/sqrt2 (x) |00>: N not fixed, so the estimator does not apply
    basis = full_basis(1)
    psi = StateVector.from_labels(basis, {(1, 1, 0, 0): 1, (0, 0, 0, 0): 1}, normalize=True)
    _, na1, _ = number_operators(basis, 1)
    _, na2, _ = number_operators(basis, 2)
    est = rocking_variance_from_atomic(variance(psi, na1), variance(psi, na2),
                                       covariance(psi, na1, na2))
    assert est == pytest.approx(1.0)
    exact = variance(psi, rocking_phonon_ops(basis))
    assert exact == 0.0
    assert abs(est - exact) > 0.5


def test_rocking_from_atomic_clamps_with_warning():
    with pytest.warns(UserWarning):
        assert rocking_variance_from_atomic(0.1, 0.1, -0.2 - 1e-3) == 0.0


def test_collective_occupations():
    basis = full_basis(3)
    assert collective_occupations(state_phSF(basis)) == pytest.approx((0.0, 2.0), abs=1e-14)
    assert collective_occupations(StateVector.basis_state(basis, (0, 0, 0, 0))) == (0.0, 0.0)
    assert collective_occupations(StateVector.basis_state(basis, (0, 0, 1, 0))) == \
        pytest.approx((0.5, 0.5))


# --- instantaneous spectrum and leakage --------------------------------------------


@pytest.fixture(scope="module")
def sweep_track():
    return instantaneous_spectrum(sweep_schedule(n_samples=241))


def test_track_shape_and_sorting(sweep_track):
    assert sweep_track.dim == 8
    assert np.all(np.diff(sweep_track.energies, axis=1) >= 0)


def test_track_is_a_permutation_each_time(sweep_track):
    for row in sweep_track.order:
        assert sorted(row) == list(range(8))


def test_ground_track_continuity(sweep_track):
    v = sweep_track.vectors[:, :, 0]
    overlaps = np.abs(np.einsum("ti,ti->t", v[:-1].conj(), v[1:])) ** 2
    assert overlaps.min() > 0.5
    assert np.all(sweep_track.order[:, 0] == 0)


def test_tracked_levels_are_continuous(sweep_track):
    for k in range(sweep_track.dim):
        vecs = np.array([sweep_track.tracked_vector(i, k).amplitudes
                         for i in range(len(sweep_track.times))])
        overlaps = np.abs(np.einsum("ti,ti->t", vecs[:-1].conj(), vecs[1:])) ** 2
        assert overlaps.min() > 0.5


def test_eigenvectors_diagonalise(sweep_track):
    from jchsim.model import hamiltonian_terms

    det, cpl, hop = hamiltonian_terms(sweep_track.basis, "jc")
    s = sweep_schedule(n_samples=241)
    for i in (0, 120, 240):
        t = sweep_track.times[i]
        h = s.delta(t) * det + s.g(t) * cpl + s.kappa * hop
        v, w = sweep_track.vectors[i], sweep_track.energies[i]
        assert np.allclose(h @ v, v * w, atol=1e-6 * khz(1))


def test_ground_state_endpoints(sweep_track):
    basis = sweep_track.basis
    assert fidelity(state_atI(basis), sweep_track.ground(0)) > 0.98
    assert fidelity(state_phSF(basis), sweep_track.ground(-1)) > 0.98


def test_three_lowest_levels_connect_reference_states(sweep_track):
    for level, (start, end) in enumerate(reference_tracks(sweep_track.basis)):
        assert fidelity(start, sweep_track.tracked_vector(0, level)) > 0.98
        assert fidelity(end, sweep_track.tracked_vector(-1, level)) > 0.98


def test_spectrum_rejects_full_basis():
    from jchsim.fockspace import BasisError

    with pytest.raises(BasisError):
        instantaneous_spectrum(sweep_schedule(n_samples=3), basis=full_basis(2))


def test_leakage_vanishes_on_frozen_schedule():
    grid = np.linspace(0, us(300), 31)
    s = Schedule(us(300), grid, lambda t: khz(9), lambda t: khz(7), khz(6), "jc")
    track = instantaneous_spectrum(s)
    traj = evolve(s, track.ground(0), max_stable_step(s))
    leak = ground_state_leakage(traj, track)
    assert np.abs(leak.total).max() < 1e-8


def test_leakage_from_full_space_trajectory():
    s = sweep_schedule(n_samples=25)
    track = instantaneous_spectrum(s)
    full = ground_state_leakage(evolve(s, state_atI(full_basis(4)), us(0.25)), track)
    sec = ground_state_leakage(evolve(s, state_atI(sector_basis(2)), us(0.25)), track)
    assert np.allclose(full.total, sec.total, atol=1e-10)
    assert full.total[0] == pytest.approx(1 - fidelity(state_atI(track.basis), track.ground(0)))
    assert full.total[0] < 0.02


def test_leakage_levels_sum_to_one():
    s = sweep_schedule(n_samples=49)
    track = instantaneous_spectrum(s)
    leak = ground_state_leakage(evolve(s, state_atI(sector_basis(2)), us(0.25)), track)
    assert np.allclose(leak.levels.sum(axis=1), 1.0, atol=1e-10)
    assert np.allclose(leak.total, leak.levels[:, 1:].sum(axis=1), atol=1e-10)


def test_variance_curve_shape_on_ground_track(sweep_track):
    basis = sweep_track.basis
    ops = number_operators(basis, 1)
    reps = [variance_report(sweep_track.ground(i), 1, ops) for i in range(len(sweep_track.times))]
    var_a = np.array([r.var_a for r in reps])
    var_p = np.array([r.var_p for r in reps])
    assert var_a[0] < 0.02 and var_a[-1] < 0.02
    peak = np.argmax(var_a)
    assert 0.25 < sweep_track.times[peak] / sweep_track.times[-1] < 0.6
    assert var_p[0] < 0.02
    assert var_p[-1] == pytest.approx(0.5, abs=0.02)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert all(r.brackets_exact() for r in reps)
