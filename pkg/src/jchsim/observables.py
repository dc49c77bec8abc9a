"""Excitation-number statistics, instantaneous spectra and diabatic leakage.

The per-site order parameter is the variance of ``N_j = a_j^dag a_j +
|e_j><e_j|``. Experiments cannot measure it directly; the estimators here
rebuild it from quantities that can be measured:

* the local phonon variance from rocking-mode moments, valid when the COM
  mode is empty;
* the rocking-mode variance from atomic variances and their covariance,
  valid when the total excitation number is fixed and the COM mode empty;
* a lower/upper interval for the total variance from atomic and phonon
  means and variances alone.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .fockspace import BasisError, CouplingKind, StateVector, sector_basis
from .model import (
    HermitianOperator,
    collective_number_operators,
    hamiltonian_terms,
    number_operators,
)

VARIANCE_FLOOR = -1e-12


def _matrix(op):
    return op.matrix if isinstance(op, HermitianOperator) else np.asarray(op)


def _check(state, op):
    if isinstance(op, HermitianOperator) and op.basis != state.basis:
        raise BasisError("state and operator live on different bases")


def expectation(state, op):
    _check(state, op)
    psi = state.amplitudes
    return float(np.vdot(psi, _matrix(op) @ psi).real)


def variance(state, op):
    """``<A^2> - <A>^2``; round-off negatives down to -1e-12 are clamped to 0."""
    _check(state, op)
    psi = state.amplitudes
    a_psi = _matrix(op) @ psi
    mean = np.vdot(psi, a_psi).real
    var = float(np.vdot(a_psi, a_psi).real - mean**2)
    if var < VARIANCE_FLOOR:
        raise ValueError(f"negative variance {var:.3g}; is the operator Hermitian?")
    return max(var, 0.0)


def covariance(state, op_a, op_b):
    """Symmetrised covariance ``Re<AB> - <A><B>``."""
    _check(state, op_a)
    _check(state, op_b)
    psi = state.amplitudes
    a_psi, b_psi = _matrix(op_a) @ psi, _matrix(op_b) @ psi
    return float(np.vdot(a_psi, b_psi).real - np.vdot(psi, a_psi).real * np.vdot(psi, b_psi).real)


# --- estimators ---------------------------------------------------------------


def phonon_variance_rocking_approx(mean_r, var_r):
    """Local phonon variance from rocking-mode moments: ``<N_r>/4 + var(N_r)/4``."""
    if mean_r < 0 or var_r < 0:
        raise ValueError("rocking-mode moments must be non-negative")
    return 0.25 * mean_r + 0.25 * var_r


def rocking_variance_from_atomic(var_a1, var_a2, cov_a12):
    """Rocking-mode variance ``var(N_a1) + var(N_a2) + 2 cov(N_a1, N_a2)``.

    Exact when ``N_rock + N_a1 + N_a2`` is a fixed number. Negative results
    (only possible from noisy inputs) are clamped to 0 with a warning.
    """
    value = var_a1 + var_a2 + 2.0 * cov_a12
    if value < 0:
        warnings.warn(f"rocking variance estimate {value:.3g} < 0 clamped to 0", stacklevel=2)
        return 0.0
    return value


def total_variance_bounds(mean_a, mean_p, var_a, var_p):
    """Interval for ``var(N_a + N_p)`` from the marginal moments.

    The covariance lies between ``-<N_a><N_p>`` (both operators are
    positive) and ``sqrt(var_a var_p)`` (Cauchy-Schwarz). The lower end is
    reported raw and may be negative.
    """
    if min(mean_a, mean_p, var_a, var_p) < 0:
        raise ValueError("means and variances must be non-negative")
    base = var_a + var_p
    return base - 2.0 * mean_a * mean_p, base + 2.0 * math.sqrt(var_a * var_p)


@dataclass(frozen=True)
class VarianceReport:
    site: int
    mean_a: float
    mean_p: float
    var_a: float
    var_p: float
    var_total_exact: float
    cov_ap: float
    lower: float
    upper: float

    @property
    def bounds(self):
        return (self.lower, self.upper)

    def brackets_exact(self, tol=1e-12):
        return self.lower - tol <= self.var_total_exact <= self.upper + tol

    def as_dict(self):
        return {
            "mean_a": self.mean_a,
            "mean_p": self.mean_p,
            "var_a": self.var_a,
            "var_p": self.var_p,
            "var_total": self.var_total_exact,
            "cov_ap": self.cov_ap,
            "bound_lower": self.lower,
            "bound_upper": self.upper,
        }


def variance_report(state, site=1, operators=None):
    """Exact per-site moments plus the bound interval built from the same moments."""
    n_tot, n_a, n_p = operators if operators is not None else number_operators(state.basis, site)
    mean_a, mean_p = expectation(state, n_a), expectation(state, n_p)
    var_a, var_p = variance(state, n_a), variance(state, n_p)
    lower, upper = total_variance_bounds(mean_a, mean_p, var_a, var_p)
    return VarianceReport(
        site=site,
        mean_a=mean_a,
        mean_p=mean_p,
        var_a=var_a,
        var_p=var_p,
        var_total_exact=variance(state, n_tot),
        cov_ap=covariance(state, n_a, n_p),
        lower=lower,
        upper=upper,
    )


def estimated_phonon_variance(state, site=1):
    """Local phonon variance by the measurement route: atomic moments -> rocking
    variance -> local phonon variance. Uses the exact ``<N_rock>``.
    """
    basis = state.basis
    _, n_a1, _ = number_operators(basis, 1)
    _, n_a2, _ = number_operators(basis, 2)
    _, n_rock = collective_number_operators(basis)
    var_r = rocking_variance_from_atomic(
        variance(state, n_a1), variance(state, n_a2), covariance(state, n_a1, n_a2)
    )
    return phonon_variance_rocking_approx(expectation(state, n_rock), var_r)


def collective_occupations(state):
    """``(<N_com>, <N_rock>)``."""
    n_com, n_rock = collective_number_operators(state.basis)
    return expectation(state, n_com), expectation(state, n_rock)


# --- instantaneous spectrum -----------------------------------------------------


@dataclass(frozen=True)
class EigenTrack:
    """Instantaneous eigensystem along a schedule.

    ``energies[t]`` are sorted ascending and ``vectors[t][:, k]`` is the
    k-th sorted eigenvector. ``order[t, k]`` gives the sorted index that
    continuous level ``k`` occupies at time ``t``; levels are numbered by
    their sorted position at the final time. Vectors are phase-aligned
    with the previous time along each level.
    """

    times: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    order: np.ndarray
    basis: object

    @property
    def dim(self):
        return self.energies.shape[1]

    def ground(self, i):
        return StateVector(self.basis, self.vectors[i][:, 0])

    def tracked_energies(self):
        return np.take_along_axis(self.energies, self.order, axis=1)

    def tracked_vector(self, i, level):
        return StateVector(self.basis, self.vectors[i][:, self.order[i, level]])


def spectrum_basis(sector=2):
    return sector_basis(sector, CouplingKind.JC)


def instantaneous_spectrum(schedule, times=None, basis=None):
    """Diagonalise ``H(t)`` in the N=2 JC sector at each of ``times``."""
    if basis is None:
        basis = spectrum_basis()
    if basis.is_full:
        raise BasisError("instantaneous spectra need a sector-restricted basis")
    times = schedule.grid if times is None else np.asarray(times, dtype=float)
    if times.min() < 0 or times.max() > schedule.duration * (1 + 1e-12):
        raise ValueError("times must lie in [0, duration]")
    detuning, coupling, hopping = hamiltonian_terms(basis, schedule.kind)
    nt, dim = times.size, basis.dim
    energies = np.empty((nt, dim))
    vectors = np.empty((nt, dim, dim), dtype=complex)
    order = np.empty((nt, dim), dtype=int)
    for i, t in enumerate(times):
        h = schedule.delta(t) * detuning + schedule.g(t) * coupling + schedule.kappa * hopping
        w, v = np.linalg.eigh(h)
        v = v.astype(complex)
        if i == 0:
            order[0] = np.arange(dim)
        else:
            prev = vectors[i - 1][:, order[i - 1]]
            overlap = np.abs(prev.conj().T @ v) ** 2
            _, cols = linear_sum_assignment(-overlap)
            order[i] = cols
            # align phases level by level
            for k, col in enumerate(cols):
                ph = np.vdot(prev[:, k], v[:, col])
                if abs(ph) > 0:
                    v[:, col] *= np.conj(ph) / abs(ph)
        energies[i], vectors[i] = w, v
    # renumber levels by their sorted position at the final time
    final = np.argsort(order[-1])
    order = order[:, final]
    return EigenTrack(times, energies, vectors, order, basis)


# --- leakage ------------------------------------------------------------------------


@dataclass(frozen=True)
class LeakageReport:
    """Leakage out of the instantaneous ground level.

    ``levels[t, k]`` is the population (or estimated transition
    probability) of continuous level ``k``; column 0 is the ground level.
    ``total`` sums the excited levels.
    """

    times: np.ndarray
    total: np.ndarray
    levels: np.ndarray

    @property
    def max_total(self):
        return float(self.total.max())

    @property
    def dominant_level(self):
        """Excited level with the largest peak population (0 = ground)."""
        return int(np.argmax(self.levels[:, 1:].max(axis=0))) + 1


def ground_state_leakage(traj, track):
    """Project the evolved state onto the instantaneous eigenbasis.

    ``total(t) = 1 - |<ground(t)|psi(t)>|^2`` where ``psi`` is restricted to
    the track's sector basis.
    """
    if traj.states is None:
        raise ValueError("leakage needs a noiseless trajectory")
    if len(traj.times) != len(track.times) or not np.allclose(traj.times, track.times, rtol=0,
                                                             atol=1e-15):
        raise ValueError("trajectory and eigen track must share sample times")
    nt = len(track.times)
    levels = np.empty((nt, track.dim))
    total = np.empty(nt)
    for i, state in enumerate(traj.states):
        psi = state.transfer(track.basis).amplitudes if state.basis != track.basis \
            else state.amplitudes
        probs = np.abs(track.vectors[i].conj().T @ psi) ** 2
        levels[i] = probs[track.order[i]]
        total[i] = 1.0 - probs[0]
    return LeakageReport(np.asarray(track.times), total, levels)


def adiabatic_leakage_estimate(schedule, track):
    """First-order adiabatic estimate of the diabatic transition probability.

    For each excited level ``m``, ``|<m| dH/dt |0>|^2 / (E_m - E_0)^4``,
    computed from the instantaneous eigensystem alone.
    """
    detuning, coupling, _ = hamiltonian_terms(track.basis, schedule.kind)
    nt = len(track.times)
    levels = np.zeros((nt, track.dim))
    for i, t in enumerate(track.times):
        d_delta, d_g = schedule.derivative(t)
        dh = d_delta * detuning + d_g * coupling
        v, w = track.vectors[i], track.energies[i]
        elems = v.conj().T @ dh @ v[:, 0]
        gaps = w - w[0]
        sorted_levels = np.zeros(track.dim)
        sorted_levels[1:] = np.abs(elems[1:]) ** 2 / gaps[1:] ** 4
        levels[i] = sorted_levels[track.order[i]]
    levels[:, 0] = 1.0 - levels[:, 1:].sum(axis=1)
    return LeakageReport(np.asarray(track.times), levels[:, 1:].sum(axis=1), levels)
