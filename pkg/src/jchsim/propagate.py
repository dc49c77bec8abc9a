"""Time evolution under piecewise-constant (midpoint) Hamiltonians.

Each grid interval is split into equal substeps no longer than ``step``;
over a substep the state is multiplied by ``exp(-i H(t_mid) dt)``. The
exponential comes from a Hermitian eigendecomposition, so norm is kept to
rounding error and the scheme is second order in ``dt``. The Hamiltonian
never mixes conserved-number blocks, so each block is exponentiated on its
own.

Laser frequency noise is modelled as a quasi-static detuning offset drawn
once per trajectory from a zero-mean Gaussian; observables are averaged
over trajectories in index order.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .fockspace import BasisError, CouplingKind, StateVector, conserved_number
from .model import HermitianOperator, hamiltonian_terms, number_operators

STEP_RESOLUTION = 50


class StepTooLargeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Schedule:
    """Pulse parameters ``delta(t)`` and ``g(t)`` on ``[0, duration]``.

    ``grid`` holds the output sample times.
    """

    duration: float
    grid: np.ndarray
    delta_of_t: Callable[[float], float]
    g_of_t: Callable[[float], float]
    kappa: float
    kind: CouplingKind = CouplingKind.JC

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise ValueError("grid must be a non-empty 1-D array")
        if grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.isclose(grid[-1], self.duration, rtol=1e-12, atol=0.0):
            raise ValueError(f"grid ends at {grid[-1]}, expected duration {self.duration}")
        grid[-1] = self.duration
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "kind", CouplingKind(self.kind))

    def delta(self, t):
        return float(self.delta_of_t(t))

    def g(self, t):
        return float(self.g_of_t(t))

    def with_delta_offset(self, offset):
        """Same schedule with a constant shift added to ``delta(t)``."""
        base = self.delta_of_t
        return Schedule(
            self.duration, self.grid, lambda t: base(t) + offset, self.g_of_t, self.kappa, self.kind
        )

    def derivative(self, t, h=None):
        """Central-difference ``(d delta/dt, dg/dt)`` at ``t``."""
        if h is None:
            h = 1e-6 * self.duration
        lo, hi = max(t - h, 0.0), min(t + h, self.duration)
        span = hi - lo
        return (
            (self.delta(hi) - self.delta(lo)) / span,
            (self.g(hi) - self.g(lo)) / span,
        )


@dataclass(frozen=True)
class NoiseModel:
    sigma_detuning: float = 0.0
    n_trajectories: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.sigma_detuning < 0:
            raise ValueError("sigma_detuning must be >= 0")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")

    def offsets(self):
        """Per-trajectory detuning offsets, in trajectory order."""
        rng = np.random.default_rng(self.seed)
        return rng.normal(0.0, self.sigma_detuning, size=self.n_trajectories)


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution.

    Noiseless runs fill ``states``; ensemble runs fill ``records`` with
    trajectory-averaged expectation values keyed by observable name.
    """

    times: np.ndarray
    states: list | None = None
    records: dict = field(default_factory=dict)

    def expectation(self, op):
        if self.states is None:
            raise ValueError("trajectory holds ensemble records, not states")
        m = op.matrix if isinstance(op, HermitianOperator) else op
        return np.array([np.vdot(s.amplitudes, m @ s.amplitudes).real for s in self.states])

    @property
    def final(self):
        return self.states[-1]


def max_stable_step(schedule, probe_times=None):
    """Largest step resolving the fastest scale: ``1 / (50 * f_max)``.

    ``f_max = max(|delta|, 2 g, |kappa|) / 2 pi``, maximised over
    ``probe_times`` (default: the grid and 1000 uniform points).
    """
    if probe_times is None:
        probe_times = np.union1d(schedule.grid, np.linspace(0.0, schedule.duration, 1001))
    omega = abs(schedule.kappa)
    for t in probe_times:
        omega = max(omega, abs(schedule.delta(t)), 2.0 * abs(schedule.g(t)))
    if omega == 0.0:
        return np.inf
    return 2.0 * np.pi / (STEP_RESOLUTION * omega)


def _check_step(schedule, step):
    if not step > 0:
        raise StepTooLargeError(f"step must be positive, got {step}")
    limit = max_stable_step(schedule)
    if step > limit * (1.0 + 1e-12):
        raise StepTooLargeError(
            f"step {step:.4g} s does not resolve the fastest scale: need step <= "
            f"{limit:.4g} s (1/{STEP_RESOLUTION} of the shortest period)"
        )


def _propagator(h, dt):
    if not np.iscomplexobj(h):
        w, v = np.linalg.eigh(h)
    else:
        w, v = scipy.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def _blocks(basis, kind):
    """Index sets of the conserved-number blocks; H never couples two blocks."""
    numbers = np.array([conserved_number(s, kind) for s in basis.states])
    return [np.flatnonzero(numbers == n) for n in np.unique(numbers)]


def _run(schedule, psi0, step, terms):
    blocks = [
        (idx, tuple(t[np.ix_(idx, idx)] for t in terms))
        for idx in _blocks(psi0.basis, schedule.kind)
    ]
    amps = np.array(psi0.amplitudes, dtype=complex)
    out = [amps.copy()]
    cache_key, us = None, None
    grid = schedule.grid
    for t0, t1 in zip(grid[:-1], grid[1:]):
        n_sub = max(1, int(np.ceil((t1 - t0) / step - 1e-9)))
        dt = (t1 - t0) / n_sub
        for k in range(n_sub):
            tm = t0 + (k + 0.5) * dt
            key = (schedule.delta(tm), schedule.g(tm), dt)
            if key != cache_key:
                us = [
                    _propagator(key[0] * det + key[1] * cpl + schedule.kappa * hop, dt)
                    for _, (det, cpl, hop) in blocks
                ]
                cache_key = key
            for (idx, _), u in zip(blocks, us):
                amps[idx] = u @ amps[idx]
        out.append(amps.copy())
    return out


def _validate(schedule, psi0):
    basis = psi0.basis
    if basis.sector is not None and basis.kind is not schedule.kind:
        raise BasisError(
            f"sector/kind mismatch: state basis conserves the {basis.kind.value} number, "
            f"schedule is {schedule.kind.value}"
        )


def evolve(schedule, psi0, step):
    """Propagate ``psi0`` through ``schedule``; returns states at every grid time."""
    _validate(schedule, psi0)
    _check_step(schedule, step)
    terms = hamiltonian_terms(psi0.basis, schedule.kind)
    amps = _run(schedule, psi0, step, terms)
    states = [StateVector(psi0.basis, a) for a in amps]
    return Trajectory(times=schedule.grid, states=states)


def default_observables(basis):
    """Excited-state populations of each ion, ``pe_ion1`` and ``pe_ion2``."""
    return {
        "pe_ion1": number_operators(basis, 1)[1],
        "pe_ion2": number_operators(basis, 2)[1],
    }


def evolve_noisy(schedule, psi0, noise, step, observables=None):
    """Ensemble-averaged expectation values under quasi-static detuning noise.

    ``observables`` maps names to :class:`HermitianOperator`; defaults to the
    per-ion excited populations. Deterministic for a fixed ``noise.seed``.
    """
    _validate(schedule, psi0)
    _check_step(schedule, step)
    if observables is None:
        observables = default_observables(psi0.basis)
    terms = hamiltonian_terms(psi0.basis, schedule.kind)
    mats = {name: op.matrix for name, op in observables.items()}
    sums = {name: np.zeros(schedule.grid.size) for name in mats}
    for offset in noise.offsets():
        sched = schedule if offset == 0.0 else schedule.with_delta_offset(float(offset))
        amps = np.array(_run(sched, psi0, step, terms))
        for name, m in mats.items():
            sums[name] += np.einsum("ti,ij,tj->t", amps.conj(), m, amps).real
    n = noise.n_trajectories
    records = {name: s / n for name, s in sums.items()}
    return Trajectory(times=schedule.grid, states=None, records=records)
