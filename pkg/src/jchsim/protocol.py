"""Pulse schedules for the two experiments and their reference states.

Two experiments are encoded:

* blue-sideband dynamics: constant anti-JC coupling from ``|gg;00>``;
* adiabatic transfer: linear detuning ramp with a Gaussian coupling
  envelope, taking ``|ee;00>`` (atomic insulator) to the two-phonon
  rocking state (phonon superfluid).
"""

import math
from dataclasses import dataclass

import numpy as np

from .fockspace import BasisError, CouplingKind, StateVector
from .propagate import Schedule
from .units import khz, us

# Experimental sweep: detuning -41 -> 59 kHz over 960 us, 2g from 0.29*14 kHz
# up to 14 kHz and back.
SWEEP_DELTA_START = khz(-41.0)
SWEEP_DELTA_END = khz(59.0)
SWEEP_DURATION = us(960.0)
SWEEP_G_PEAK = khz(14.0) / 2
SWEEP_EDGE_FACTOR = 0.29
SWEEP_KAPPA = khz(6.0)

# Blue-sideband dynamics: kappa = 5.4 kHz, 2g = 12.0 kHz, ~200 Hz laser noise.
DYNAMICS_G = khz(12.0) / 2
DYNAMICS_KAPPA = khz(5.4)
DYNAMICS_DURATION = us(1000.0)


@dataclass(frozen=True)
class SweepParams:
    delta_start: float = SWEEP_DELTA_START
    delta_end: float = SWEEP_DELTA_END
    duration: float = SWEEP_DURATION
    g_peak: float = SWEEP_G_PEAK
    edge_factor: float = SWEEP_EDGE_FACTOR
    kappa: float = SWEEP_KAPPA

    def __post_init__(self):
        if not 0.0 < self.edge_factor < 1.0:
            raise ValueError(f"edge_factor must lie in (0, 1), got {self.edge_factor}")
        if self.duration <= 0 or self.g_peak < 0:
            raise ValueError("duration must be > 0 and g_peak >= 0")

    @property
    def sigma(self):
        """Gaussian width giving ``g(0) = g(T) = edge_factor * g_peak``."""
        return 0.5 * self.duration / math.sqrt(2.0 * math.log(1.0 / self.edge_factor))


@dataclass(frozen=True)
class DynamicsParams:
    g: float = DYNAMICS_G
    kappa: float = DYNAMICS_KAPPA
    duration: float = DYNAMICS_DURATION
    detuning: float = 0.0

    def __post_init__(self):
        if self.g <= 0 or self.duration <= 0:
            raise ValueError("g and duration must be > 0")


def _grid(duration, n_samples):
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    grid = np.linspace(0.0, duration, n_samples)
    grid[-1] = duration
    return grid


def sweep_schedule(p=None, n_samples=961):
    """JC schedule with a linear detuning ramp and a Gaussian coupling envelope."""
    p = SweepParams() if p is None else p
    t_mid, sigma = 0.5 * p.duration, p.sigma
    slope = (p.delta_end - p.delta_start) / p.duration

    def delta_of_t(t):
        return p.delta_start + slope * t

    def g_of_t(t):
        return p.g_peak * math.exp(-((t - t_mid) ** 2) / (2.0 * sigma**2))

    return Schedule(p.duration, _grid(p.duration, n_samples), delta_of_t, g_of_t, p.kappa,
                    CouplingKind.JC)


def dynamics_schedule(p=None, n_samples=501):
    """Constant anti-JC coupling on (or offset from) blue-sideband resonance."""
    p = DynamicsParams() if p is None else p
    delta, g = float(p.detuning), float(p.g)
    return Schedule(p.duration, _grid(p.duration, n_samples), lambda t: delta, lambda t: g,
                    p.kappa, CouplingKind.ANTI_JC)


# --- reference states -------------------------------------------------------

R2 = math.sqrt(2.0)


def _state(basis, amplitudes):
    try:
        return StateVector.from_labels(basis, amplitudes)
    except BasisError as exc:
        raise BasisError(f"reference state does not fit the basis: {exc}") from None


def state_atI(basis):
    """Atomic insulator ``|ee;00>``."""
    return _state(basis, {(1, 1, 0, 0): 1.0})


def _phsf_amplitudes():
    # |gg> (x) a_r^dag^2 |00> / sqrt 2
    return {(0, 0, 1, 1): 1 / R2, (0, 0, 2, 0): -0.5, (0, 0, 0, 2): -0.5}


def state_phSF(basis):
    """Phonon superfluid: two rocking-mode phonons, both atoms in g."""
    if basis.n_max < 2:
        raise BasisError("phonon superfluid state needs n_max >= 2")
    return _state(basis, _phsf_amplitudes())


def state_polaritonicSF(basis):
    """Approximate polaritonic superfluid midway through the sweep."""
    if basis.n_max < 2:
        raise BasisError("polaritonic superfluid state needs n_max >= 2")
    amps = {k: v / math.sqrt(3.0) for k, v in _phsf_amplitudes().items()}
    amps[(1, 1, 0, 0)] = 1 / math.sqrt(6.0)
    c = 1 / (2 * R2)
    amps[(1, 0, 1, 0)] = c
    amps[(0, 1, 0, 1)] = c
    amps[(1, 0, 0, 1)] = -c
    amps[(0, 1, 1, 0)] = -c
    return _state(basis, amps)


def reference_tracks(basis):
    """Start and end states of the three lowest sweep levels.

    Returns ``[(start, end), ...]`` from lowest to third lowest, as
    identified when sweeping from large negative to large positive
    detuning.
    """
    h = 0.5  # 1/sqrt2 for the atoms times 1/sqrt2 for a_r^dag|00>
    sym_atoms_rock = {(0, 1, 1, 0): h, (0, 1, 0, 1): -h, (1, 0, 1, 0): h, (1, 0, 0, 1): -h}
    anti_atoms_rock = {(0, 1, 1, 0): h, (0, 1, 0, 1): -h, (1, 0, 1, 0): -h, (1, 0, 0, 1): h}
    # a_c^dag a_r^dag |00> = (|20> - |02>) / sqrt2
    com_rock = {(0, 0, 2, 0): 1 / R2, (0, 0, 0, 2): -1 / R2}
    # a_c^dag^2 |00> / sqrt2
    com_com = {(0, 0, 1, 1): 1 / R2, (0, 0, 2, 0): 0.5, (0, 0, 0, 2): 0.5}
    return [
        (state_atI(basis), state_phSF(basis)),
        (_state(basis, sym_atoms_rock), _state(basis, com_rock)),
        (_state(basis, anti_atoms_rock), _state(basis, com_com)),
    ]


TRACK_NAMES = (
    ("atI", "phSF"),
    ("(ge+eg)a_r", "gg a_c a_r"),
    ("(ge-eg)a_r", "gg a_c^2"),
)
