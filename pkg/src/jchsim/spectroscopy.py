"""Sideband spectra of the two radial collective modes and their analysis.

A synthetic spectrum places one Gaussian line per mode at the mode's red
(``-omega``) or blue (``+omega``) sideband. The line height is the
thermally averaged sideband excitation after a probe pulse::

    red:  sum_n p_n sin^2(Omega sqrt(n)   tau / 2)
    blue: sum_n p_n sin^2(Omega sqrt(n+1) tau / 2)

with ``p_n`` the thermal distribution of mean ``nbar``. Fitting uses
nonlinear least squares on a sum of Gaussians; the mean occupation follows
from the red/blue height ratio ``r = nbar / (nbar + 1)``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .units import khz

CSV_HEADER = ("detuning_khz", "population")
THERMAL_TAIL = 1e-14


class SpectrumFileError(ValueError):
    pass


@dataclass(frozen=True)
class Probe:
    """Sideband Rabi frequency ``rabi`` (rad/s), pulse length (s) and line width (rad/s, Gaussian sigma)."""

    rabi: float
    pulse: float
    linewidth: float

    def __post_init__(self):
        if self.rabi < 0 or self.pulse < 0 or self.linewidth <= 0:
            raise ValueError("need rabi >= 0, pulse >= 0 and linewidth > 0")


@dataclass(frozen=True)
class SpectrumData:
    detunings: np.ndarray
    population: np.ndarray
    side: str = ""

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        p = np.asarray(self.population, dtype=float)
        if d.shape != p.shape or d.ndim != 1:
            raise ValueError("detunings and population must be 1-D arrays of equal length")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "population", p)


@dataclass(frozen=True)
class Peak:
    center: float
    height: float
    width: float


@dataclass(frozen=True)
class FitResult:
    peaks: list
    rms: float
    converged: bool
    message: str = ""
    n_evaluations: int = 0
    params: np.ndarray = field(default=None, repr=False)


def thermal_distribution(nbar, tail=THERMAL_TAIL):
    """Thermal occupation probabilities ``p_n``, cut where the remaining tail drops below ``tail``."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return np.array([1.0])
    q = nbar / (nbar + 1.0)
    # tail beyond n_cut is q**(n_cut + 1)
    n_cut = int(math.ceil(math.log(tail) / math.log(q)))
    n = np.arange(n_cut + 1)
    return (1.0 - q) * q**n


def sideband_strength(nbar, probe, side):
    """Thermally averaged excitation probability on a red or blue sideband."""
    p = thermal_distribution(nbar)
    n = np.arange(p.size)
    if side == "red":
        arg = np.sqrt(n)
    elif side == "blue":
        arg = np.sqrt(n + 1.0)
    else:
        raise ValueError(f"side must be 'red' or 'blue', got {side!r}")
    return float(np.sum(p * np.sin(0.5 * probe.rabi * probe.pulse * arg) ** 2))


def gaussian(x, height, center, width):
    return height * np.exp(-((x - center) ** 2) / (2.0 * width**2))


def default_detunings(mode_frequencies, probe, side, n_points=401):
    """Grid covering both sideband lines with 6 linewidths of margin."""
    sign = -1.0 if side == "red" else 1.0
    centers = sign * np.asarray(mode_frequencies, dtype=float)
    margin = 6.0 * probe.linewidth
    return np.linspace(centers.min() - margin, centers.max() + margin, n_points)


def sideband_spectrum(occupations, probe, side, mode_frequencies, detunings=None):
    """Synthetic red- or blue-sideband spectrum of the (COM, rocking) modes.

    ``occupations`` and ``mode_frequencies`` are ``(com, rock)`` pairs;
    detunings are relative to the carrier in rad/s.
    """
    if side not in ("red", "blue"):
        raise ValueError(f"side must be 'red' or 'blue', got {side!r}")
    if detunings is None:
        detunings = default_detunings(mode_frequencies, probe, side)
    detunings = np.asarray(detunings, dtype=float)
    sign = -1.0 if side == "red" else 1.0
    pop = np.zeros_like(detunings)
    for nbar, omega in zip(occupations, mode_frequencies):
        pop += gaussian(detunings, sideband_strength(nbar, probe, side), sign * omega,
                        probe.linewidth)
    return SpectrumData(detunings, np.clip(pop, 0.0, 1.0), side)


def _model(params, x):
    y = np.zeros_like(x)
    for h, c, w in params.reshape(-1, 3):
        y += gaussian(x, h, c, w)
    return y


def fit_sideband_spectrum(data, n_peaks, guesses, max_iterations=2000):
    """Least-squares fit of ``n_peaks`` Gaussians.

    ``guesses`` is a sequence of ``(center, height, width)`` triples. A fit
    that stops without meeting the tolerances is returned with
    ``converged=False`` rather than raising.
    """
    if n_peaks < 1:
        raise ValueError("n_peaks must be >= 1")
    guesses = list(guesses)
    if len(guesses) != n_peaks:
        raise ValueError(f"expected {n_peaks} initial guesses, got {len(guesses)}")
    x, y = data.detunings, data.population
    if x.size < 3 * n_peaks or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("need finite data with at least 3 points per peak")

    # work in units of the first guessed width to keep the problem well scaled
    scale = abs(float(guesses[0][2])) or 1.0
    xs = x / scale
    p0 = np.array([[h, c / scale, abs(w) / scale] for c, h, w in guesses], dtype=float).ravel()
    lower = np.tile([-np.inf, -np.inf, 1e-9], n_peaks)
    upper = np.tile([np.inf, np.inf, np.inf], n_peaks)
    p0 = np.clip(p0, lower + 1e-12, upper)

    res = least_squares(
        lambda p: _model(p, xs) - y,
        p0,
        bounds=(lower, upper),
        method="trf",
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
        max_nfev=max_iterations,
    )
    peaks = [Peak(center=c * scale, height=h, width=w * scale) for h, c, w in res.x.reshape(-1, 3)]
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return FitResult(peaks, rms, bool(res.success), res.message, int(res.nfev), res.x.copy())


def nbar_from_ratio(p_red, p_blue):
    """Mean occupation from the red/blue sideband ratio, ``r / (1 - r)``."""
    if not 0.0 <= p_red < p_blue:
        raise ValueError(f"need 0 <= p_red < p_blue, got p_red={p_red}, p_blue={p_blue}")
    r = p_red / p_blue
    return r / (1.0 - r)


def match_peaks(peaks, centers):
    """Pick, for each expected center, the fitted peak closest to it."""
    return [min(peaks, key=lambda pk: abs(pk.center - c)) for c in centers]


# --- CSV interface ---------------------------------------------------------------


def read_spectrum_csv(path, side=""):
    """Read ``detuning_khz,population`` rows; ``#`` lines are comments."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.lstrip().startswith("#"))
                if any(cell.strip() for cell in r)]
    if not rows:
        raise SpectrumFileError(f"{path}: no data")
    header = tuple(cell.strip() for cell in rows[0])
    if header != CSV_HEADER:
        raise SpectrumFileError(f"{path}: expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
    if len(rows) < 2:
        raise SpectrumFileError(f"{path}: header but no data rows")
    try:
        values = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise SpectrumFileError(f"{path}: {exc}") from None
    if values.shape[1] != 2:
        raise SpectrumFileError(f"{path}: expected 2 columns")
    return SpectrumData(khz(1.0) * values[:, 0], values[:, 1], side)
