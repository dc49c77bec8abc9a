"""
Instantaneous spectrum and number variances along the sweep
===========================================================

Diagonalises H(t) in the two-excitation sector and follows the exact
ground state. The atomic variance peaks mid-sweep, where the ground state
looks like a polariton superfluid, and the phonon variance settles at 1/2.
"""

import numpy as np

from jchsim import (
    fidelity,
    instantaneous_spectrum,
    sweep_schedule,
    variance_report,
)
from jchsim.observables import estimated_phonon_variance
from jchsim.protocol import TRACK_NAMES, reference_tracks
from jchsim.units import khz

track = instantaneous_spectrum(sweep_schedule(n_samples=97))

## Three lowest levels, identified at both ends
for level, ((start, end), names) in enumerate(zip(reference_tracks(track.basis), TRACK_NAMES)):
    f0 = fidelity(start, track.tracked_vector(0, level))
    f1 = fidelity(end, track.tracked_vector(-1, level))
    print(f"level {level + 1}: {names[0]:>12} ({f0:.3f}) -> {names[1]:<12} ({f1:.3f})")

## Ground-state variances, site 1
print(" t (us)   var_a   var_p   var_tot   bounds            var_p via rocking")
for i in range(0, len(track.times), 8):
    g = track.ground(i)
    r = variance_report(g, 1)
    print(f"{track.times[i] * 1e6:7.0f}  {r.var_a:.3f}   {r.var_p:.3f}   {r.var_total_exact:.3f}"
          f"     [{r.lower:+.3f}, {r.upper:.3f}]   {estimated_phonon_variance(g):.3f}")

print("lowest three energies at the end (kHz):", np.round(track.energies[-1, :3] / khz(1), 2))
