"""
Sideband thermometry of the collective modes
============================================

Generates red and blue sideband spectra for thermal COM and rocking
modes, fits them with Gaussians and reads the mean occupations back from
the red/blue height ratio.
"""

from jchsim import (
    Probe,
    TrapConfig,
    collective_mode_frequencies,
    fit_sideband_spectrum,
    nbar_from_ratio,
    sideband_spectrum,
)
from jchsim.spectroscopy import match_peaks
from jchsim.units import khz, mhz, us

modes = collective_mode_frequencies(TrapConfig(omega_x=mhz(2.1), omega_z=mhz(0.17)))
probe = Probe(rabi=khz(2.0), pulse=us(30), linewidth=khz(1.0))

for label, occupations in (("before sweep", (0.09, 0.04)), ("after sweep", (0.15, 1.58))):
    heights = {}
    for side, sign in (("red", -1), ("blue", 1)):
        data = sideband_spectrum(occupations, probe, side, modes)
        centers = [sign * w for w in modes]
        fit = fit_sideband_spectrum(data, 2, [(c, 0.05, probe.linewidth) for c in centers])
        heights[side] = [pk.height for pk in match_peaks(fit.peaks, centers)]
    nbar = [nbar_from_ratio(r, b) for r, b in zip(heights["red"], heights["blue"])]
    print(f"{label}: generated (COM, rock) = {occupations}, "
          f"recovered ({nbar[0]:.3f}, {nbar[1]:.3f})")
