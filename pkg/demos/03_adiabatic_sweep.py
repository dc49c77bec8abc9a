"""
Adiabatic sweep from the atomic insulator to the phonon superfluid
==================================================================

The detuning ramps linearly while the coupling follows a Gaussian
envelope. The state follows the ground level and ends with two
rocking-mode phonons.
"""

from jchsim import (
    collective_occupations,
    evolve,
    fidelity,
    ground_state_leakage,
    instantaneous_spectrum,
    sector_basis,
    state_atI,
    state_phSF,
    sweep_schedule,
    variance_report,
)
from jchsim.protocol import SweepParams
from jchsim.observables import adiabatic_leakage_estimate

basis = sector_basis(2)
schedule = sweep_schedule(n_samples=961)
print(f"{schedule.duration * 1e6:.0f} us sweep, envelope width {SweepParams().sigma * 1e6:.0f} us")

traj = evolve(schedule, state_atI(basis), step=0.25e-6)
final = traj.final
print(f"fidelity with phSF at the end: {fidelity(final, state_phSF(basis)):.4f}")
print("(n_com, n_rock) at the end: (%.4f, %.4f)" % collective_occupations(final))
rep = variance_report(final, 1)
print(f"site 1 variances: atomic {rep.var_a:.4f}, phonon {rep.var_p:.4f}")

## Leakage out of the instantaneous ground level
track = instantaneous_spectrum(schedule)
leak = ground_state_leakage(traj, track)
est = adiabatic_leakage_estimate(schedule, track)
print(f"direct projection: max {leak.max_total:.4f}, end {leak.total[-1]:.4f}, "
      f"dominant level {leak.dominant_level}")
print(f"first-order adiabatic estimate: max {est.max_total:.4f}, "
      f"dominant level {est.dominant_level}")
