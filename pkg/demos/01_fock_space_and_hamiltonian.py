"""
Fock space and the two-site Hamiltonian
=======================================

Builds the truncated basis, restricts it to the two-excitation sector and
checks what the Hamiltonian conserves.
"""

import numpy as np

from jchsim import (
    JCHParams,
    TrapConfig,
    full_basis,
    hopping_rate,
    jch_hamiltonian,
    sector_basis,
)
from jchsim.model import conserved_number_operator
from jchsim.units import khz, mhz

## Basis sizes
full = full_basis(5)
sector = sector_basis(2)
print("full space, n_max = 5:", full.dim, "states")
print("two-excitation sector:", sector.dim, "states")
for s in sector.states:
    print("   ", s.label())

## Hopping rate from the trap
trap = TrapConfig(omega_x=mhz(2.1), omega_z=mhz(0.17))
print(f"ion spacing {trap.d0 * 1e6:.2f} um, kappa/2pi = {hopping_rate(trap) / khz(1):.3f} kHz")

## The Hamiltonian conserves the total excitation number
h = jch_hamiltonian(JCHParams(delta=khz(9), g=khz(7), kappa=hopping_rate(trap)), full)
n_total = conserved_number_operator(full, "jc")
print("||[H, N]|| =", h.commutator_norm(n_total))

## Sector spectrum in kHz
hs = jch_hamiltonian(JCHParams(delta=khz(9), g=khz(7), kappa=khz(6)), sector)
print(np.round(np.linalg.eigvalsh(hs.matrix) / khz(1), 3))
