"""Two-ion Jaynes-Cummings-Hubbard Hamiltonian and trap-derived rates.

With hbar = 1 the Hamiltonian (in rad/s) is::

    H = delta * sum_j |e_j><e_j|
        + g * sum_j (a_j^dag sigma_j^- + a_j sigma_j^+)
        + (kappa / 2) * (a_1^dag a_2 + a_2^dag a_1)

for the red-sideband (JC) coupling. The blue-sideband (anti-JC) variant is
the same operator with g and e interchanged on every site, so its detuning
term multiplies ``|g_j><g_j|`` and its coupling is
``a_j^dag sigma_j^+ + a_j sigma_j^-``.

Matrices are dense. Matrix elements that would leave the basis (raise a
phonon number above ``n_max`` or leave a restricted sector) are dropped.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .fockspace import Basis, BasisError, BasisState, CouplingKind

CA40_MASS = 39.962590863 * constants.atomic_mass - constants.electron_mass
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class TrapConfig:
    """Linear Paul trap holding two ions.

    Frequencies are angular (rad/s). ``d0`` defaults to the two-ion
    equilibrium separation set by ``omega_z``.
    """

    omega_x: float
    omega_z: float
    ion_mass: float = CA40_MASS
    charge: float = constants.e
    d0: float | None = None

    def __post_init__(self):
        if not self.omega_x > self.omega_z >= 0:
            raise ValueError(
                f"need omega_x > omega_z >= 0 for a linear chain, got "
                f"omega_x={self.omega_x}, omega_z={self.omega_z}"
            )
        if self.d0 is None:
            if self.omega_z == 0:
                raise ValueError("d0 must be given when omega_z = 0")
            object.__setattr__(self, "d0", equilibrium_distance(self))


@dataclass(frozen=True)
class JCHParams:
    delta: float = 0.0
    g: float = 0.0
    kappa: float = 0.0
    kind: CouplingKind = CouplingKind.JC

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        object.__setattr__(self, "kind", CouplingKind(self.kind))


class HermitianOperator:
    """Dense Hermitian matrix over a :class:`Basis`."""

    __slots__ = ("basis", "matrix")

    def __init__(self, basis, matrix, check=True):
        m = np.asarray(matrix)
        if m.shape != (basis.dim, basis.dim):
            raise BasisError(f"matrix shape {m.shape} does not match basis dim {basis.dim}")
        if check:
            err = hermiticity_error(m)
            if err > HERMITICITY_TOL * max(1.0, float(np.abs(m).max(initial=0.0))):
                raise ValueError(f"operator is not Hermitian (max |M - M^dag| = {err:.3g})")
        m = m.copy()
        m.setflags(write=False)
        self.basis = basis
        self.matrix = m

    def __repr__(self):
        return f"HermitianOperator(dim={self.basis.dim})"

    def __add__(self, other):
        _same_basis(self, other)
        return HermitianOperator(self.basis, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        _same_basis(self, other)
        return HermitianOperator(self.basis, self.matrix - other.matrix, check=False)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            raise TypeError("only real scalars keep an operator Hermitian")
        return HermitianOperator(self.basis, float(scalar) * self.matrix, check=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, HermitianOperator):
            _same_basis(self, other)
            return self.matrix @ other.matrix
        return self.matrix @ other

    def commutator_norm(self, other):
        """Max-entry norm of ``[self, other]``."""
        _same_basis(self, other)
        a, b = self.matrix, other.matrix
        return float(np.abs(a @ b - b @ a).max(initial=0.0))


def _same_basis(a, b):
    if a.basis != b.basis:
        raise BasisError("operators live on different bases")


def hermiticity_error(matrix):
    m = np.asarray(matrix)
    return float(np.abs(m - m.conj().T).max(initial=0.0))


# --- trap-derived rates -----------------------------------------------------


def equilibrium_distance(trap):
    """Two-ion separation with ``d0**3 = q**2 / (2 pi eps0 m omega_z**2)``."""
    num = trap.charge**2
    den = 2.0 * math.pi * constants.epsilon_0 * trap.ion_mass * trap.omega_z**2
    return (num / den) ** (1.0 / 3.0)


def hopping_rate(trap):
    """Radial phonon hopping rate ``kappa = q**2 / (4 pi eps0 d0**3 m omega_x)``.

    For the equilibrium ``d0`` this equals ``omega_z**2 / (2 omega_x)``.
    """
    return trap.charge**2 / (
        4.0 * math.pi * constants.epsilon_0 * trap.d0**3 * trap.ion_mass * trap.omega_x
    )


def hopping_rate_axial(trap):
    """``omega_z**2 / (2 omega_x)``, the same rate written with the axial frequency."""
    return trap.omega_z**2 / (2.0 * trap.omega_x)


def radial_correction(trap):
    """Coulomb shift of the local radial frequency, ``-kappa / 2``."""
    return -0.5 * hopping_rate(trap)


def collective_mode_frequencies(trap):
    """``(omega_com, omega_rock)``: local frequency ``omega_x - kappa/2`` split by ``+-kappa/2``."""
    kappa = hopping_rate(trap)
    local = trap.omega_x + radial_correction(trap)
    return local + 0.5 * kappa, local - 0.5 * kappa


def jc_coupling(eta, omega0):
    """Red-sideband coupling ``g = eta * omega0 / 2``."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"Lamb-Dicke factor must lie in [0, 1), got {eta}")
    if omega0 < 0:
        raise ValueError(f"omega0 must be >= 0, got {omega0}")
    return 0.5 * eta * omega0


# --- operators --------------------------------------------------------------


def _site_index(site):
    if site not in (1, 2):
        raise ValueError(f"site must be 1 or 2, got {site!r}")
    return site - 1


def _check_kind(basis, kind):
    if basis.sector is not None and CouplingKind(basis.kind) is not CouplingKind(kind):
        raise BasisError(
            f"sector/kind mismatch: basis conserves the {basis.kind.value} number, "
            f"Hamiltonian is {CouplingKind(kind).value}"
        )


def hamiltonian_terms(basis, kind=CouplingKind.JC):
    """Unit-coefficient pieces ``(detuning, coupling, hopping)`` of the Hamiltonian.

    ``H = delta * detuning + g * coupling + kappa * hopping``. All three are
    real symmetric arrays.
    """
    kind = CouplingKind(kind)
    _check_kind(basis, kind)
    dim = basis.dim
    detuning = np.zeros((dim, dim))
    coupling = np.zeros((dim, dim))
    hopping = np.zeros((dim, dim))
    # the atomic level whose population the detuning term counts
    lit = 1 if kind is CouplingKind.JC else 0
    for i, s in enumerate(basis.states):
        atoms, phonons = list(s.atoms), list(s.phonons)
        detuning[i, i] = sum(a == lit for a in atoms)
        for j in range(2):
            # flip atom j away from the lit level while adding a phonon
            if atoms[j] == lit:
                a2, n2 = atoms.copy(), phonons.copy()
                a2[j] = 1 - lit
                n2[j] += 1
                k = basis.index.get(BasisState(a2[0], a2[1], n2[0], n2[1]))
                if k is not None:
                    amp = math.sqrt(n2[j])
                    coupling[k, i] += amp
                    coupling[i, k] += amp
        # a_2^dag a_1 moves one phonon from site 1 to site 2
        if phonons[0] > 0:
            k = basis.index.get(BasisState(atoms[0], atoms[1], phonons[0] - 1, phonons[1] + 1))
            if k is not None:
                amp = 0.5 * math.sqrt(phonons[0] * (phonons[1] + 1))
                hopping[k, i] += amp
                hopping[i, k] += amp
    return detuning, coupling, hopping


def hamiltonian(params, basis):
    """JCH Hamiltonian for either coupling kind, as selected by ``params.kind``."""
    detuning, coupling, hopping = hamiltonian_terms(basis, params.kind)
    m = params.delta * detuning + params.g * coupling + params.kappa * hopping
    return HermitianOperator(basis, m, check=False)


def jch_hamiltonian(params, basis):
    """Red-sideband JCH Hamiltonian; ``params.kind`` is ignored."""
    p = JCHParams(params.delta, params.g, params.kappa, CouplingKind.JC)
    return hamiltonian(p, basis)


def anti_jc_hamiltonian(params, basis):
    """Blue-sideband Hamiltonian; ``params.kind`` is ignored."""
    p = JCHParams(params.delta, params.g, params.kappa, CouplingKind.ANTI_JC)
    return hamiltonian(p, basis)


def conserved_number_operator(basis, kind=CouplingKind.JC):
    from .fockspace import conserved_number

    diag = [conserved_number(s, kind) for s in basis.states]
    return HermitianOperator(basis, np.diag(np.array(diag, dtype=float)), check=False)


def number_operators(basis, site):
    """``(N_j, N_a_j, N_p_j)``: total, atomic and phonon excitation numbers on a site."""
    j = _site_index(site)
    atom = basis.column(f"atom{j + 1}").astype(float)
    phonon = basis.column(f"phonon{j + 1}").astype(float)
    n_a = HermitianOperator(basis, np.diag(atom), check=False)
    n_p = HermitianOperator(basis, np.diag(phonon), check=False)
    return n_a + n_p, n_a, n_p


def exchange_operator(basis):
    """Permutation matrix swapping the two sites (atoms and phonons together)."""
    dim = basis.dim
    p = np.zeros((dim, dim))
    for i, s in enumerate(basis.states):
        k = basis.index.get(BasisState(s.atom2, s.atom1, s.phonon2, s.phonon1))
        if k is None:
            raise BasisError("basis is not closed under site exchange")
        p[k, i] = 1.0
    return HermitianOperator(basis, p, check=False)


def atom_relabel_permutation(source, target):
    """Matrix ``P`` with ``P[target(s'), source(s)] = 1`` where ``s'`` is ``s`` with g<->e swapped."""
    p = np.zeros((target.dim, source.dim))
    for i, s in enumerate(source.states):
        k = target.index.get(s.swapped_atoms())
        if k is not None:
            p[k, i] = 1.0
    return p


def annihilation(basis, site):
    """Phonon annihilation operator ``a_j`` (plain array, not Hermitian)."""
    if not basis.is_full:
        raise BasisError("ladder operators leave a restricted sector; use a full basis")
    j = _site_index(site)
    m = np.zeros((basis.dim, basis.dim))
    for i, s in enumerate(basis.states):
        n = s.phonons[j]
        if n > 0:
            lowered = list(s)
            lowered[2 + j] -= 1
            m[basis.index[BasisState(*lowered)], i] = math.sqrt(n)
    return m


def collective_mode_ops(basis):
    """``(a_c, a_r)``: COM ``(a_1 + a_2)/sqrt 2`` and rocking ``(a_1 - a_2)/sqrt 2`` annihilators."""
    a1, a2 = annihilation(basis, 1), annihilation(basis, 2)
    r2 = math.sqrt(2.0)
    return (a1 + a2) / r2, (a1 - a2) / r2


def collective_number_operators(basis):
    """``(N_com, N_rock)`` built directly from number-conserving matrix elements.

    ``N_com = (n_1 + n_2 + X) / 2`` and ``N_rock = (n_1 + n_2 - X) / 2`` with
    ``X = a_1^dag a_2 + a_2^dag a_1``, so they are exact on sector bases too.
    """
    _, _, hopping = hamiltonian_terms(basis, basis.kind)
    exchange = 2.0 * hopping
    total = np.diag((basis.column("phonon1") + basis.column("phonon2")).astype(float))
    n_com = HermitianOperator(basis, 0.5 * (total + exchange), check=False)
    n_rock = HermitianOperator(basis, 0.5 * (total - exchange), check=False)
    return n_com, n_rock
