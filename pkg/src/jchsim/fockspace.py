"""Truncated two-site spin-Fock Hilbert space.

Each site carries a two-level atom (0 = g, 1 = e) and a phonon mode
truncated at ``n_max`` quanta. Basis states are ordered lexicographically
on ``(atom1, atom2, phonon1, phonon2)``.

A basis may be restricted to a single excitation-number sector. Which
number is conserved depends on the coupling: for the red-sideband (JC)
coupling it is ``sum(phonon + atom)``, for the blue-sideband (anti-JC)
coupling it is ``sum(phonon + (1 - atom))``.
"""

import enum
import itertools
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

N_SITES = 2


class CouplingKind(str, enum.Enum):
    JC = "jc"
    ANTI_JC = "anti-jc"


class BasisState(NamedTuple):
    """Product ket ``|atom1, atom2; phonon1, phonon2>``."""

    atom1: int
    atom2: int
    phonon1: int
    phonon2: int

    @property
    def atoms(self):
        return (self.atom1, self.atom2)

    @property
    def phonons(self):
        return (self.phonon1, self.phonon2)

    def label(self):
        letters = "".join("ge"[a] for a in self.atoms)
        return f"|{letters};{self.phonon1}{self.phonon2}>"

    def swapped_atoms(self):
        """Relabel g <-> e on both sites."""
        return BasisState(1 - self.atom1, 1 - self.atom2, self.phonon1, self.phonon2)


class BasisError(ValueError):
    pass


def conserved_number(state, kind):
    kind = CouplingKind(kind)
    n_phonons = state.phonon1 + state.phonon2
    if kind is CouplingKind.JC:
        return n_phonons + state.atom1 + state.atom2
    return n_phonons + (1 - state.atom1) + (1 - state.atom2)


@dataclass(frozen=True)
class TruncationConfig:
    """Truncation of the two-site space.

    ``sector`` selects a single conserved-excitation sector of the given
    coupling ``kind``; ``None`` keeps the full tensor-product space.
    """

    n_max: int = 5
    sector: int | None = None
    kind: CouplingKind = CouplingKind.JC
    n_sites: int = N_SITES

    def __post_init__(self):
        if self.n_sites != N_SITES:
            raise BasisError(f"only two-site chains are supported, got n_sites={self.n_sites}")
        if self.n_max < 0:
            raise BasisError(f"n_max must be >= 0, got {self.n_max}")
        object.__setattr__(self, "kind", CouplingKind(self.kind))
        if self.sector is not None:
            if self.sector < 0:
                raise BasisError(f"sector must be >= 0, got {self.sector}")
            if self.sector > 2 * self.n_max + 2:
                raise BasisError(
                    f"empty sector: N={self.sector} exceeds the maximum "
                    f"2*n_max+2={2 * self.n_max + 2}"
                )
            if self.n_max < self.sector:
                warnings.warn(
                    f"n_max={self.n_max} < sector N={self.sector}: "
                    "part of the sector is truncated away",
                    stacklevel=3,
                )


@dataclass(frozen=True, eq=False)
class Basis:
    states: tuple
    n_max: int
    sector: int | None = None
    kind: CouplingKind = CouplingKind.JC
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.states)})

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        if not isinstance(other, Basis):
            return NotImplemented
        return self is other or (
            self.n_max == other.n_max
            and self.sector == other.sector
            and (self.sector is None or self.kind == other.kind)
            and self.states == other.states
        )

    def __hash__(self):
        return hash((self.n_max, self.sector, self.states))

    @property
    def dim(self):
        return len(self.states)

    @property
    def is_full(self):
        return self.sector is None

    def position(self, state):
        return self.index[BasisState(*state)]

    def column(self, attr):
        """Integer array of one BasisState field over the basis, e.g. ``'phonon1'``."""
        return np.array([getattr(s, attr) for s in self.states], dtype=int)


def build_basis(cfg):
    """Enumerate the basis described by a :class:`TruncationConfig`."""
    levels = range(cfg.n_max + 1)
    states = []
    for a1, a2, n1, n2 in itertools.product((0, 1), (0, 1), levels, levels):
        s = BasisState(a1, a2, n1, n2)
        if cfg.sector is None or conserved_number(s, cfg.kind) == cfg.sector:
            states.append(s)
    return Basis(tuple(states), cfg.n_max, cfg.sector, cfg.kind)


def full_basis(n_max=5):
    return build_basis(TruncationConfig(n_max=n_max))


def sector_basis(sector, kind=CouplingKind.JC, n_max=None):
    if n_max is None:
        n_max = max(sector, 0)
    return build_basis(TruncationConfig(n_max=n_max, sector=sector, kind=kind))


class StateVector:
    """Complex amplitude vector over a :class:`Basis`. Immutable."""

    __slots__ = ("basis", "amplitudes")

    def __init__(self, basis, amplitudes):
        amps = np.array(amplitudes, dtype=complex)
        if amps.shape != (basis.dim,):
            raise BasisError(f"expected {basis.dim} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    def __repr__(self):
        return f"StateVector(dim={self.basis.dim}, norm={self.norm():.12g})"

    @classmethod
    def from_labels(cls, basis, amplitudes, normalize=False):
        """Build from a mapping ``{(a1, a2, n1, n2): amplitude}``.

        Labels outside the basis raise :class:`BasisError`.
        """
        amps = np.zeros(basis.dim, dtype=complex)
        for label, amp in amplitudes.items():
            key = BasisState(*label)
            if key not in basis.index:
                raise BasisError(f"{key.label()} is not in the basis")
            amps[basis.index[key]] += amp
        psi = cls(basis, amps)
        return psi.normalized() if normalize else psi

    @classmethod
    def basis_state(cls, basis, label):
        return cls.from_labels(basis, {tuple(label): 1.0})

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise BasisError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def amplitude(self, label):
        return self.amplitudes[self.basis.index[BasisState(*label)]]

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def transfer(self, basis):
        """Re-express on another basis by matching labels.

        Amplitudes on states missing from ``basis`` are dropped without
        renormalizing, so the result's norm shows what was lost.
        """
        amps = np.zeros(basis.dim, dtype=complex)
        for s, a in zip(self.basis.states, self.amplitudes):
            j = basis.index.get(s)
            if j is not None:
                amps[j] = a
        return StateVector(basis, amps)


def _check_same_basis(a, b):
    if a.basis != b.basis:
        raise BasisError("states live on different bases")


def inner(a, b):
    """``<a|b>``."""
    _check_same_basis(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a, b):
    """Overlap probability ``|<a|b>|**2`` of two states on the same basis."""
    f = abs(inner(a, b)) ** 2
    return float(min(max(f, 0.0), 1.0))


def sector_projection(state, n, kind):
    """Probability weight of ``state`` in the conserved sector ``n`` of ``kind``."""
    weights = state.probabilities()
    mask = np.array([conserved_number(s, kind) == n for s in state.basis.states])
    return float(weights[mask].sum())
