import numpy as np
import pytest

from jchsim.fockspace import CouplingKind, full_basis, sector_basis

# filled by test_acceptance, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def kron_ops(n_max):
    """Independent operator algebra on the full space via Kronecker products.

    Factor order (atom1, atom2, phonon1, phonon2) reproduces the package's
    lexicographic basis order. Atom index 0 = g, 1 = e.
    """
    d = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, d)), k=1)
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g|
    sm = sp.T
    pe = np.diag([0.0, 1.0])
    pg = np.diag([1.0, 0.0])
    i2, ip = np.eye(2), np.eye(d)

    def k(*ops):
        out = np.array([[1.0]])
        for op in ops:
            out = np.kron(out, op)
        return out

    return {
        "a1": k(i2, i2, a, ip),
        "a2": k(i2, i2, ip, a),
        "sp1": k(sp, i2, ip, ip),
        "sp2": k(i2, sp, ip, ip),
        "sm1": k(sm, i2, ip, ip),
        "sm2": k(i2, sm, ip, ip),
        "pe1": k(pe, i2, ip, ip),
        "pe2": k(i2, pe, ip, ip),
        "pg1": k(pg, i2, ip, ip),
        "pg2": k(i2, pg, ip, ip),
    }


def kron_hamiltonian(n_max, delta, g, kappa, kind="jc"):
    o = kron_ops(n_max)
    dag = lambda m: m.conj().T  # noqa: E731
    hop = 0.5 * kappa * (dag(o["a1"]) @ o["a2"] + dag(o["a2"]) @ o["a1"])
    if kind == "jc":
        det = delta * (o["pe1"] + o["pe2"])
        cpl = sum(dag(o[f"a{j}"]) @ o[f"sm{j}"] + o[f"a{j}"] @ o[f"sp{j}"] for j in (1, 2))
    else:
        det = delta * (o["pg1"] + o["pg2"])
        cpl = sum(dag(o[f"a{j}"]) @ o[f"sp{j}"] + o[f"a{j}"] @ o[f"sm{j}"] for j in (1, 2))
    return det + g * cpl + hop


def brute_force_states(n_max):
    out = []
    for a1 in (0, 1):
        for a2 in (0, 1):
            for n1 in range(n_max + 1):
                for n2 in range(n_max + 1):
                    out.append((a1, a2, n1, n2))
    return out


@pytest.fixture
def sector2():
    return sector_basis(2, CouplingKind.JC)


@pytest.fixture
def full5():
    return full_basis(5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_state_amplitudes(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
