import itertools
from functools import reduce
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braggspec.errors import CapacityError, DegeneracyWarning
from braggspec.hilbert import (build_basis, build_hamiltonian, build_probe_operator,
                               ground_state, hamiltonian_entries)
from braggspec.lattice import CouplingCoefficients, HubbardParams

D0 = 413e-9


def coeffs(theta, j0=0.9 + 0.1j, j1=0.05 - 0.02j):
    return CouplingCoefficients(j0, j1, (theta / D0, 0.0, 0.0))


def brute_force(M, N, J, U, mu, c, periodic=True):
    """H and T(q) from kron products on the full (N+1)^M space, projected to fixed N.

    Returns the matrices in the row order of ``build_basis(M, N)``.
    """
    d = N + 1
    a = np.diag(np.sqrt(np.arange(1, d)), 1)  # truncated annihilator
    eye = np.eye(d)

    def site(op, l):
        return reduce(np.kron, [op if k == l else eye for k in range(M)])

    b = [site(a, l) for l in range(M)]
    n = [bl.conj().T @ bl for bl in b]
    bonds = [(l, (l + 1) % M) for l in range(M if periodic else M - 1) if M > 1]
    H = sum(0.5 * U * nl @ (nl - np.eye(d**M)) - mu * nl for nl in n)
    hop = sum(b[l].conj().T @ b[r] + b[r].conj().T @ b[l] for l, r in bonds)
    H = H - J * hop
    phase = np.exp(1j * c.q[0] * D0 * np.arange(M))
    T = sum(phase[l] * c.j0 * n[l] for l in range(M))
    T = T + sum(phase[l] * c.j1 * (b[l].conj().T @ b[r] + b[r].conj().T @ b[l]) for l, r in bonds)

    basis = build_basis(M, N)
    # full-space index of an occupation tuple: site 0 is the most significant digit
    idx = [sum(o * d ** (M - 1 - k) for k, o in enumerate(occ)) for occ in basis.states]
    return H[np.ix_(idx, idx)], T[np.ix_(idx, idx)]


@pytest.mark.parametrize("M,N,dim", [(2, 1, 2), (3, 2, 6), (3, 3, 10), (7, 7, 1716)])
def test_basis_dimension(M, N, dim):
    assert build_basis(M, N).dim == dim == comb(N + M - 1, N)


def test_basis_order_and_lookup():
    basis = build_basis(3, 2)
    assert [tuple(s) for s in basis.states] == [
        (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    brute = sorted((s for s in itertools.product(range(3), repeat=3) if sum(s) == 2), reverse=True)
    assert [tuple(s) for s in basis.states] == brute
    for i, s in enumerate(basis.states):
        assert basis.lookup(s) == i


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_basis(12, 12, cap=1000)


@pytest.mark.parametrize("M", [1, 2, 3, 4])
@pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
def test_matches_brute_force(M, N):
    J, U, mu = 0.37, 1.9, 0.21
    c = coeffs(0.83)
    Hb, Tb = brute_force(M, N, J, U, mu, c)
    basis = build_basis(M, N)
    H = hamiltonian_entries(basis, J, U, mu)
    T = build_probe_operator(basis, c, D0).toarray()
    assert np.max(np.abs(H - Hb)) < 1e-12
    assert np.max(np.abs(T - Tb)) < 1e-12


def test_open_chain_matches_brute_force():
    c = coeffs(1.1)
    Hb, Tb = brute_force(4, 3, 0.5, 1.3, 0.0, c, periodic=False)
    basis = build_basis(4, 3, periodic=False)
    assert np.max(np.abs(hamiltonian_entries(basis, 0.5, 1.3, 0.0) - Hb)) < 1e-12
    assert np.max(np.abs(build_probe_operator(basis, c, D0).toarray() - Tb)) < 1e-12


def test_two_sites_two_atoms_closed_form():
    J, U, mu = 0.3, 1.7, 0.4
    h = build_hamiltonian(build_basis(2, 2), HubbardParams(J, U, mu, 1))
    root = np.sqrt(U**2 / 4 + 16 * J**2)  # the ring of two sites has a doubled bond
    expected = np.sort([U / 2 - root, U, U / 2 + root]) - 2 * mu
    assert np.allclose(h.eigenvalues, expected, atol=1e-10)


def test_no_hopping_energies():
    U = 2.0
    h = build_hamiltonian(build_basis(3, 6), HubbardParams(0.0, U, 0.0, 2))
    occ = build_basis(3, 6).states
    assert np.allclose(np.sort(h.eigenvalues), np.sort(0.5 * U * (occ * (occ - 1)).sum(1)))
    E, v = ground_state(h)
    assert E == pytest.approx(3 * U)
    assert np.allclose(np.abs(v), build_basis(3, 6).fock_vector([2, 2, 2]))


@pytest.mark.parametrize("M", [3, 5, 7])
def test_single_particle_ring(M):
    J, mu = 0.7, 0.1
    h = build_hamiltonian(build_basis(M, 1), HubbardParams(J, 0.0, mu, 1))
    expected = -2 * J * np.cos(2 * np.pi * np.arange(M) / M) - mu
    assert np.allclose(h.eigenvalues, np.sort(expected), atol=1e-12)


def test_noninteracting_ground_energy():
    J, N = 0.5, 4
    h = build_hamiltonian(build_basis(4, N), HubbardParams(J, 0.0, 0.0, 1))
    assert ground_state(h)[0] == pytest.approx(-2 * J * N)


def test_ground_state_phase_and_degeneracy_warning():
    h = build_hamiltonian(build_basis(3, 3), HubbardParams(0.2, 1.0, 0.0, 1))
    _, v = ground_state(h)
    first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    assert first.real > 0 and abs(first.imag) < 1e-15
    with pytest.warns(DegeneracyWarning):
        ground_state(build_hamiltonian(build_basis(3, 1), HubbardParams(0.0, 1.0, 0.0, 1)))


def test_probe_operator_without_light_hopping_at_zero_momentum():
    basis = build_basis(3, 3)
    T = build_probe_operator(basis, coeffs(0.0, j0=0.8), D0, include_j1=False).toarray()
    assert np.allclose(T, 0.8 * 3 * np.eye(basis.dim))


def test_probe_expectation_in_mott_state():
    basis = build_basis(4, 8)
    theta = 0.9
    c = coeffs(theta)
    T = build_probe_operator(basis, c, D0).toarray()
    v = basis.fock_vector([2, 2, 2, 2])
    expected = 2 * c.j0 * np.exp(1j * theta * np.arange(4)).sum()
    assert v @ T @ v == pytest.approx(expected)


def test_hermitian_and_momentum_selection():
    """T(q) changes the ring momentum by q: S^-1 T(q) S = e^{i theta} T(q), S the site shift."""
    M, N = 5, 4
    basis = build_basis(M, N)
    theta = 2 * np.pi * 2 / M
    Tq = build_probe_operator(basis, coeffs(theta), D0).entries
    S = basis.translation
    lhs = (S.T @ Tq @ S).toarray()
    assert np.allclose(lhs, np.exp(1j * theta) * Tq.toarray(), atol=1e-12)
    H = hamiltonian_entries(basis, 0.4, 1.1, 0.0)
    assert np.allclose(H, H.T)
    assert np.allclose(S.T @ H @ S, H)


@settings(max_examples=20, deadline=None)
@given(J=st.floats(0.0, 2.0), U=st.floats(0.0, 5.0), theta=st.floats(0, 2 * np.pi))
def test_completeness(J, U, theta):
    basis = build_basis(3, 3)
    h = build_hamiltonian(basis, HubbardParams(J, U, 0.0, 1))
    t = build_probe_operator(basis, coeffs(theta), D0)
    v = h.eigenvectors[:, 0]
    Tv = t.entries @ v
    amps = h.eigenvectors.conj().T @ Tv
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(np.vdot(Tv, Tv).real, rel=1e-10)
    assert np.allclose(h.eigenvectors.conj().T @ h.eigenvectors, np.eye(basis.dim), atol=1e-10)
