"""Fixed-N Fock space of the Bose-Hubbard ring and operators on it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import CapacityError, DegeneracyWarning, ShapeError
from .lattice import CouplingCoefficients, HubbardParams

DEFAULT_BASIS_CAP = 2_000_000


def _compositions(N, M):
    """All occupation tuples of length M summing to N, lexicographically descending."""
    if M == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(N - first, M - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class FockBasis:
    M: int
    N: int
    states: np.ndarray  # (dim, M) int occupations
    index: dict = field(repr=False)
    periodic: bool = True

    @property
    def dim(self) -> int:
        return len(self.states)

    def lookup(self, occupations) -> int:
        return self.index[tuple(int(n) for n in occupations)]

    def fock_vector(self, occupations) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.lookup(occupations)] = 1.0
        return v

    def bonds(self):
        """Nearest-neighbor pairs (l, l+1); the ring closes with (M-1, 0) if periodic.

        A single site has no bonds.
        """
        last = self.M if self.periodic and self.M > 1 else self.M - 1
        return [(l, (l + 1) % self.M) for l in range(last)]

    @cached_property
    def number_diagonals(self) -> np.ndarray:
        """(M, dim) array of n_l eigenvalues."""
        return self.states.T.astype(float)

    @cached_property
    def bond_operators(self) -> list:
        """Sparse b_l^dag b_{l+1} + h.c. for every bond, in ``bonds()`` order."""
        return [self._hop(l, r) + self._hop(r, l) for l, r in self.bonds()]

    def _hop(self, to, frm):
        """Sparse matrix of b_to^dag b_from."""
        rows, cols, vals = [], [], []
        for col, occ in enumerate(self.states):
            n_from = occ[frm]
            if n_from == 0:
                continue
            new = occ.copy()
            new[frm] -= 1
            new[to] += 1
            rows.append(self.index[tuple(new.tolist())])
            cols.append(col)
            vals.append(np.sqrt(n_from * (occ[to] + 1)))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    @cached_property
    def translation(self) -> sp.csr_matrix:
        """Cyclic shift of occupations by one site (site l -> l+1)."""
        rows = [self.index[tuple(np.roll(occ, 1).tolist())] for occ in self.states]
        return sp.csr_matrix((np.ones(self.dim), (rows, range(self.dim))),
                             shape=(self.dim, self.dim))


def build_basis(M: int, N: int, cap: int = DEFAULT_BASIS_CAP, periodic: bool = True) -> FockBasis:
    if M < 1 or N < 0:
        raise ValueError(f"invalid sizes M={M}, N={N}")
    size = comb(N + M - 1, N)
    if size > cap:
        raise CapacityError(f"basis dimension {size} exceeds cap {cap}")
    states = np.array(list(_compositions(N, M)), dtype=np.int64).reshape(size, M)
    index = {tuple(s): i for i, s in enumerate(states.tolist())}
    return FockBasis(M=M, N=N, states=states, index=index, periodic=periodic)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: FockBasis
    params: HubbardParams

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


def hamiltonian_entries(basis: FockBasis, J: float, U: float, mu: float) -> np.ndarray:
    occ = basis.number_diagonals
    diag = 0.5 * U * (occ * (occ - 1)).sum(axis=0) - mu * occ.sum(axis=0)
    H = np.diag(diag)
    if J and basis.bond_operators:
        H = H - J * sum(basis.bond_operators).toarray()
    return H


def build_hamiltonian(basis: FockBasis, params: HubbardParams, mu: float | None = None) -> HamiltonianMatrix:
    """Bose-Hubbard matrix and its full eigendecomposition.

    ``mu`` overrides ``params.mu``; spectra only use energy differences.
    """
    mu = params.mu if mu is None else mu
    H = hamiltonian_entries(basis, params.J, params.U, mu)
    vals, vecs = scipy.linalg.eigh(H)
    return HamiltonianMatrix(entries=H, eigenvalues=vals, eigenvectors=vecs,
                             basis=basis, params=params)


@dataclass(frozen=True, eq=False)
class ProbeOperatorMatrix:
    entries: sp.csr_matrix
    q: tuple
    coeffs: CouplingCoefficients
    include_j1: bool

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()


def build_probe_operator(basis: FockBasis, coeffs: CouplingCoefficients, d0: float,
                         include_j1: bool = True) -> ProbeOperatorMatrix:
    """T(q) = sum_l exp(i q_x l d0) [J0 n_l + J1 (b_l^dag b_{l+1} + h.c.)]."""
    qx = coeffs.q[0]
    phases = np.exp(1j * qx * d0 * np.arange(basis.M))
    diag = coeffs.j0 * (phases @ basis.number_diagonals)
    T = sp.diags(diag).tocsr()
    if include_j1 and coeffs.j1 != 0:
        for (l, _), bond in zip(basis.bonds(), basis.bond_operators):
            T = T + coeffs.j1 * phases[l] * bond
    return ProbeOperatorMatrix(entries=T.tocsr(), q=coeffs.q, coeffs=coeffs, include_j1=include_j1)


def _fix_phase(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size:
        v = v * (np.abs(v[nz[0]]) / v[nz[0]])
    return v


def ground_state(h: HamiltonianMatrix, degeneracy_tol: float = 1e-10):
    """Lowest eigenpair with its first nonzero amplitude made real positive."""
    vals = h.eigenvalues
    if len(vals) > 1 and vals[1] - vals[0] < degeneracy_tol:
        warnings.warn(f"degenerate ground state: indices 0 and 1 split by {vals[1] - vals[0]:.2e}",
                      DegeneracyWarning, stacklevel=2)
    return float(vals[0]), _fix_phase(h.eigenvectors[:, 0].copy())
