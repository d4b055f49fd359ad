"""Mott-insulator analytic backend (large-filling particle-hole theory).

The particle-hole coefficients are the g -> infinity solution of the
first-order degenerate problem; at finite g (in particular g = 1) line
positions carry a systematic shift with respect to exact numerics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, RegimeWarning
from .lattice import CouplingCoefficients, HubbardParams
from .spectra import Line, grating_factor


@dataclass(frozen=True)
class ParticleHoleMode:
    r: int
    s: int
    coefficients: np.ndarray  # (M, M) complex, c[n, m]: particle at n, hole at m
    energy_shift: float       # A_{r,s}; the excitation energy is U - J * A_{r,s}

    @property
    def recoil_branch(self) -> bool:
        """r + s odd: reached from the Mott state only by light-induced hopping."""
        return (self.r + self.s) % 2 == 1


@dataclass(frozen=True)
class MottPerturbativeState:
    amplitude_ground: float
    amplitude_S: float
    J_over_U: float


def integer_filling(M: int, N: int) -> int:
    g = Fraction(N, M)
    if g.denominator != 1:
        raise DomainError(f"Mott backend needs integer filling, got N/M = {g}")
    return int(g)


def mode_coefficients(M: int, r: int, s: int) -> np.ndarray:
    alpha = np.pi / M
    n = np.arange(M)[:, None]
    m = np.arange(M)[None, :]
    diff = n - m if (r + s) % 2 == 0 else np.abs(n - m)
    return np.sqrt(2) / M * np.sin(alpha * r * diff) * np.exp(1j * alpha * s * (n + m))


def particle_hole_modes(M: int, g) -> list[ParticleHoleMode]:
    """All M(M-1) modes (r = 1..M-1, s = 0..M-1) with A_{r,s} = 2(2g+1) cos(alpha r) cos(alpha s)."""
    if M < 3:
        raise DomainError("particle-hole modes need M >= 3")
    if g < 1:
        raise DomainError("filling must be >= 1")
    alpha = np.pi / M
    modes = []
    for r in range(1, M):
        for s in range(M):
            A = 2 * (2 * g + 1) * np.cos(alpha * r) * np.cos(alpha * s)
            modes.append(ParticleHoleMode(r, s, mode_coefficients(M, r, s), float(A)))
    return modes


def particle_hole_hopping_matrix(M: int, g) -> tuple[np.ndarray, list]:
    """Matrix of the first-order degenerate problem on the (n, m), n != m subspace.

    Row (n, m) holds (g+1)(c_{n+1,m} + c_{n-1,m}) + g(c_{n,m+1} + c_{n,m-1}),
    indices modulo M, with c_{n,n} = 0.
    """
    pairs = [(n, m) for n in range(M) for m in range(M) if n != m]
    where = {p: i for i, p in enumerate(pairs)}
    L = np.zeros((len(pairs), len(pairs)))
    for i, (n, m) in enumerate(pairs):
        for weight, (a, b) in ((g + 1, (n + 1, m)), (g + 1, (n - 1, m)),
                               (g, (n, m + 1)), (g, (n, m - 1))):
            key = (a % M, b % M)
            if key[0] != key[1]:
                L[i, where[key]] += weight
    return L, pairs


DEFAULT_MAX_J_OVER_U = 0.2


def _guard(J, U, max_ratio, stacklevel=3):
    if U <= 0:
        raise DomainError("Mott backend needs U > 0")
    ratio = J / U
    if ratio > max_ratio:
        warnings.warn(f"J/U = {ratio:.3g} exceeds perturbative guard {max_ratio}",
                      RegimeWarning, stacklevel=stacklevel)
    return ratio


def mott_ground_state(M: int, g, J: float, U: float,
                      max_ratio: float = DEFAULT_MAX_J_OVER_U) -> MottPerturbativeState:
    ratio = _guard(J, U, max_ratio)
    x = ratio**2 * M * g * (g + 1)
    return MottPerturbativeState(amplitude_ground=1 - x,
                                 amplitude_S=ratio * np.sqrt(2 * M * g * (g + 1)),
                                 J_over_U=ratio)


def mott_ground_vector(basis, g: int, state: MottPerturbativeState) -> np.ndarray:
    """The perturbative ground state expanded in a Fock basis (not renormalized)."""
    M = basis.M
    v = state.amplitude_ground * basis.fock_vector([g] * M)
    S = np.zeros(basis.dim)
    for n in range(M):
        for m in ((n + 1) % M, (n - 1) % M):
            occ = [g] * M
            occ[n] += 1
            occ[m] -= 1
            # b_n^dag b_m |g..g> / sqrt(g(g+1)) is exactly this Fock state
            S[basis.lookup(occ)] += 1.0
    S /= np.sqrt(2 * M)
    return v + state.amplitude_S * S


def mott_elastic(theta: float, coeffs: CouplingCoefficients, params: HubbardParams,
                 M: int, N: int, max_ratio: float = DEFAULT_MAX_J_OVER_U) -> float:
    """Elastic weight N^2 delta_M(q_x) (|J0|^2 + 4 sqrt(g(g+1)) (J/U) Re{J0* J1})."""
    g = integer_filling(M, N)
    _guard(params.J, params.U, max_ratio)
    correction = 4 * np.sqrt(g * (g + 1)) * (params.J / params.U) * np.real(np.conj(coeffs.j0) * coeffs.j1)
    return float(N**2 * grating_factor(theta, M) * (abs(coeffs.j0) ** 2 + correction))


def stokes_amplitude(mode: ParticleHoleMode, coeffs: CouplingCoefficients,
                     params: HubbardParams, M: int, g: int) -> complex:
    pref = np.sqrt(8 * g * (g + 1))
    if mode.recoil_branch:
        return pref * coeffs.j1
    return pref * 2 * (params.J / params.U) * coeffs.j0 * np.sin(np.pi * mode.s / M)


def mott_stokes(theta: float, coeffs: CouplingCoefficients, params: HubbardParams,
                M: int, N: int, include_j1: bool = True,
                max_ratio: float = DEFAULT_MAX_J_OVER_U) -> list[Line]:
    """One line per (r, s) at U - J A_{r,s} with weight sin^2(pi r/M) |B_{r,s}|^2 delta_M(q(s)).

    ``theta`` is q_x d0; q(s) d0 = theta - 2 pi s / M.  Frequencies are in the
    energy unit of ``params``.
    """
    g = integer_filling(M, N)
    _guard(params.J, params.U, max_ratio)
    if not include_j1:
        coeffs = CouplingCoefficients(coeffs.j0, 0j, coeffs.q)
    lines = []
    for mode in particle_hole_modes(M, g):
        B = stokes_amplitude(mode, coeffs, params, M, g)
        weight = (np.sin(np.pi * mode.r / M) ** 2 * abs(B) ** 2
                  * grating_factor(theta - 2 * np.pi * mode.s / M, M))
        if mode.s == 0 and mode.r % 2 == 1:
            weight /= 1 + 8 * g * (g + 1) * (params.J / params.U) ** 2 * np.sin(np.pi * mode.r / M) ** 2
        lines.append(Line(params.U - params.J * mode.energy_shift, float(weight),
                          f"mott r={mode.r} s={mode.s}"))
    return lines
