"""Weakly interacting superfluid backend: Bogoliubov modes and cross sections.

Energies are in the unit of the supplied HubbardParams (hbar*omega_R from the
lattice module), so hbar*Omega_p is simply ``omega_p`` below.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeWarning
from .lattice import CouplingCoefficients, HubbardParams
from .spectra import Line, grating_factor

DEFAULT_MAX_U_OVER_J = 3.0


@dataclass(frozen=True)
class BogoliubovMode:
    n: int              # p = 2 pi n / (M d0)
    p_d0: float         # dimensionless quasimomentum p d0
    epsilon_p: float
    omega_p: float
    u_p: float
    v_p: float


def mode_indices(M: int) -> list[int]:
    """M-1 nonzero momenta of an M-site ring, first Brillouin zone."""
    return [n for n in range(-((M - 1) // 2), M // 2 + 1) if n != 0]


def bogoliubov_modes(params: HubbardParams, M: int) -> list[BogoliubovMode]:
    J, U, g = params.J, params.U, float(params.g)
    if J <= 0:
        raise DomainError("Bogoliubov modes need J > 0")
    if U < 0:
        raise DomainError("Bogoliubov modes need U >= 0")
    Ug = U * g
    modes = []
    for n in mode_indices(M):
        p_d0 = 2 * np.pi * n / M
        eps = 4 * J * np.sin(p_d0 / 2) ** 2
        omega = np.sqrt(eps**2 + 2 * Ug * eps)
        if omega == 0:
            raise DomainError("vanishing Bogoliubov frequency")
        u = np.sqrt((eps + Ug + omega) / (2 * omega))
        v = np.sqrt(max((eps + Ug - omega) / (2 * omega), 0.0))
        modes.append(BogoliubovMode(n, p_d0, float(eps), float(omega), float(u), float(v)))
    return modes


def _guard(params, max_u_over_j):
    if params.U / params.J > max_u_over_j:
        warnings.warn(f"U/J = {params.U / params.J:.3g} beyond Bogoliubov guard {max_u_over_j}",
                      RegimeWarning, stacklevel=3)


def depletion(modes, N: int) -> float:
    return sum(m.v_p**2 for m in modes) / N


def sf_elastic(theta: float, coeffs: CouplingCoefficients, params: HubbardParams, modes,
               M: int, N: int, include_j1: bool = True,
               max_u_over_j: float = DEFAULT_MAX_U_OVER_J) -> float:
    _guard(params, max_u_over_j)
    j1 = coeffs.j1 if include_j1 else 0.0
    lead = coeffs.j0 + 2 * j1
    depl = sum(m.v_p**2 / N * np.real(np.conj(lead) * (coeffs.j0 + 2 * j1 * np.cos(m.p_d0)))
               for m in modes)
    return float(N**2 * grating_factor(theta, M) * (abs(lead) ** 2 + 2 * depl))


def sf_stokes(theta: float, coeffs: CouplingCoefficients, params: HubbardParams, modes,
              M: int, N: int, include_j1: bool = True,
              max_u_over_j: float = DEFAULT_MAX_U_OVER_J) -> list[Line]:
    """One line per mode at Omega_p, weight N (eps_p/Omega_p) |J0 + J1(1+e^{-ip d0})|^2 delta_M(q_x - p)."""
    _guard(params, max_u_over_j)
    j1 = coeffs.j1 if include_j1 else 0.0
    lines = []
    for m in modes:
        amp = coeffs.j0 + j1 * (1 + np.exp(-1j * m.p_d0))
        weight = N * (m.epsilon_p / m.omega_p) * abs(amp) ** 2 * grating_factor(theta - m.p_d0, M)
        lines.append(Line(m.omega_p, float(weight), f"bogoliubov n={m.n}"))
    return lines
