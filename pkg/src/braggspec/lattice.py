"""Single-particle physics of the 1D sinusoidal lattice.

Energies are measured in units of the lattice recoil energy
hbar*omega_R = hbar^2 pi^2 / (2 m d0^2); lengths internally in units of d0.

The lowest Bloch band is obtained by plane-wave expansion, the Wannier
function by summing gauge-fixed Bloch functions over a supercell of
``k_count`` cells (an FFT), and all overlap integrals are evaluated on that
periodic supercell grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import constants

from .errors import DomainError, GaugeError, ResolutionError

HBAR = constants.hbar
BOHR = constants.physical_constants["Bohr radius"][0]
RB87_MASS = 86.909180527 * constants.atomic_mass

DEFAULT_CUTOFF = 16
DEFAULT_POINTS_PER_PERIOD = 64
# supercell cells per chain site; long enough for V0 ~ 0.1 Wannier tails
DEFAULT_CELLS_PER_SITE = 128


@dataclass(frozen=True)
class LatticeConfig:
    """Physical inputs.  ``V0`` in hbar*omega_R, ``omega_r`` in omega_R, SI otherwise."""

    V0: float
    d0: float = 413e-9
    mass: float = RB87_MASS
    a_s: float = 105 * BOHR
    omega_r: float = 10.0
    M: int = 7
    N: int = 7

    def __post_init__(self):
        if self.V0 < 0:
            raise DomainError(f"lattice depth V0 must be >= 0, got {self.V0}")
        if self.d0 <= 0:
            raise DomainError(f"lattice constant d0 must be > 0, got {self.d0}")
        if self.M < 2:
            raise DomainError(f"need at least 2 sites, got M={self.M}")
        if self.N < 1:
            raise DomainError(f"need at least 1 atom, got N={self.N}")
        if self.omega_r <= 0:
            raise DomainError(f"transverse frequency must be > 0, got {self.omega_r}")

    @property
    def recoil_omega(self) -> float:
        """omega_R = hbar pi^2 / (2 m d0^2) in rad/s."""
        return HBAR * np.pi**2 / (2 * self.mass * self.d0**2)

    @property
    def xi_r(self) -> float:
        """Transverse oscillator length sqrt(hbar / (m omega_r)) in meters."""
        return np.sqrt(HBAR / (self.mass * self.omega_r * self.recoil_omega))

    @property
    def filling(self) -> Fraction:
        return Fraction(self.N, self.M)


@dataclass(frozen=True)
class BandData:
    k_grid: np.ndarray          # rad/m, uniform on (-pi/d0, pi/d0]
    energies: np.ndarray        # hbar*omega_R
    bloch_coefficients: np.ndarray  # (k_count, 2*cutoff+1), unit-normalized rows
    d0: float
    V0: float
    cutoff: int

    @property
    def k_count(self) -> int:
        return len(self.k_grid)

    def hopping_from_dispersion(self, distance: int = 1) -> float:
        """Fourier coefficient -(1/K) sum_k E(k) exp(i k d0 distance), real part."""
        phase = np.exp(1j * self.k_grid * self.d0 * distance)
        return float(-np.real(np.mean(self.energies * phase)))

    @property
    def bandwidth(self) -> float:
        return float(self.energies.max() - self.energies.min())


@dataclass(frozen=True)
class WannierData:
    x_grid: np.ndarray      # meters, symmetric periodic window of k_count cells
    w_values: np.ndarray    # m^-1/2, real
    band: BandData
    points_per_period: int

    @property
    def d0(self) -> float:
        return self.band.d0

    @property
    def dx(self) -> float:
        return self.d0 / self.points_per_period

    def dimensionless(self) -> tuple[np.ndarray, np.ndarray]:
        """(x/d0, w*sqrt(d0))."""
        return self.x_grid / self.d0, self.w_values * np.sqrt(self.d0)

    def integrate(self, values: np.ndarray) -> float | complex:
        """Composite Simpson over the periodic window, in meters."""
        return simpson_periodic(values, self.dx)


@dataclass(frozen=True)
class HubbardParams:
    J: float
    U: float
    mu: float
    g: Fraction

    def __post_init__(self):
        object.__setattr__(self, "g", Fraction(self.g))

    @property
    def u_over_j(self) -> float:
        return self.U / self.J if self.J else float("inf")

    @classmethod
    def from_ratio(cls, J, U, g, mu=None):
        """Convenience constructor; ``mu`` defaults to -2J + U g."""
        g = Fraction(g)
        if mu is None:
            mu = -2 * J + U * float(g)
        return cls(J=J, U=U, mu=mu, g=g)


@dataclass(frozen=True)
class CouplingCoefficients:
    j0: complex
    j1: complex
    q: tuple = field(default=(0.0, 0.0, 0.0))


def simpson_periodic(values, h):
    """Composite Simpson rule for a periodic sample (endpoint closes the loop).

    Needs an even number of samples.  Equivalent to (4 T_h - T_2h)/3.
    """
    values = np.asarray(values)
    n = values.shape[-1]
    if n % 2:
        raise ResolutionError("periodic Simpson rule needs an even number of samples")
    fine = values.sum(axis=-1) * h
    coarse = values[..., ::2].sum(axis=-1) * 2 * h
    return (4 * fine - coarse) / 3


def _k_indices(k_count):
    # integer j with k = 2 pi j / (K d0), j in (-K/2, K/2]
    return np.arange(k_count) - (k_count - 1) // 2


def _lowest_band(V0, k_reduced, cutoff):
    """Lowest eigenpair of the plane-wave Hamiltonian for each k (k in units of pi/d0)."""
    n = np.arange(-cutoff, cutoff + 1)
    size = len(n)
    H = np.zeros((len(k_reduced), size, size))
    idx = np.arange(size)
    H[:, idx, idx] = (k_reduced[:, None] + 2 * n[None, :]) ** 2 + V0 / 2
    H[:, idx[:-1], idx[1:]] = -V0 / 4
    H[:, idx[1:], idx[:-1]] = -V0 / 4
    vals, vecs = np.linalg.eigh(H)
    return vals[:, 0], vecs[:, :, 0]


def solve_band_structure(config: LatticeConfig, plane_wave_cutoff: int = DEFAULT_CUTOFF,
                         k_count: int | None = None, tol: float = 1e-8) -> BandData:
    """Lowest band of V0 sin^2(pi x/d0) on a uniform k-grid.

    The grid contains the chain momenta 2 pi n/(M d0) because ``k_count`` is a
    multiple of M.  Convergence is checked against ``plane_wave_cutoff + 4``.
    """
    if config.V0 < 0:
        raise DomainError("negative lattice depth")
    if plane_wave_cutoff < 8:
        raise ValueError("plane_wave_cutoff must be >= 8")
    if k_count is None:
        k_count = config.M * DEFAULT_CELLS_PER_SITE
    if k_count < config.M or k_count % config.M:
        raise ValueError(f"k_count={k_count} must be a positive multiple of M={config.M}")

    j = _k_indices(k_count)
    k_reduced = 2 * j / k_count  # k d0 / pi
    energies, coeffs = _lowest_band(config.V0, k_reduced, plane_wave_cutoff)
    check, _ = _lowest_band(config.V0, k_reduced, plane_wave_cutoff + 4)
    err = np.max(np.abs(check - energies))
    if err > tol:
        raise ResolutionError(
            f"band energies not converged at cutoff {plane_wave_cutoff}: change {err:.2e}")

    k_grid = np.pi * k_reduced / config.d0
    return BandData(k_grid=k_grid, energies=energies, bloch_coefficients=coeffs,
                    d0=config.d0, V0=config.V0, cutoff=plane_wave_cutoff)


def compute_wannier(band: BandData,
                    points_per_period: int = DEFAULT_POINTS_PER_PERIOD) -> WannierData:
    """Real symmetric lowest-band Wannier function centered at x = 0.

    Each Bloch function is made real and positive at the origin (Kohn gauge),
    then w(x) = (1/K) sum_k psi_k(x) is evaluated on the whole supercell by FFT.
    """
    K = band.k_count
    c = band.cutoff
    P = points_per_period
    if P < 2 * c + 2 or P % 2:
        raise ResolutionError(f"points_per_period={P} cannot resolve cutoff {c}")

    coeffs = band.bloch_coefficients.astype(complex)
    if K % 2 == 0:
        # zone edge: keep the even combination c_n = c_{-n-1} (degenerate at V0 = 0)
        edge = coeffs[-1]
        mirrored = np.zeros_like(edge)
        mirrored[:-1] = edge[:-1][::-1]
        even = edge + mirrored
        coeffs[-1] = even / np.linalg.norm(even)
    at_origin = coeffs.sum(axis=1)
    if np.min(np.abs(at_origin)) < 1e-10:
        raise GaugeError("Bloch function vanishes at x = 0; Kohn gauge undefined")
    coeffs *= (np.abs(at_origin) / at_origin)[:, None]

    n_grid = K * P
    j = _k_indices(K)
    n = np.arange(-c, c + 1)
    m = (j[:, None] + K * n[None, :]).ravel()  # frequency index, units 2 pi/(K d0)
    spectrum = np.zeros(n_grid, dtype=complex)
    np.add.at(spectrum, m % n_grid, coeffs.ravel())
    # x_l = (l - n_grid/2) d0/P gives an extra phase (-1)^m (n_grid is even)
    shift = np.where(np.arange(n_grid) % 2, -1.0, 1.0)
    w = np.fft.ifft(spectrum * shift) * n_grid / K  # units d0^-1/2
    if np.max(np.abs(w.imag)) > 1e-9 * np.max(np.abs(w.real)):
        raise GaugeError("Wannier function is not real; check k-grid symmetry")
    w = w.real

    x_reduced = (np.arange(n_grid) - n_grid // 2) / P
    return WannierData(x_grid=x_reduced * band.d0, w_values=w / np.sqrt(band.d0),
                       band=band, points_per_period=P)


def _kinetic_apply(w_reduced, P):
    """-(1/pi^2) d^2/dx^2 in recoil units, spectrally on the periodic grid (x in d0)."""
    n = len(w_reduced)
    freq = np.fft.fftfreq(n, d=1.0 / P) * 2 * np.pi  # rad per d0
    return np.fft.ifft(np.fft.fft(w_reduced) * freq**2).real / np.pi**2


def hopping_real_space(wannier: WannierData) -> float:
    """J = -int w(x) (T + V) w(x - d0) dx, in hbar*omega_R."""
    x, w = wannier.dimensionless()
    P = wannier.points_per_period
    neighbor = np.roll(w, P)  # w(x - d0)
    H_neighbor = _kinetic_apply(neighbor, P) + wannier.band.V0 * np.sin(np.pi * x) ** 2 * neighbor
    return float(-simpson_periodic(w * H_neighbor, 1.0 / P))


def hubbard_parameters(wannier: WannierData, config: LatticeConfig,
                       rel_tol: float = 0.01) -> HubbardParams:
    """J, U and the superfluid chemical potential mu = -2J + U g.

    U = u_gg * int|phi_0|^4 d^2rho * int w^4 dx with u_gg = 4 pi hbar^2 a_s / m and
    int|phi_0|^4 = 1 / (2 pi xi_r^2), i.e. U = 2 hbar omega_r a_s int w^4 dx.
    """
    J_real = hopping_real_space(wannier)
    J_band = wannier.band.hopping_from_dispersion()
    if abs(J_real - J_band) > rel_tol * abs(J_band):
        raise ResolutionError(
            f"real-space J={J_real:.6g} and dispersion J={J_band:.6g} disagree")

    _, w = wannier.dimensionless()
    w4 = simpson_periodic(w**4, 1.0 / wannier.points_per_period)  # units 1/d0
    U = 2 * config.omega_r * (config.a_s / config.d0) * w4
    g = config.filling
    return HubbardParams(J=J_real, U=float(U), mu=float(-2 * J_real + U * float(g)), g=g)


def coupling_coefficients(wannier: WannierData, config: LatticeConfig, q) -> CouplingCoefficients:
    """J0(q) and J1(q) for a momentum transfer ``q`` = (q_x, q_y, q_z) in rad/m.

    A scalar ``q`` is taken as q_x with zero transverse components.
    """
    if np.ndim(q) == 0:
        q = (float(q), 0.0, 0.0)
    q = tuple(float(v) for v in q)
    if len(q) != 3:
        raise ValueError("q must be a scalar or a 3-vector")
    qx, qy, qz = q
    nyquist = np.pi / wannier.dx
    if abs(qx) >= nyquist / 2:
        raise ResolutionError(f"|q_x|={abs(qx):.3g} rad/m beyond resolvable {nyquist / 2:.3g}")

    x, w = wannier.dimensionless()
    P = wannier.points_per_period
    phase = np.exp(1j * qx * config.d0 * x)
    transverse = np.exp(-0.25 * (qy**2 + qz**2) * config.xi_r**2)
    j0 = transverse * simpson_periodic(phase * w * w, 1.0 / P)
    j1 = transverse * simpson_periodic(w * phase * np.roll(w, P), 1.0 / P)
    return CouplingCoefficients(j0=complex(j0), j1=complex(j1), q=q)


def bragg_q(theta: float, d0: float) -> tuple:
    """Momentum-transfer vector for a Bragg angle theta = q_x d0 (no transverse part)."""
    return (theta / d0, 0.0, 0.0)


@dataclass(frozen=True)
class LatticeSolution:
    """Everything the many-body backends need from one lattice depth."""

    config: LatticeConfig
    band: BandData
    wannier: WannierData
    params: HubbardParams

    def coefficients(self, theta: float) -> CouplingCoefficients:
        return coupling_coefficients(self.wannier, self.config, bragg_q(theta, self.config.d0))


def solve_lattice(config: LatticeConfig, plane_wave_cutoff: int = DEFAULT_CUTOFF,
                  k_count: int | None = None,
                  points_per_period: int = DEFAULT_POINTS_PER_PERIOD) -> LatticeSolution:
    band = solve_band_structure(config, plane_wave_cutoff, k_count)
    wannier = compute_wannier(band, points_per_period)
    return LatticeSolution(config, band, wannier, hubbard_parameters(wannier, config))
