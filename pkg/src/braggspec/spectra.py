"""Spectral assembly: line lists, lineshapes, momentum factors, exact spectral sums.

Frequencies are in units of omega_R (equivalently energies in hbar*omega_R) and
the detection time enters as the dimensionless T*omega_R.  Line weights are in
units of the angular prefactor A(Omega).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.signal import find_peaks

from .errors import CoverageError, DomainError, ShapeError

# grid padding beyond the outermost lines, in units of 1/T; an odd multiple of pi
# puts the truncated diffraction-kernel integral near a zero of its oscillation
PAD_OVER_T = 11 * np.pi
MIN_COVERAGE_OVER_T = 10.0
DEFAULT_GRID_POINTS = 2000


@dataclass(frozen=True)
class Line:
    omega: float    # frequency shift omega_L - omega, units of omega_R
    weight: float   # units of A(Omega)
    label: str = ""


@dataclass(frozen=True)
class ProbeGeometry:
    theta: float                    # Bragg angle q_x d0 (rad)
    T_detect: float = 3e-3          # s
    q_perp: tuple = (0.0, 0.0)      # (q_y, q_z) in rad/m
    omega_L: float | None = None    # rad/s, bookkeeping only

    def __post_init__(self):
        if self.T_detect <= 0:
            raise DomainError("detection time must be positive")

    def q_vector(self, d0: float) -> tuple:
        return (self.theta / d0, float(self.q_perp[0]), float(self.q_perp[1]))


@dataclass(frozen=True)
class AngularPrefactor:
    gamma: float              # rad/s
    delta: float              # omega_L - omega_0, rad/s
    omega0_rabi: float        # rad/s
    dipole_projection: float  # |D.n|^2 / |D|^2


def angular_prefactor(p: AngularPrefactor) -> float:
    """(gamma/c) (Omega_0^2/Delta^2) (3/8pi) (1 - |D.n|^2/|D|^2), in 1/m."""
    if p.delta == 0:
        raise DomainError("zero detuning: resonant scattering is outside the dispersive regime")
    if not 0 <= p.dipole_projection <= 1:
        raise DomainError("dipole projection must lie in [0, 1]")
    return (p.gamma / SPEED_OF_LIGHT) * (p.omega0_rabi**2 / p.delta**2) \
        * (3 / (8 * np.pi)) * (1 - p.dipole_projection)


def diffraction_kernel(omega, T):
    """sin(omega T/2) / (pi omega), with value T/(2 pi) at omega = 0."""
    omega = np.asarray(omega, dtype=float)
    # np.sinc(x) = sin(pi x)/(pi x)
    return T / (2 * np.pi) * np.sinc(omega * T / (2 * np.pi))


def sinc2_kernel(omega, T):
    """Non-negative alternative: (2/(pi T)) sin^2(omega T/2)/omega^2, unit area."""
    omega = np.asarray(omega, dtype=float)
    return T / (2 * np.pi) * np.sinc(omega * T / (2 * np.pi)) ** 2


KERNELS = {"diffraction": diffraction_kernel, "sinc2": sinc2_kernel}


def grating_factor(theta, M: int):
    """sin^2(M theta/2) / (M^2 sin^2(theta/2)); equals 1 at theta = 2 pi n."""
    theta = np.asarray(theta, dtype=float)
    half = theta / 2
    s = np.sin(half)
    near = np.abs(s) < 1e-12
    safe = np.where(near, 1.0, s)
    value = np.where(near, 1.0, np.sin(M * half) ** 2 / (M**2 * safe**2))
    return float(value) if value.ndim == 0 else value


def bloch_momentum_factor(q_x, d0: float, M: int):
    """Finite-lattice momentum conservation factor for momentum transfer ``q_x``."""
    if M < 1:
        raise DomainError("M must be >= 1")
    return grating_factor(np.asarray(q_x) * d0, M)


@dataclass(frozen=True, eq=False)
class Spectrum:
    lines: tuple                    # Stokes lines
    elastic: float                  # weight of the elastic line at zero shift
    T_reduced: float                # T_detect * omega_R
    backend: str
    grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    broadened: np.ndarray = field(default_factory=lambda: np.zeros(0))
    elastic_curve: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kernel: str = "diffraction"
    units_note: str = "per A(Omega)"
    meta: dict = field(default_factory=dict)

    @property
    def stokes_weight(self) -> float:
        return float(sum(l.weight for l in self.lines))

    @property
    def total_weight(self) -> float:
        return self.elastic + self.stokes_weight

    @property
    def resolution(self) -> float:
        """2 pi / T in units of omega_R."""
        return 2 * np.pi / self.T_reduced

    def with_grid(self, grid=None, kernel: str | None = None) -> "Spectrum":
        kernel = kernel or self.kernel
        grid = default_grid(self.lines, self.T_reduced) if grid is None else np.asarray(grid, float)
        shape = KERNELS[kernel]
        broadened = np.zeros_like(grid)
        for line in self.lines:
            broadened += line.weight * shape(grid - line.omega, self.T_reduced)
        elastic_curve = self.elastic * shape(grid, self.T_reduced)
        return replace(self, grid=grid, broadened=broadened, elastic_curve=elastic_curve,
                       kernel=kernel)

    def dominant_line(self) -> Line:
        return max(self.lines, key=lambda l: l.weight)


def default_grid(lines, T_reduced, lo=0.0, hi=None, count=DEFAULT_GRID_POINTS):
    """Uniform grid on [lo, hi], widened to cover every line by PAD_OVER_T / T."""
    pad = PAD_OVER_T / T_reduced
    omegas = [l.omega for l in lines] or [0.0]
    hi = max(omegas) if hi is None else hi
    lo = min(lo, min(omegas) - pad)
    hi = max(hi, max(omegas) + pad)
    # keep at least ~10 samples per resolution width
    count = max(count, int(np.ceil((hi - lo) * T_reduced / (2 * np.pi) * 10)) + 1)
    return np.linspace(lo, hi, count)


def make_spectrum(lines, elastic, T_reduced, backend, grid=None, kernel="diffraction",
                  meta=None) -> Spectrum:
    spec = Spectrum(lines=tuple(lines), elastic=float(elastic), T_reduced=float(T_reduced),
                    backend=backend, kernel=kernel, meta=dict(meta or {}))
    return spec.with_grid(grid)


def exact_amplitudes(h, t) -> tuple[np.ndarray, np.ndarray, float]:
    """(energies, |<f|T|i>|^2 for every eigenstate f, <i|T^dag T|i>) from the ground state."""
    if t.entries.shape != h.entries.shape:
        raise ShapeError(f"probe operator {t.entries.shape} vs Hamiltonian {h.entries.shape}")
    v0 = h.eigenvectors[:, 0]
    Tv = t.entries @ v0
    amps = h.eigenvectors.conj().T @ Tv
    return h.eigenvalues, np.abs(amps) ** 2, float(np.vdot(Tv, Tv).real)


def exact_stokes_spectrum(h, t, geom: ProbeGeometry, recoil_omega: float, grid=None,
                          kernel="diffraction", degeneracy_tol=1e-9,
                          drop_below=1e-14) -> Spectrum:
    """Stokes lines (E_f - E_0) with weights |<f|T(q)|i>|^2; |i> = ground state.

    Degenerate final states are merged into a single line.  Lines lighter than
    ``drop_below`` times the sum rule are discarded.
    """
    energies, weights, norm = exact_amplitudes(h, t)
    elastic = weights[0]
    lines = []
    f = 1
    while f < len(energies):
        g = f
        while g + 1 < len(energies) and energies[g + 1] - energies[f] < degeneracy_tol:
            g += 1
        w = float(weights[f:g + 1].sum())
        if w > drop_below * max(norm, 1e-300):
            lines.append(Line(float(energies[f] - energies[0]), w, f"exact f={f}"))
        f = g + 1
    return make_spectrum(lines, elastic, geom.T_detect * recoil_omega, "exact", grid, kernel,
                         meta={"sum_rule": norm, "theta": geom.theta})


def integrated_intensity(spec: Spectrum, grid_form: bool = False) -> float:
    """Elastic plus Stokes weight (line sum); ``grid_form`` integrates the curves instead."""
    if not grid_form:
        return spec.total_weight
    if spec.grid.size == 0:
        raise CoverageError("spectrum has no grid")
    margin = MIN_COVERAGE_OVER_T / spec.T_reduced
    omegas = [l.omega for l in spec.lines] + [0.0]
    if spec.grid[0] > min(omegas) - margin or spec.grid[-1] < max(omegas) + margin:
        raise CoverageError("grid does not span all lines +- 10/T")
    return float(np.trapezoid(spec.broadened + spec.elastic_curve, spec.grid))


def resolvable_peaks(spec: Spectrum, rel_height: float = 0.2):
    """Local maxima of the broadened Stokes curve above ``rel_height`` of its maximum.

    Returns (positions, heights).
    """
    y = spec.broadened
    if y.size == 0 or y.max() <= 0:
        return np.zeros(0), np.zeros(0)
    idx, _ = find_peaks(y, height=rel_height * y.max())
    return spec.grid[idx], y[idx]


def weight_near(spec: Spectrum, center: float, half_width: float) -> float:
    return float(sum(l.weight for l in spec.lines if abs(l.omega - center) <= half_width))
