"""Grids of spectra over lattice depth, Bragg angle, backend and the J1 toggle."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bogoliubov, mott
from .errors import BraggSpecError
from .hilbert import build_basis, build_hamiltonian, build_probe_operator
from .lattice import LatticeConfig, LatticeSolution, bragg_q, coupling_coefficients, solve_lattice
from .spectra import (DEFAULT_GRID_POINTS, ProbeGeometry, Spectrum, default_grid,
                      exact_stokes_spectrum, make_spectrum)

BACKENDS = ("exact", "mott-analytic", "bogoliubov")


@dataclass(frozen=True)
class Cell:
    V0: float
    theta: float
    backend: str = "exact"
    include_j1: bool = True

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class CellResult:
    cell: Cell
    spectrum: Spectrum | None
    notes: list = field(default_factory=list)


class SpectrumEngine:
    """Caches lattice solutions and exact eigendecompositions per lattice depth.

    ``periodic=False`` gives the exact backend an open chain; the analytic
    backends always describe a ring.
    """

    def __init__(self, base: LatticeConfig, T_detect: float = 3e-3, freq_grid=None,
                 kernel: str = "diffraction", periodic: bool = True):
        self.base = base
        self.periodic = periodic
        self.T_detect = T_detect
        self.freq_grid = freq_grid
        self.kernel = kernel
        self._lattice = {}
        self._hamiltonian = {}
        self._basis = None

    def lattice(self, V0: float) -> LatticeSolution:
        if V0 not in self._lattice:
            self._lattice[V0] = solve_lattice(replace(self.base, V0=V0))
        return self._lattice[V0]

    def basis(self):
        if self._basis is None:
            self._basis = build_basis(self.base.M, self.base.N, periodic=self.periodic)
        return self._basis

    def hamiltonian(self, V0: float):
        if V0 not in self._hamiltonian:
            params = self.lattice(V0).params
            # mu only shifts fixed-N energies; spectra use differences
            self._hamiltonian[V0] = build_hamiltonian(self.basis(), params, mu=0.0)
        return self._hamiltonian[V0]

    def grid_for(self, sol: LatticeSolution, lines):
        T_red = self.T_detect * sol.config.recoil_omega
        if self.freq_grid is not None:
            lo, hi, count = self.freq_grid
            return np.linspace(lo, hi, int(count))
        p = sol.params
        hi = p.U + 3 * p.J * (2 * float(p.g) + 1)
        return default_grid(lines, T_red, 0.0, hi, DEFAULT_GRID_POINTS)

    def prepare(self, cells):
        for V0 in sorted({c.V0 for c in cells}):
            self.lattice(V0)
            if any(c.V0 == V0 and c.backend == "exact" for c in cells):
                self.hamiltonian(V0)

    def compute(self, cell: Cell) -> CellResult:
        sol = self.lattice(cell.V0)
        cfg, params = sol.config, sol.params
        geom = ProbeGeometry(theta=cell.theta, T_detect=self.T_detect)
        coeffs = coupling_coefficients(sol.wannier, cfg, bragg_q(cell.theta, cfg.d0))
        T_red = self.T_detect * cfg.recoil_omega
        meta = {"V0": cell.V0, "theta": cell.theta, "include_j1": cell.include_j1,
                "j0": [coeffs.j0.real, coeffs.j0.imag], "j1": [coeffs.j1.real, coeffs.j1.imag]}
        notes = []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                if cell.backend == "exact":
                    h = self.hamiltonian(cell.V0)
                    t = build_probe_operator(self.basis(), coeffs, cfg.d0, cell.include_j1)
                    spec = exact_stokes_spectrum(h, t, geom, cfg.recoil_omega, grid=np.zeros(0),
                                                 kernel=self.kernel)
                    meta.update(spec.meta)
                    lines, elastic = spec.lines, spec.elastic
                elif cell.backend == "mott-analytic":
                    lines = mott.mott_stokes(cell.theta, coeffs, params, cfg.M, cfg.N, cell.include_j1)
                    c_el = coeffs if cell.include_j1 else replace(coeffs, j1=0j)
                    elastic = mott.mott_elastic(cell.theta, c_el, params, cfg.M, cfg.N)
                else:
                    modes = bogoliubov.bogoliubov_modes(params, cfg.M)
                    lines = bogoliubov.sf_stokes(cell.theta, coeffs, params, modes, cfg.M, cfg.N,
                                                 cell.include_j1)
                    elastic = bogoliubov.sf_elastic(cell.theta, coeffs, params, modes, cfg.M, cfg.N,
                                                    cell.include_j1)
            except BraggSpecError as exc:
                return CellResult(cell, None, [f"{type(exc).__name__}: {exc}"])
        for w in caught:
            note = f"{w.category.__name__}: {w.message}"
            if note not in notes:
                notes.append(note)
        spec = make_spectrum(lines, elastic, T_red, cell.backend, self.grid_for(sol, lines),
                             self.kernel, meta)
        return CellResult(cell, spec, notes)


def sweep(cells, base: LatticeConfig, T_detect: float = 3e-3, freq_grid=None,
          kernel: str = "diffraction", workers: int = 1, engine: SpectrumEngine | None = None):
    """Evaluate every cell; results keep the order of ``cells``.

    Lattice and Hamiltonian artifacts are built once per depth before the
    (optionally threaded) per-cell work starts, so workers only read them.
    """
    cells = list(cells)
    engine = engine or SpectrumEngine(base, T_detect, freq_grid, kernel)
    engine.prepare(cells)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(engine.compute, cells))
    return [engine.compute(c) for c in cells]


def cells_for(v0_grid, theta_grid, backends, include_j1=True):
    """Cartesian product in (V0, theta, backend) order."""
    return [Cell(float(v), float(t), b, include_j1)
            for v in v0_grid for t in theta_grid for b in backends]
