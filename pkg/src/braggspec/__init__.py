"""Bragg-scattering spectra of bosons in a 1D optical lattice.

Three backends compute the elastic and Stokes parts of the photon scattering
cross section: exact diagonalization of the Bose-Hubbard ring (``hilbert`` +
``spectra``), the large-filling Mott theory (``mott``) and Bogoliubov theory
(``bogoliubov``).  ``lattice`` supplies J, U, J0(q) and J1(q) from the
Wannier function of the sinusoidal potential.
"""

from .lattice import LatticeConfig, solve_lattice
from .spectra import ProbeGeometry, Spectrum

__all__ = ["LatticeConfig", "solve_lattice", "ProbeGeometry", "Spectrum"]
__version__ = "0.1.0"
