"""Gaussian-basis engine for one- and two-valence-electron diatomics.

Core potentials (semi-local ECP plus l-dependent core polarization), RHF
and one-electron orbitals, full CI per axial symmetry block, potential
curve scans and finite-field dipole properties.
"""
from .basis import BasisError, MoleculeSpec, parse_basis, parse_core_potentials
from .ci import Block, CIError, CIState
from .integrals import IntegralError, IntegralSet, compute_integrals
from .pipeline import Point, Settings
from .properties import FitError, PropertyResult, compute_properties, fit_field_response
from .scan import CurveTable, scan_curve, spectroscopic_constants
from .scf import MOSet, SCFError, rhf, solve_one_electron

__all__ = [
    "BasisError",
    "MoleculeSpec",
    "parse_basis",
    "parse_core_potentials",
    "Block",
    "CIError",
    "CIState",
    "IntegralError",
    "IntegralSet",
    "compute_integrals",
    "Point",
    "Settings",
    "FitError",
    "PropertyResult",
    "compute_properties",
    "fit_field_response",
    "CurveTable",
    "scan_curve",
    "spectroscopic_constants",
    "MOSet",
    "SCFError",
    "rhf",
    "solve_one_electron",
]

__version__ = "0.1.0"
