"""Single-geometry pipeline: integrals, orbitals, MO integrals and block CI.

A :class:`Point` holds everything computed at one internuclear distance.
Fields enter only through one-electron terms, so the CI Hamiltonian of a
block in a field F is H(0) + sum_k F_k G_k with G_k the block matrix of the
field-coupling operator, evaluated in the field-free orbital basis.  Since
the CI is complete in the orbital space, this equals a rerun with orbitals
re-optimized in the field.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .basis import MoleculeSpec
from .ci import (
    Block,
    CIError,
    CIState,
    build_hamiltonian,
    diagonalize,
    enumerate_determinants,
    one_electron_matrix,
    parse_block,
    state_dipole,
    transition_dipole,
)
from .integrals import IntegralSet, compute_integrals, cross_overlap
from .scf import field_scalar, mo_operator, mo_transform, rhf, solve_one_electron

__all__ = ["Settings", "Point", "canonical_field", "state_overlap", "MAX_FIELD"]

log = logging.getLogger(__name__)

MAX_FIELD = 1e-2


@dataclass(frozen=True)
class Settings:
    """Model and solver switches shared by every point of a run."""

    orbitals: str = "cation"  # or "rhf"
    cpp_two_electron: bool = True
    cpp_external_field: bool = True
    origin: tuple | None = None
    ci_method: str = "auto"
    ci_tol: float = 1e-9
    integral_tol: float = 1e-10

    def __post_init__(self):
        if self.orbitals not in ("cation", "rhf"):
            raise ValueError(f"orbitals must be 'cation' or 'rhf', not {self.orbitals!r}")


def canonical_field(field) -> np.ndarray:
    """Rotate a field about z so its perpendicular part lies along +x.

    Energies of axially symmetric molecules are unchanged by the rotation,
    so x and y fields of equal size give identical results.
    """
    F = np.asarray(field, float)
    if F.shape != (3,):
        raise ValueError("field must be a 3-vector")
    return np.array([np.hypot(F[0], F[1]), 0.0, F[2]])


class Point:
    """Integrals, orbitals and CI machinery at one geometry."""

    def __init__(self, spec: MoleculeSpec, R: float | None = None, settings: Settings | None = None):
        self.settings = settings or Settings()
        st = self.settings
        if R is not None and not R > 0:
            raise ValueError(f"internuclear distance must be positive, got {R}")
        self.spec = spec if R is None else spec.at_distance(R)
        self.R = self.spec.distance
        self.n_electrons = self.spec.n_valence_electrons
        two = self.n_electrons == 2
        self.ints: IntegralSet = compute_integrals(
            self.spec, origin=st.origin, cpp_two_electron=st.cpp_two_electron,
            cpp_external_field=st.cpp_external_field, with_eri=two, tol=st.integral_tol,
        )
        ints = self.ints
        self.rhf_result = None
        if two and st.orbitals == "rhf":
            self.rhf_result = rhf(ints)
            self.mos = self.rhf_result.mos
        else:
            self.mos = solve_one_electron(ints.h0, ints.S, ints.labels)
        if two:
            self.h_mo, self.eri_mo = mo_transform(ints, self.mos)
        else:
            C = self.mos.coefficients
            h = C.T @ ints.h0 @ C
            self.h_mo, self.eri_mo = 0.5 * (h + h.T), None
        self.g_mo = mo_operator(ints.field_coupling, self.mos)
        self._bases: dict = {}
        self._h0: dict = {}
        self._g: dict = {}

    # ------------------------------------------------------------ blocks
    def default_block(self, lam: int = 0, reflection: int = 1, multiplicity: int | None = None) -> Block:
        if multiplicity is None:
            multiplicity = 2 if self.n_electrons == 1 else 1
        return Block(multiplicity, lam, reflection if lam == 0 else 0)

    def _check_block(self, block: Block):
        one = self.n_electrons == 1
        if one != (block.multiplicity == 2):
            raise CIError(f"block {block.name} does not fit a {self.n_electrons}-electron system")

    def basis(self, block):
        block = parse_block(block)
        self._check_block(block)
        if block not in self._bases:
            self._bases[block] = enumerate_determinants(self.mos, block)
        return self._bases[block]

    def hamiltonian(self, block) -> np.ndarray:
        """Field-free block Hamiltonian without the scalar nuclear term."""
        block = parse_block(block)
        if block not in self._h0:
            self._h0[block] = build_hamiltonian(self.basis(block), self.h_mo, self.eri_mo)
        return self._h0[block]

    def field_matrix(self, block, axis: int) -> np.ndarray:
        block = parse_block(block)
        key = (block, axis)
        if key not in self._g:
            self._g[key] = one_electron_matrix(self.basis(block), self.g_mo[axis])
        return self._g[key]

    # ------------------------------------------------------------- solve
    def solve(self, block, n_roots: int = 1, field=None) -> list:
        """Lowest states of ``block``; energies include nuclear and field scalars.

        A field with a perpendicular component needs a block without axial
        symmetry (``Block(mult, None, parity)``); it is rotated so that the
        perpendicular part points along x.
        """
        block = parse_block(block)
        H = self.hamiltonian(block)
        scalar = field_scalar(self.ints, None)
        if field is not None:
            F = np.asarray(field, float)
            if np.linalg.norm(F) > MAX_FIELD:
                raise ValueError(f"field {np.linalg.norm(F):.3g} a.u. exceeds the perturbative limit {MAX_FIELD}")
            F = canonical_field(F)
            if F[0] != 0.0 and block.lam is not None:
                raise CIError(f"a perpendicular field mixes Lambda; use a general block instead of {block.name}")
            H = H.copy()
            for k in (0, 2):
                if F[k] != 0.0:
                    H += F[k] * self.field_matrix(block, k)
            scalar = field_scalar(self.ints, F)
        states = diagonalize(H, n_roots, basis=self.basis(block), method=self.settings.ci_method,
                             tol=self.settings.ci_tol)
        for s in states:
            s.energy += scalar
        return states

    def energy(self, block, root: int = 0, field=None) -> float:
        return self.solve(block, root + 1, field)[root].energy

    def general_block(self, block) -> Block:
        """Block without axial symmetry that contains the mirror-even part of ``block``."""
        block = parse_block(block)
        if block.lam is None:
            return block
        refl = block.reflection if block.lam == 0 else 1
        return Block(block.multiplicity, None, refl)

    def embed_root(self, state: CIState, block: Block, n_search: int = 12) -> int:
        """Index of the root of ``block`` (field free) that best matches ``state``."""
        cand = self.solve(block, n_search)
        C = state.coefficient_matrix()
        ov = [abs(np.sum(C * s.coefficient_matrix())) for s in cand]
        k = int(np.argmax(ov))
        if ov[k] < 0.9:
            raise CIError(f"state {state.block.name} root {state.root} not found in {block.name} (overlap {ov[k]:.3f})")
        return k

    # --------------------------------------------------------- properties
    def dipole(self, state: CIState) -> np.ndarray:
        """Permanent dipole about the run origin (includes core polarization terms)."""
        return state_dipole(state, self.g_mo, self.ints.nuclear_dipole)

    def transition(self, a: CIState, b: CIState) -> np.ndarray:
        return transition_dipole(a, b, self.g_mo)

    def ao_coefficients(self, state: CIState) -> np.ndarray:
        C = self.mos.coefficients
        M = state.coefficient_matrix()
        if M.ndim == 1:
            return C @ M
        return C @ M @ C.T


def state_overlap(point_a: Point, states_a, point_b: Point, states_b) -> np.ndarray:
    """Overlap matrix <a_i|b_j> of CI states at two geometries (AO basis)."""
    S = cross_overlap(point_a.spec, point_b.spec)
    A = [point_a.ao_coefficients(s) for s in states_a]
    B = [point_b.ao_coefficients(s) for s in states_b]
    out = np.zeros((len(A), len(B)))
    for i, (sa, x) in enumerate(zip(states_a, A)):
        for j, (sb, y) in enumerate(zip(states_b, B)):
            if sa.multiplicity != sb.multiplicity:
                continue
            if x.ndim == 1:
                out[i, j] = x @ S @ y
            else:
                out[i, j] = np.sum(x * (S @ y @ S.T))
    return out
