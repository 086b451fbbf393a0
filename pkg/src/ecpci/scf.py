"""One-electron and closed-shell RHF orbitals, blocked by axial symmetry."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .integrals import LINDEP_THRESHOLD, IntegralSet

__all__ = [
    "SCFError",
    "mo_operator",
    "MOSet",
    "core_hamiltonian",
    "field_scalar",
    "symmetry_blocks",
    "solve_one_electron",
    "rhf",
    "RHFResult",
    "mo_transform",
    "atomic_levels",
]

log = logging.getLogger(__name__)

BLOCK_TOL = 1e-12


class SCFError(RuntimeError):
    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


@dataclass(frozen=True)
class MOSet:
    """Molecular orbitals as columns of ``coefficients`` (AO x MO).

    ``m_labels``/``parity_labels`` are -1/0 for orbitals that mix symmetry
    classes (only possible when a perpendicular field is present in h).
    ``partner[k]`` is the index of the degenerate sin/cos partner of a
    |m| > 0 orbital, or -1.
    """

    coefficients: np.ndarray
    orbital_energies: np.ndarray
    m_labels: np.ndarray
    parity_labels: np.ndarray
    partner: np.ndarray = field(default=None)

    @property
    def nmo(self) -> int:
        return self.coefficients.shape[1]

    def block(self, abs_m: int, parity: int) -> np.ndarray:
        return np.flatnonzero((self.m_labels == abs_m) & (self.parity_labels == parity))


def field_scalar(ints: IntegralSet, field=None) -> float:
    """Nuclear repulsion plus the scalar field terms."""
    if field is None:
        return float(ints.e_nuc)
    F = np.asarray(field, float)
    return float(ints.e_nuc - F @ ints.nuclear_dipole - 0.5 * ints.core_alpha * (F @ F))


def core_hamiltonian(ints: IntegralSet, field=None):
    """Return (h, scalar): one-electron Hamiltonian and the field-dependent constant."""
    h = ints.h0
    if field is not None:
        F = np.asarray(field, float)
        if F.shape != (3,):
            raise ValueError("field must be a 3-vector")
        h = h + np.einsum("k,kpq->pq", F, ints.field_coupling)
    return h, field_scalar(ints, field)


# ------------------------------------------------------------ symmetry

def symmetry_blocks(labels, *mats, tol=BLOCK_TOL):
    """Group AOs into blocks not coupled by any of ``mats``.

    Each (|m|, parity) class starts as its own block; classes coupled by an
    element above ``tol`` are merged.  Returns a list of (key, indices) with
    key = (|m|, parity) for pure blocks and None for merged ones.
    """
    keys = sorted({lab.symmetry for lab in labels})
    idx = {k: np.array([lab.index for lab in labels if lab.symmetry == k]) for k in keys}
    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            k = parent[k]
        return k

    for a in keys:
        for b in keys:
            if a >= b:
                continue
            for M in mats:
                scale = max(1.0, np.abs(M).max())
                if np.abs(M[np.ix_(idx[a], idx[b])]).max(initial=0.0) > tol * scale:
                    parent[find(b)] = find(a)
                    break
    groups: dict = {}
    for k in keys:
        groups.setdefault(find(k), []).append(k)
    out = []
    for members in groups.values():
        ind = np.sort(np.concatenate([idx[k] for k in members]))
        out.append((members[0] if len(members) == 1 else None, ind))
    return out


def _partner_map(labels):
    """AO index of the m -> -m partner (same shell), -1 for m = 0."""
    by = {(lab.shell_index, lab.m): lab.index for lab in labels}
    return np.array([by[(lab.shell_index, -lab.m)] if lab.m != 0 else -1 for lab in labels])


def _gen_eig(h, S, threshold):
    """Canonical orthogonalization then symmetric eigensolution."""
    s, U = np.linalg.eigh(S)
    if s[0] <= 0:
        raise SCFError("overlap block is not positive definite")
    keep = s > threshold
    if not keep.all():
        log.info("dropping %d near-dependent combinations (min eigenvalue %.2e)", (~keep).sum(), s[0])
    X = U[:, keep] / np.sqrt(s[keep])
    e, V = np.linalg.eigh(X.T @ h @ X)
    C = X @ V
    # deterministic phase: largest-magnitude coefficient positive
    big = np.argmax(np.abs(C), axis=0)
    C *= np.sign(C[big, np.arange(C.shape[1])])
    return e, C


def solve_one_electron(h, S, labels, threshold: float = LINDEP_THRESHOLD) -> MOSet:
    """Solve h C = S C e block by block in the axial symmetry classes.

    sin-type (odd) blocks that mirror a cos-type block are filled from the
    cos-type solution through the AO partner map, so degenerate pairs are
    exact copies.
    """
    S = np.asarray(S)
    h = np.asarray(h)
    n = S.shape[0]
    blocks = symmetry_blocks(labels, h, S)
    partner = _partner_map(labels)
    cols, energies, mlab, plab, origin_block = [], [], [], [], []
    solved = {}
    # cos-type (even) blocks first so their sin-type partners can be copied
    blocks = sorted(blocks, key=lambda b: (b[0] is None, b[0][0] if b[0] else 0, -(b[0][1] if b[0] else 0)))
    for key, ind in blocks:
        if key is not None and key[1] == -1:
            even = (key[0], 1)
            if even in solved:
                ind_e, e_e, C_e = solved[even]
                pind = partner[ind_e]
                if (np.array_equal(np.sort(pind), ind)
                        and np.allclose(h[np.ix_(pind, pind)], h[np.ix_(ind_e, ind_e)], atol=BLOCK_TOL, rtol=0)
                        and np.allclose(S[np.ix_(pind, pind)], S[np.ix_(ind_e, ind_e)], atol=BLOCK_TOL, rtol=0)):
                    for k in range(C_e.shape[1]):
                        c = np.zeros(n)
                        c[pind] = C_e[:, k]
                        cols.append(c)
                        energies.append(e_e[k])
                        mlab.append(key[0])
                        plab.append(-1)
                        origin_block.append((key, k))
                    continue
        e, Cb = _gen_eig(h[np.ix_(ind, ind)], S[np.ix_(ind, ind)], threshold)
        if key is not None:
            solved[key] = (ind, e, Cb)
        for k in range(Cb.shape[1]):
            c = np.zeros(n)
            c[ind] = Cb[:, k]
            cols.append(c)
            energies.append(e[k])
            mlab.append(key[0] if key else -1)
            plab.append(key[1] if key else 0)
            origin_block.append((key, k))
    C = np.array(cols).T
    e = np.array(energies)
    order = np.lexsort((np.array(plab) * -1, e))
    C, e = C[:, order], e[order]
    mlab = np.array(mlab)[order]
    plab = np.array(plab)[order]
    ob = [origin_block[i] for i in order]
    # pair up cos/sin partners (same block rank, same |m|)
    pos = {(b[0], b[1]): i for i, b in enumerate(ob) if b[0] is not None}
    pmo = np.full(len(e), -1)
    for i, (key, k) in enumerate(ob):
        if key is not None and key[0] > 0:
            j = pos.get(((key[0], -key[1]), k))
            if j is not None:
                pmo[i] = j
    return MOSet(C, e, mlab, plab, pmo)


def atomic_levels(h, S, labels, threshold: float = LINDEP_THRESHOLD) -> dict:
    """One-electron levels of a single-center problem, per angular momentum.

    Returns ``{l: ascending energies}`` from the m = 0 AOs of each l; h and S
    must not couple different l (true for any atom-centered operator).
    """
    out = {}
    for l in sorted({lab.l for lab in labels}):
        ind = np.array([lab.index for lab in labels if lab.l == l and lab.m == 0])
        e, _ = _gen_eig(h[np.ix_(ind, ind)], S[np.ix_(ind, ind)], threshold)
        out[l] = e
    return out


# ----------------------------------------------------------------- RHF

@dataclass(frozen=True)
class RHFResult:
    mos: MOSet
    energy: float
    iterations: int
    trace: tuple


def _fock(h, eri, P):
    J = np.einsum("pqrs,rs->pq", eri, P, optimize=True)
    K = np.einsum("prqs,rs->pq", eri, P, optimize=True)
    return h + J - 0.5 * K


def rhf(ints: IntegralSet, n_electrons: int = 2, field=None, *, diis: bool = True,
        diis_size: int = 8, damping: float = 0.0, max_iter: int = 200,
        conv_density: float = 1e-9, conv_energy: float = 1e-11, eri=None) -> RHFResult:
    """Closed-shell RHF for two electrons, Fock matrix solved per symmetry block.

    Converged when the largest density change is below ``conv_density`` and
    the energy change below ``conv_energy``.  With ``diis=False`` the density
    is mixed as P <- (1 - damping) P_new + damping P_old.
    """
    if n_electrons != 2:
        raise SCFError("rhf handles the closed-shell two-electron case only")
    h, scalar = core_hamiltonian(ints, field)
    S = ints.S
    eri = ints.eri_total if eri is None else eri
    labels = ints.labels
    mos = solve_one_electron(h, S, labels)

    def density(m):
        c = m.coefficients[:, 0]
        return 2.0 * np.outer(c, c)

    P = density(mos)
    E_old = None
    errs, focks, trace = [], [], []
    for it in range(1, max_iter + 1):
        F = _fock(h, eri, P)
        E = 0.5 * np.sum(P * (h + F)) + scalar
        if diis:
            err = F @ P @ S - S @ P @ F
            errs.append(err)
            focks.append(F)
            if len(errs) > diis_size:
                errs.pop(0)
                focks.pop(0)
            if len(errs) >= 2:
                m = len(errs)
                B = -np.ones((m + 1, m + 1))
                B[m, m] = 0.0
                for i in range(m):
                    for j in range(m):
                        B[i, j] = np.sum(errs[i] * errs[j])
                rhs = np.zeros(m + 1)
                rhs[m] = -1.0
                try:
                    c = np.linalg.solve(B, rhs)[:m]
                    F = sum(ci * Fi for ci, Fi in zip(c, focks))
                except np.linalg.LinAlgError:
                    errs, focks = errs[-1:], focks[-1:]
        mos = solve_one_electron(F, S, labels)
        P_new = density(mos)
        if not diis and damping:
            P_new = (1.0 - damping) * P_new + damping * P
        dP = np.abs(P_new - P).max()
        dE = np.inf if E_old is None else abs(E - E_old)
        trace.append((it, E, dP))
        log.debug("rhf it=%d E=%.14f dP=%.2e", it, E, dP)
        P = P_new
        if dP < conv_density and dE < conv_energy:
            F = _fock(h, eri, P)
            E = 0.5 * np.sum(P * (h + F)) + scalar
            mos = solve_one_electron(F, S, labels)
            return RHFResult(mos, float(E), it, tuple(trace))
        E_old = E
    raise SCFError(f"RHF not converged in {max_iter} iterations", trace)


# ----------------------------------------------------------- transforms

def mo_transform(ints: IntegralSet, mos: MOSet, field=None, *, eri=None):
    """MO-basis one-electron matrix and (ij|kl) tensor (quarter transforms)."""
    C = mos.coefficients
    h, _ = core_hamiltonian(ints, field)
    h_mo = C.T @ h @ C
    eri = ints.eri_total if eri is None else eri
    n, m = C.shape
    g = (C.T @ eri.reshape(n, -1)).reshape(m, n, n, n)
    g = np.einsum("iqrs,qj->ijrs", g, C, optimize=True)
    g = np.einsum("ijrs,rk->ijks", g, C, optimize=True)
    g = np.einsum("ijks,sl->ijkl", g, C, optimize=True)
    return 0.5 * (h_mo + h_mo.T), g


def mo_operator(op, mos: MOSet):
    """Transform one-electron operator(s) (..., N, N) to the MO basis."""
    C = mos.coefficients
    return np.einsum("pi,...pq,qj->...ij", C, op, C, optimize=True)
