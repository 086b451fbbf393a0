"""Two-electron full CI in spin-adapted, axially symmetry-adapted functions.

A two-electron spatial function is stored as a coefficient matrix C over
orbital products, Psi(1, 2) = sum_ij C_ij phi_i(1) phi_j(2), symmetric for
singlets and antisymmetric for triplets, with unit Frobenius norm.  Matrix
elements then read

    <Psi|H|Psi'> = sum C_ij C'_kl [h_ik d_jl + d_ik h_jl + (ik|jl)].

Within a pair of orbital shells (a sigma orbital or a cos/sin pair) the
functions are combined into eigenfunctions of L_z^2 and of the xz mirror,
which gives the Lambda-blocks directly.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
from numba import njit

from .scf import MOSet

__all__ = [
    "CIError",
    "Block",
    "parse_block",
    "DeterminantBasis",
    "CIState",
    "enumerate_determinants",
    "build_hamiltonian",
    "one_electron_matrix",
    "diagonalize",
    "davidson",
    "state_dipole",
    "transition_dipole",
    "align_phases",
    "brute_force_hamiltonian",
    "cisd_energies",
    "orbital_shells",
]

log = logging.getLogger(__name__)

LAMBDA_NAMES = {0: "Sigma", 1: "Pi", 2: "Delta", 3: "Phi", 4: "Gamma", 5: "H", 6: "I"}
DENSE_LIMIT = 2000


class CIError(RuntimeError):
    pass


# ---------------------------------------------------------------- blocks

@dataclass(frozen=True, order=True)
class Block:
    """Symmetry block: spin multiplicity, Lambda (None: no axial symmetry) and
    reflection (+1/-1 for Sigma states or a general block restricted to one
    xz-mirror parity, 0 otherwise)."""

    multiplicity: int
    lam: int | None = 0
    reflection: int = 1

    def __post_init__(self):
        if self.multiplicity not in (1, 2, 3):
            raise CIError(f"multiplicity must be 1 or 3 (two electrons) or 2 (one electron), not {self.multiplicity}")
        if self.lam is not None:
            if self.lam < 0:
                raise CIError("Lambda must be >= 0")
            if self.lam == 0 and self.reflection not in (1, -1):
                raise CIError("Sigma blocks need reflection +1 or -1")
            if self.lam > 0 and self.reflection != 0:
                object.__setattr__(self, "reflection", 0)
        elif self.reflection not in (1, -1, 0):
            raise CIError("reflection must be +1, -1 or 0")

    @property
    def name(self) -> str:
        if self.lam is None:
            tag = {1: "+", -1: "-", 0: ""}[self.reflection]
            return f"{self.multiplicity}any{tag}"
        base = f"{self.multiplicity}{LAMBDA_NAMES[self.lam]}"
        if self.lam == 0:
            base += "+" if self.reflection > 0 else "-"
        return base

    def __str__(self):
        return self.name


_BLOCK_RE = re.compile(r"^([123])(sigma|pi|delta|phi|any)([+-]?)$", re.I)


def parse_block(text) -> Block:
    """Parse names such as ``1Sigma+``, ``3Pi``, ``1Delta``, ``2Sigma+`` or ``1any+``."""
    if isinstance(text, Block):
        return text
    m = _BLOCK_RE.match(str(text).strip())
    if not m:
        raise CIError(f"unknown block tag {text!r}")
    mult = int(m.group(1))
    kind = m.group(2).lower()
    sign = m.group(3)
    if kind == "any":
        return Block(mult, None, {"+": 1, "-": -1, "": 0}[sign])
    lam = ["sigma", "pi", "delta", "phi"].index(kind)
    if lam == 0:
        if not sign:
            raise CIError("Sigma block needs a + or - reflection tag")
        return Block(mult, 0, 1 if sign == "+" else -1)
    if sign:
        raise CIError(f"reflection tag only applies to Sigma blocks: {text!r}")
    return Block(mult, lam, 0)


# ------------------------------------------------------- basis functions

@dataclass(frozen=True)
class DeterminantBasis:
    """Spin- and symmetry-adapted functions of one block.

    Two electrons: function k is C_k = sum_x coef[k, x] e_{ii[k,x]} e_{jj[k,x]}^T
    over its ``nterm[k]`` entries; ``pairs[k]`` records the orbital pair(s) it
    is built from.  One electron (doublet blocks): function k is orbital
    ``ii[k, 0]``.
    """

    block: Block
    nmo: int
    ii: np.ndarray
    jj: np.ndarray
    coef: np.ndarray
    nterm: np.ndarray
    pairs: tuple = field(default=(), repr=False)

    @property
    def size(self) -> int:
        return int(self.ii.shape[0])

    def __len__(self):
        return self.size

    @property
    def n_electrons(self) -> int:
        return 1 if self.block.multiplicity == 2 else 2

    def matrix(self, vec) -> np.ndarray:
        """Coefficient matrix sum_k vec[k] C_k (an MO vector for one electron)."""
        vec = np.asarray(vec, float)
        if self.n_electrons == 1:
            c = np.zeros(self.nmo)
            c[self.ii[:, 0]] = vec
            return c
        C = np.zeros((self.nmo, self.nmo))
        for k in range(self.size):
            n = self.nterm[k]
            np.add.at(C, (self.ii[k, :n], self.jj[k, :n]), vec[k] * self.coef[k, :n])
        return C


def orbital_shells(mos: MOSet):
    """Group MOs into shells: (|m|, [orbital]) for sigma, (|m|, [cos, sin]) pairs.

    Orbitals without a symmetry label raise: they only appear when h itself
    breaks the axial symmetry.
    """
    shells = []
    for k in range(mos.nmo):
        m, p = int(mos.m_labels[k]), int(mos.parity_labels[k])
        if m < 0:
            raise CIError("orbitals carry no axial symmetry labels")
        if m == 0:
            shells.append((0, [k]))
        elif p == 1:
            partner = int(mos.partner[k]) if mos.partner is not None else -1
            if partner < 0:
                raise CIError(f"orbital {k} with |m|={m} has no sin-type partner")
            shells.append((m, [k, partner]))
    return shells


def _pack(funcs, nmo, block, pairs):
    K = max((len(f) for f in funcs), default=1)
    n = len(funcs)
    ii = np.zeros((n, K), dtype=np.int64)
    jj = np.zeros((n, K), dtype=np.int64)
    cc = np.zeros((n, K))
    nt = np.zeros(n, dtype=np.int64)
    for k, f in enumerate(funcs):
        nt[k] = len(f)
        for x, (i, j, c) in enumerate(f):
            ii[k, x], jj[k, x], cc[k, x] = i, j, c
    return DeterminantBasis(block, nmo, ii, jj, cc, nt, tuple(pairs))


def _pair_function(i, j, sign):
    """Entries of (e_i e_j^T + sign e_j e_i^T) / sqrt(2 (1 + d_ij))."""
    if i == j:
        return [(i, i, 1.0)] if sign > 0 else []
    s = 1.0 / np.sqrt(2.0)
    return [(i, j, s), (j, i, sign * s)]


def _shell_pair_functions(A, B, same, sign):
    """Symmetry-adapted functions from shells A, B.

    Returns a list of (Lambda^2, reflection, entries).
    """
    (ma, oa), (mb, ob) = A, B
    orbs = list(oa) if same else list(oa) + list(ob)
    loc = {o: n for n, o in enumerate(orbs)}
    d = len(orbs)
    X = np.zeros((d, d))
    R = np.ones(d)
    for mu, pair in ((ma, oa), (mb, ob)):
        if mu > 0:
            c, s = loc[pair[0]], loc[pair[1]]
            X[s, c] = mu
            X[c, s] = -mu
            R[s] = -1.0
    # primitive spin-adapted functions
    prims = []
    if same:
        for x in range(len(oa)):
            for y in range(x, len(oa)):
                f = _pair_function(oa[x], oa[y], sign)
                if f:
                    prims.append(f)
    else:
        for a in oa:
            for b in ob:
                prims.append(_pair_function(a, b, sign))
    if not prims:
        return []
    P = np.zeros((len(prims), d * d))
    for k, f in enumerate(prims):
        M = np.zeros((d, d))
        for i, j, c in f:
            M[loc[i], loc[j]] += c
        P[k] = M.ravel()
    if len(prims) == 1 and not X.any():
        return [(0, 1, prims[0])]

    def Y(v):
        M = v.reshape(d, d)
        return (X @ M + M @ X.T).ravel()

    L2 = np.array([[-(P[k] @ Y(Y(P[l]))) for l in range(len(prims))] for k in range(len(prims))])
    Rm = np.array([[P[k] @ (R[:, None] * P[l].reshape(d, d) * R[None, :]).ravel()
                    for l in range(len(prims))] for k in range(len(prims))])
    lam2, U = np.linalg.eigh(0.5 * (L2 + L2.T))
    out = []
    for val in np.unique(np.round(lam2).astype(int)):
        sub = U[:, np.abs(lam2 - val) < 1e-6]
        r, V = np.linalg.eigh(sub.T @ Rm @ sub)
        W = sub @ V
        for k in range(W.shape[1]):
            vec = W[:, k] @ P
            big = np.argmax(np.abs(vec))
            vec = vec * np.sign(vec[big])
            ent = []
            M = vec.reshape(d, d)
            for x in range(d):
                for y in range(d):
                    if abs(M[x, y]) > 1e-14:
                        ent.append((orbs[x], orbs[y], float(M[x, y])))
            out.append((int(val), int(round(r[k])), ent))
    return out


def enumerate_determinants(mos: MOSet, block) -> DeterminantBasis:
    """All spin-adapted two-electron functions of ``block`` over the MOs.

    For Lambda > 0 only the mirror-even component of each degenerate pair is
    kept.  ``Block(mult, None, r)`` gives every function of that spin whose
    total xz-mirror parity is r (r = 0: no restriction).
    """
    block = parse_block(block)
    if block.multiplicity == 2:
        return _orbital_basis(mos, block)
    sign = 1 if block.multiplicity == 1 else -1
    nmo = mos.nmo
    funcs, pairs = [], []
    if block.lam is None:
        par = np.asarray(mos.parity_labels)
        for i in range(nmo):
            for j in range(i, nmo):
                if block.reflection and par[i] * par[j] != block.reflection:
                    continue
                f = _pair_function(i, j, sign)
                if f:
                    funcs.append(f)
                    pairs.append((i, j))
        return _pack(funcs, nmo, block, pairs)
    shells = orbital_shells(mos)
    target = block.lam * block.lam
    for a in range(len(shells)):
        for b in range(a, len(shells)):
            A, B = shells[a], shells[b]
            if block.lam > A[0] + B[0] or block.lam < abs(A[0] - B[0]):
                continue
            if (A[0] + B[0] - block.lam) % 2:
                # |m_a +- m_b| has the parity of m_a + m_b
                continue
            for lam2, refl, ent in _shell_pair_functions(A, B, a == b, sign):
                if lam2 != target:
                    continue
                if block.lam == 0 and refl != block.reflection:
                    continue
                if block.lam > 0 and refl != 1:
                    continue
                funcs.append(ent)
                pairs.append((tuple(A[1]), tuple(B[1])))
    return _pack(funcs, nmo, block, pairs)


def _orbital_basis(mos, block):
    m = np.asarray(mos.m_labels)
    p = np.asarray(mos.parity_labels)
    if block.lam is None:
        sel = np.arange(mos.nmo) if block.reflection == 0 else np.flatnonzero(p == block.reflection)
    elif block.lam == 0:
        sel = np.flatnonzero((m == 0) & (p == block.reflection))
    else:
        sel = np.flatnonzero((m == block.lam) & (p == 1))
    funcs = [[(int(k), int(k), 1.0)] for k in sel]
    return _pack(funcs, mos.nmo, block, [(int(k),) for k in sel])


# ----------------------------------------------------------- Hamiltonian

@njit(cache=True)
def _block_matrix(ii, jj, cc, nt, h, eri, with_eri):
    n = ii.shape[0]
    H = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1):
            s = 0.0
            for x in range(nt[a]):
                i = ii[a, x]
                j = jj[a, x]
                ca = cc[a, x]
                for y in range(nt[b]):
                    k = ii[b, y]
                    l = jj[b, y]
                    v = 0.0
                    if j == l:
                        v += h[i, k]
                    if i == k:
                        v += h[j, l]
                    if with_eri:
                        v += eri[i, k, j, l]
                    s += ca * cc[b, y] * v
            H[a, b] = s
            H[b, a] = s
    return H


def build_hamiltonian(basis: DeterminantBasis, h_mo, eri_mo, constant: float = 0.0) -> np.ndarray:
    """Block Hamiltonian (plus ``constant`` on the diagonal)."""
    h_mo = np.ascontiguousarray(h_mo, dtype=float)
    eri_mo = np.ascontiguousarray(eri_mo, dtype=float)
    n = basis.nmo
    if h_mo.shape != (n, n):
        raise CIError(f"one-electron integrals {h_mo.shape} do not match {n} orbitals")
    if basis.n_electrons == 1:
        o = basis.ii[:, 0]
        H = h_mo[np.ix_(o, o)].copy()
        if constant:
            H[np.diag_indices_from(H)] += constant
        return H
    if eri_mo.shape != (n, n, n, n):
        raise CIError(f"two-electron integrals {eri_mo.shape} do not match {n} orbitals")
    H = _block_matrix(basis.ii, basis.jj, basis.coef, basis.nterm, h_mo, eri_mo, True)
    if constant:
        H[np.diag_indices_from(H)] += constant
    return H


def one_electron_matrix(basis: DeterminantBasis, op_mo, basis_b: DeterminantBasis | None = None) -> np.ndarray:
    """Matrix of a one-electron operator sum_i g(i) over the block functions."""
    op_mo = np.ascontiguousarray(op_mo, dtype=float)
    dummy = np.zeros((1, 1, 1, 1))
    if basis.n_electrons == 1:
        ob = (basis if basis_b is None else basis_b).ii[:, 0]
        return op_mo[np.ix_(basis.ii[:, 0], ob)].copy()
    if basis_b is None:
        return _block_matrix(basis.ii, basis.jj, basis.coef, basis.nterm, op_mo, dummy, False)
    Ca = [basis.matrix(np.eye(basis.size)[k]) for k in range(basis.size)]
    Cb = [basis_b.matrix(np.eye(basis_b.size)[k]) for k in range(basis_b.size)]
    return np.array([[_one_body(A, op_mo, B) for B in Cb] for A in Ca])


def _one_body(C, g, Cp):
    return float(np.sum(C * (g @ Cp)) + np.sum(C * (Cp @ g.T)))


# ---------------------------------------------------------- eigensolver

@dataclass
class CIState:
    energy: float
    vector: np.ndarray
    block: Block
    root: int
    basis: DeterminantBasis | None = field(default=None, repr=False)
    label: str = ""
    asymptote: str = ""

    @property
    def multiplicity(self) -> int:
        return self.block.multiplicity

    @property
    def lam(self):
        return self.block.lam

    def coefficient_matrix(self) -> np.ndarray:
        if self.basis is None:
            raise CIError("state has no attached basis")
        return self.basis.matrix(self.vector)


def davidson(H, n_roots: int = 1, *, tol: float = 1e-9, max_iter: int = 500, max_space: int | None = None,
             guess=None):
    """Lowest eigenpairs of symmetric H by Davidson iteration with a diagonal preconditioner.

    Returns (energies, vectors).  ``H`` may be a dense array or any object
    with ``@`` and a ``diagonal()`` method.
    """
    n = H.shape[0]
    k = min(n_roots, n)
    diag = np.asarray(H.diagonal()).copy()
    max_space = max_space or max(8 * k, 40)
    if guess is None:
        V = np.zeros((n, k))
        V[np.argsort(diag)[:k], np.arange(k)] = 1.0
    else:
        V = np.linalg.qr(np.asarray(guess, float).reshape(n, -1))[0]
    AV = H @ V
    res_hist = []
    for it in range(max_iter):
        G = V.T @ AV
        theta, s = np.linalg.eigh(0.5 * (G + G.T))
        theta, s = theta[:k], s[:, :k]
        X = V @ s
        R = AV @ s - X * theta
        rn = np.linalg.norm(R, axis=0)
        res_hist.append(rn.max())
        if rn.max() < tol:
            return theta, X
        new = []
        for j in range(k):
            if rn[j] < tol:
                continue
            den = theta[j] - diag
            den[np.abs(den) < 1e-8] = 1e-8
            new.append(R[:, j] / den)
        T = np.array(new).T
        if V.shape[1] + T.shape[1] > max_space:
            V, AV = X, AV @ s
        T -= V @ (V.T @ T)
        T -= V @ (V.T @ T)
        Q, rr = np.linalg.qr(T)
        keep = np.abs(np.diag(rr)) > 1e-10
        if not keep.any():
            if rn.max() < 1e-6:
                return theta, X
            raise CIError(f"Davidson stagnated at iteration {it}; residuals {rn}")
        Q = Q[:, keep]
        V = np.hstack([V, Q])
        AV = np.hstack([AV, H @ Q])
    raise CIError(f"Davidson not converged after {max_iter} iterations; last residuals {res_hist[-3:]}")


def _fix_phase(v):
    big = np.argmax(np.abs(v))
    return v * np.sign(v[big]) if v[big] != 0 else v


def diagonalize(H, n_roots: int = 1, *, basis: DeterminantBasis | None = None, block=None,
                method: str = "auto", tol: float = 1e-9) -> list:
    """Lowest ``n_roots`` eigenstates; dense below DENSE_LIMIT, Davidson above."""
    H = np.asarray(H, float)
    n = H.shape[0]
    if n == 0:
        return []
    if not np.allclose(H, H.T, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise CIError("Hamiltonian is not symmetric")
    k = min(n_roots, n)
    if method == "auto":
        method = "dense" if n < DENSE_LIMIT else "davidson"
    if method == "dense":
        e, V = np.linalg.eigh(H)
        e, V = e[:k], V[:, :k]
    elif method == "davidson":
        e, V = davidson(H, k, tol=tol)
    else:
        raise CIError(f"unknown method {method!r}")
    blk = basis.block if basis is not None else (parse_block(block) if block is not None else None)
    return [CIState(float(e[r]), _fix_phase(V[:, r]), blk, r, basis) for r in range(k)]


# ------------------------------------------------------------- dipoles

def _electronic(state_a, state_b, op_mo):
    Ca = state_a.coefficient_matrix()
    Cb = state_b.coefficient_matrix()
    if Ca.ndim == 1:
        return np.array([Ca @ g @ Cb for g in op_mo])
    return np.array([_one_body(Ca, g, Cb) for g in op_mo])


def transition_dipole(state_a: CIState, state_b: CIState, op_mo, nuclear_dipole=None) -> np.ndarray:
    """Dipole matrix element <a| -sum_i g(i) |b> (electrons carry charge -1).

    ``op_mo`` is the electron position operator (or field coupling) in the
    MO basis, shape (3, n, n).  When ``state_b is state_a`` and
    ``nuclear_dipole`` is given the nuclear term is added, which makes the
    diagonal element the permanent dipole.
    """
    if state_a.multiplicity != state_b.multiplicity:
        return np.zeros(len(op_mo))
    mu = -_electronic(state_a, state_b, op_mo)
    if state_a is state_b and nuclear_dipole is not None:
        mu = mu + np.asarray(nuclear_dipole, float)
    return mu


def state_dipole(state: CIState, op_mo, nuclear_dipole) -> np.ndarray:
    """Permanent dipole: nuclear (and core) term minus the electronic expectation value.

    ``op_mo`` is the field-coupling operator in the MO basis; for a pure
    point-charge model it is the electron position relative to the origin.
    """
    mu = transition_dipole(state, state, op_mo, nuclear_dipole)
    if state.lam is not None and state.lam > 0:
        # only the mirror-even component is carried; perpendicular parts vanish
        mu[:2] = 0.0
    return mu


def align_phases(states, previous) -> list:
    """Flip signs so each state overlaps positively with its counterpart."""
    out = []
    for s, p in zip(states, previous):
        if p is not None and s.vector.shape == p.vector.shape and s.vector @ p.vector < 0:
            s = replace(s, vector=-s.vector)
        out.append(s)
    return out


# ------------------------------------------------- reference code paths

def brute_force_hamiltonian(h, eri, n_electrons: int = 2):
    """Hamiltonian over all Slater determinants of ``n_electrons`` in 2n spin orbitals.

    Built by applying second-quantized creation/annihilation strings to
    occupation bit strings; spin orbital 2p is p-alpha, 2p+1 is p-beta.
    Returns (H, determinants).
    """
    n = h.shape[0]
    nso = 2 * n
    dets = [sum(1 << q for q in occ) for occ in combinations(range(nso), n_electrons)]
    index = {d: k for k, d in enumerate(dets)}

    def annihilate(det, q):
        if not det >> q & 1:
            return None, 0
        sign = -1 if bin(det & ((1 << q) - 1)).count("1") % 2 else 1
        return det ^ (1 << q), sign

    def create(det, q):
        if det >> q & 1:
            return None, 0
        sign = -1 if bin(det & ((1 << q) - 1)).count("1") % 2 else 1
        return det | (1 << q), sign

    def apply(ops, det):
        sign = 1
        for kind, q in reversed(ops):
            det, s = (create if kind == "+" else annihilate)(det, q)
            if det is None:
                return None, 0
            sign *= s
        return det, sign

    H = np.zeros((len(dets), len(dets)))
    for col, det in enumerate(dets):
        occ = [q for q in range(nso) if det >> q & 1]
        # annihilators only act on occupied spin orbitals
        for Q in occ:
            for P in range(Q % 2, nso, 2):
                d, s = apply([("+", P), ("-", Q)], det)
                if d is not None:
                    H[index[d], col] += s * h[P // 2, Q // 2]
        for Q in occ:
            for S in occ:
                for P in range(Q % 2, nso, 2):
                    for Rr in range(S % 2, nso, 2):
                        d, s = apply([("+", P), ("+", Rr), ("-", S), ("-", Q)], det)
                        if d is not None:
                            H[index[d], col] += 0.5 * s * eri[P // 2, Q // 2, Rr // 2, S // 2]
    return H, dets


def cisd_energies(h, eri, n_roots: int = 1, reference=(0, 1)):
    """CISD over spin-orbital determinants with Slater-Condon rules.

    The reference occupies spin orbitals ``reference``; singles and doubles
    are generated from it.  For two electrons this spans the full space.
    """
    n = h.shape[0]
    nso = 2 * n
    ref = tuple(sorted(reference))
    nel = len(ref)
    virt = [q for q in range(nso) if q not in ref]
    dets = {ref}
    for i in ref:
        for a in virt:
            dets.add(tuple(sorted(set(ref) - {i} | {a})))
    for i, j in combinations(ref, 2):
        for a, b in combinations(virt, 2):
            dets.add(tuple(sorted(set(ref) - {i, j} | {a, b})))
    dets = sorted(dets)

    def g(p, q, r, s):  # <pq|rs> antisymmetrized, spin orbitals
        v = 0.0
        if p % 2 == r % 2 and q % 2 == s % 2:
            v += eri[p // 2, r // 2, q // 2, s // 2]
        if p % 2 == s % 2 and q % 2 == r % 2:
            v -= eri[p // 2, s // 2, q // 2, r // 2]
        return v

    def hs(p, q):
        return h[p // 2, q // 2] if p % 2 == q % 2 else 0.0

    def element(D1, D2):
        s1, s2 = set(D1), set(D2)
        diff1 = sorted(s1 - s2)
        diff2 = sorted(s2 - s1)
        if len(diff1) > 2:
            return 0.0
        # permutation sign bringing D2 into maximal coincidence with D1
        common = [q for q in D1 if q in s2]
        o1 = common + diff1
        o2 = common + diff2
        sign = _perm_sign(D1, o1) * _perm_sign(D2, o2)
        if not diff1:
            e = sum(hs(p, p) for p in D1)
            e += 0.5 * sum(g(p, q, p, q) for p in D1 for q in D1)
            return e
        if len(diff1) == 1:
            m, p = diff1[0], diff2[0]
            return sign * (hs(m, p) + sum(g(m, q, p, q) for q in common))
        m, n_ = diff1
        p, q = diff2
        return sign * g(m, n_, p, q)

    H = np.array([[element(a, b) for b in dets] for a in dets])
    e = np.linalg.eigvalsh(0.5 * (H + H.T))
    return e[:n_roots]


def _perm_sign(seq, target):
    pos = {v: k for k, v in enumerate(seq)}
    perm = [pos[v] for v in target]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
