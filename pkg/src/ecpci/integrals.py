"""AO-basis integrals at a fixed geometry.

Analytic Hermite-Gaussian integrals (overlap, kinetic, point-charge
attraction, dipole, electron repulsion) and quadrature-based core-potential
integrals (semi-local ECP, l-projected core-polarization potential).

Field conventions: an external uniform field F adds ``F . (r - O)`` per
electron and ``-Z_c F . (R_c - O)`` per core, O being the dipole origin.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _angular, _md
from .basis import BasisError, MoleculeSpec, build_ao_list, normalize
from .boys import boys_function

__all__ = [
    "IntegralError",
    "IntegralSet",
    "ShellArrays",
    "shell_arrays",
    "overlap_kinetic_dipole",
    "core_attraction",
    "eri_tensor",
    "cross_overlap",
    "ecp_matrix",
    "cpp_matrix",
    "CPPTerms",
    "compute_integrals",
    "real_harmonic_polys",
    "radial_grid",
    "boys_function",
]

log = logging.getLogger(__name__)

LINDEP_THRESHOLD = 1e-8


class IntegralError(RuntimeError):
    """Numerical failure while evaluating integrals."""


# ------------------------------------------------------------ flattening

@dataclass(frozen=True)
class ShellArrays:
    sh_l: np.ndarray
    sh_ctr: np.ndarray
    sh_start: np.ndarray
    sh_nprim: np.ndarray
    exps: np.ndarray
    coefs: np.ndarray
    ao_off: np.ndarray
    centers: np.ndarray
    nao: int


def _prepare(spec: MoleculeSpec, R: float | None) -> MoleculeSpec:
    if R is not None:
        spec = spec.at_distance(R)
    if not all(sh.normalized for sh in spec.shells):
        spec = replace(spec, shells=tuple(sh if sh.normalized else normalize(sh) for sh in spec.shells))
    build_ao_list(spec)  # geometry check
    return spec


def shell_arrays(spec: MoleculeSpec) -> ShellArrays:
    """Flatten normalized shells into the arrays the numba kernels consume."""
    sh_l, sh_ctr, sh_start, sh_nprim, ao_off = [], [], [], [], []
    exps, coefs = [], []
    off = 0
    for sh in spec.shells:
        if not sh.normalized:
            sh = normalize(sh)
        sh_l.append(sh.l)
        sh_ctr.append(sh.center_index)
        sh_start.append(len(exps))
        sh_nprim.append(len(sh.primitives))
        ao_off.append(off)
        off += sh.nfunc
        exps.extend(sh.exponents)
        coefs.extend(sh.coefficients)
    i64 = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
    return ShellArrays(
        i64(sh_l), i64(sh_ctr), i64(sh_start), i64(sh_nprim),
        np.asarray(exps, float), np.asarray(coefs, float), i64(ao_off),
        np.ascontiguousarray(spec.positions, dtype=float), off,
    )


_POWERS = _md.cart_table()
_C2S = _md.c2s_table()


def _default_origin(spec: MoleculeSpec) -> np.ndarray:
    return spec.center_of_mass()


# -------------------------------------------------------- analytic parts

def _one_electron(spec, origin, charges=None):
    sa = shell_arrays(spec)
    z = spec.charges if charges is None else np.asarray(charges, float)
    return _md.one_electron(
        sa.sh_l, sa.sh_ctr, sa.sh_start, sa.sh_nprim, sa.exps, sa.coefs, sa.centers,
        sa.ao_off, sa.centers, np.ascontiguousarray(z, dtype=float),
        np.asarray(origin, float), _POWERS, _C2S, sa.nao,
    )


def overlap_kinetic_dipole(spec: MoleculeSpec, R: float | None = None, origin=None):
    """Return S, T and D (shape (3, N, N)); D_q = <p| q - O_q |q>.

    The origin defaults to the center of nuclear mass.
    """
    spec = _prepare(spec, R)
    origin = _default_origin(spec) if origin is None else np.asarray(origin, float)
    S, T, _, D = _one_electron(spec, origin)
    return S, T, D


def core_attraction(spec: MoleculeSpec, R: float | None = None, charges=None) -> np.ndarray:
    """V_pq = -sum_c Z_c <p| 1/|r - R_c| |q> with the effective core charges."""
    spec = _prepare(spec, R)
    _, _, V, _ = _one_electron(spec, np.zeros(3), charges)
    return V


def eri_tensor(spec: MoleculeSpec, R: float | None = None) -> np.ndarray:
    """(pq|rs) in chemists' notation, all N^4 entries filled."""
    spec = _prepare(spec, R)
    sa = shell_arrays(spec)
    return _md.eri_tensor(sa.sh_l, sa.sh_ctr, sa.sh_start, sa.sh_nprim, sa.exps, sa.coefs,
                          sa.centers, sa.ao_off, _POWERS, _C2S, sa.nao)


def cross_overlap(spec_a: MoleculeSpec, spec_b: MoleculeSpec) -> np.ndarray:
    """Overlap <chi_p(a)|chi_q(b)> between the AOs of two geometries."""
    spec_a = _prepare(spec_a, None)
    spec_b = _prepare(spec_b, None)
    k = len(spec_a.centers)
    both = MoleculeSpec(
        centers=spec_a.centers + spec_b.centers,
        shells=spec_a.shells + tuple(sh.on_center(sh.center_index + k) for sh in spec_b.shells),
    )
    S, _, _, _ = _one_electron(both, np.zeros(3))
    return S[: spec_a.nao, spec_a.nao:]


# ----------------------------------------------- angular polynomial tables

def real_harmonic_polys(lmax: int) -> list:
    """Unit-sphere real harmonics Y_lm as monomial lists [(coef, a, b, s), ...].

    Ordered l = 0..lmax, m = -l..l; Y_lm = sqrt((2l+1)/4pi) S_lm(n).
    """
    from .basis import cartesian_powers, solid_harmonic_matrix

    polys = []
    for l in range(lmax + 1):
        C = solid_harmonic_matrix(l) * math.sqrt((2 * l + 1) / (4 * math.pi))
        for m in range(2 * l + 1):
            polys.append([(C[m, c], *p) for c, p in enumerate(cartesian_powers(l)) if C[m, c] != 0.0])
    return polys


def _times_axis(poly, k):
    out = []
    for c, a, b, s in poly:
        e = [a, b, s]
        e[k] += 1
        out.append((c, *e))
    return out


def _pack(polys):
    nmax = max(len(p) for p in polys)
    mono = np.zeros((len(polys), nmax, 4))
    nterm = np.zeros(len(polys), dtype=np.int64)
    for i, p in enumerate(polys):
        nterm[i] = len(p)
        for k, t in enumerate(p):
            mono[i, k] = t
    return mono, nterm


_UNIT = _pack([[(1.0, 0, 0, 0)]])
_AXES = [_pack([[(1.0, 1, 0, 0)]]), _pack([[(1.0, 0, 1, 0)]]), _pack([[(1.0, 0, 0, 1)]])]


# ------------------------------------------------------ radial quadrature

def radial_grid(breaks, n: int):
    """Composite Gauss-Legendre nodes/weights on consecutive ``breaks`` panels."""
    x, w = np.polynomial.legendre.leggauss(n)
    b = np.asarray(breaks, float)
    lo, hi = b[:-1, None], b[1:, None]
    r = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    wr = 0.5 * (hi - lo) * w[None, :]
    return r.ravel(), wr.ravel()


def _breakpoints(rmax, extra=()):
    pts = {0.0, rmax}
    r = 2.0**-8
    while r < rmax:
        pts.add(r)
        r *= 2.0
    for e in extra:
        if 0.0 < e < rmax:
            pts.add(float(e))
    pts = np.array(sorted(pts))
    keep = np.concatenate([[True], np.diff(pts) > 1e-9])
    return pts[keep]


def _offcenter_breaks(zs):
    out = []
    for d in zs:
        d = abs(d)
        if d > 0:
            for w in (0.0, 0.05, 0.15, 0.4, 1.0, 2.5):
                out.extend([d - w, d + w])
    return out


def _ao_rmax(spec):
    rmax = 8.0
    for sh in spec.shells:
        d = abs(spec.positions[sh.center_index, 2])
        rmax = max(rmax, d + math.sqrt(50.0 / sh.exponents.min()))
    return rmax


def _shell_frame(spec, c):
    zc = spec.positions[c, 2]
    return [spec.positions[sh.center_index, 2] - zc for sh in spec.shells]


def _projections(spec, zs, polys, r):
    """Array (nao, npoly, nr) of int dOmega poly(n) chi_p(r n) about the core."""
    mono, nterm = _pack(polys)
    gl_t, gl_w = _angular._GL_T, _angular._GL_W
    blocks = []
    for sh, z in zip(spec.shells, zs):
        blocks.append(_angular.project_shell(sh.l, z, sh.exponents, sh.coefficients, _POWERS, _C2S,
                                             mono, nterm, r, gl_t, gl_w))
    return np.concatenate(blocks, axis=0)


def _local(spec, zs, theta, Vw, r):
    """(nop, nao, nao) matrices of sum_i Vw[op, i] int dOmega theta chi_p chi_q."""
    mono, nterm = theta
    gl_t, gl_w = _angular._GL_T, _angular._GL_W
    nao = spec.nao
    out = np.zeros((Vw.shape[0], nao, nao))
    offs = np.cumsum([0] + [sh.nfunc for sh in spec.shells])
    Vw = np.ascontiguousarray(Vw)
    for a, sha in enumerate(spec.shells):
        for b in range(a + 1):
            shb = spec.shells[b]
            blk = _angular.local_pair_block(sha.l, zs[a], sha.exponents, sha.coefficients,
                                            shb.l, zs[b], shb.exponents, shb.coefficients,
                                            _POWERS, _C2S, mono, nterm, Vw, r, gl_t, gl_w)
            out[:, offs[a]:offs[a + 1], offs[b]:offs[b + 1]] = blk
            if a != b:
                out[:, offs[b]:offs[b + 1], offs[a]:offs[a + 1]] = blk.transpose(0, 2, 1)
    return out


def _converge(evaluate, breaks, tol, what, n0=16, nmax=256):
    """Double nodes per panel until successive results agree to ``tol``."""
    n = n0
    prev = evaluate(*radial_grid(breaks, n))
    while True:
        n *= 2
        cur = evaluate(*radial_grid(breaks, n))
        diff = np.max(np.abs(cur - prev)) if cur.size else 0.0
        if diff < tol:
            return cur
        if n >= nmax:
            idx = np.unravel_index(np.argmax(np.abs(cur - prev)), cur.shape)
            raise IntegralError(f"{what}: radial quadrature not converged (change {diff:.2e} at element {idx})")
        prev = cur


# -------------------------------------------------------------------- ECP

def _ecp_single(spec, c, ecp, tol):
    zs = _shell_frame(spec, c)
    L = ecp.max_l
    polys = real_harmonic_polys(L) if L >= 0 else []
    rmax = ecp.envelope_radius(1e-16)
    breaks = _breakpoints(rmax, _offcenter_breaks(zs))

    def evaluate(r, w):
        W = np.zeros((spec.nao, spec.nao))
        loc = ecp.radial(None, r) if ecp.local else np.zeros_like(r)
        if polys:
            F = _projections(spec, zs, polys, r)
            k = 0
            for l in range(L + 1):
                rad = (ecp.radial(l, r) - loc) * w * r * r
                blk = F[:, k:k + 2 * l + 1, :]
                W += np.einsum("pmi,qmi,i->pq", blk, blk, rad, optimize=True)
                k += 2 * l + 1
        if ecp.local:
            W += _local(spec, zs, _UNIT, (w * r * r * loc)[None, :], r)[0]
        return 0.5 * (W + W.T)

    return _converge(evaluate, breaks, tol, f"ECP on center {c}")


def ecp_matrix(spec: MoleculeSpec, R: float | None = None, tol: float = 1e-10) -> np.ndarray:
    """Semi-local ECP matrix summed over all centers carrying an ECP."""
    spec = _prepare(spec, R)
    W = np.zeros((spec.nao, spec.nao))
    for c, ecp in sorted(spec.ecp.items()):
        if ecp is not None:
            W += _ecp_single(spec, c, ecp, tol)
    return W


# -------------------------------------------------------------------- CPP

@dataclass(frozen=True)
class CPPTerms:
    """One-electron CPP data for all polarizable cores.

    ``W``: field-free one-electron operator (self term plus electron/other-core
    cross term).  ``field_ops[c]``: cut-off field operators f_c (3, N, N) of one
    electron at core c.  ``nuclear_field[c]``: field of the other cores at c.
    ``scalar``: -alpha/2 |f_N|^2 summed over cores.
    """

    W: np.ndarray
    alphas: tuple = ()
    field_ops: tuple = ()
    nuclear_field: tuple = ()
    scalar: float = 0.0


def _cpp_check(spec, c, cpp):
    lmax_c = max((sh.l for sh in spec.shells if sh.center_index == c), default=-1)
    top = max(cpp.max_l, lmax_c)
    missing = [l for l in range(top + 1) if l not in cpp.cutoff_radii]
    if cpp.core_polarizability > 0 and missing:
        raise BasisError(f"CPP on center {c}: missing cut-off radius for l = {missing}")


def _cpp_single(spec, c, cpp, tol):
    zs = _shell_frame(spec, c)
    L = cpp.max_l
    alpha = cpp.core_polarizability
    # channels l < L are projected; everything else uses rho_L
    polys = real_harmonic_polys(L - 1) if L >= 1 else []
    npl = len(polys)
    allpolys = polys + [_times_axis(p, k) for k in range(3) for p in polys]
    rmax = _ao_rmax(spec)
    extra = list(cpp.cutoff_radii.values()) + _offcenter_breaks(zs)
    breaks = _breakpoints(rmax, extra)

    def evaluate(r, w):
        frem = cpp.field_factor(None, r)
        wr2 = w * r * r
        r2 = r * r
        r4 = r2 * r2
        out = np.zeros((4, spec.nao, spec.nao))
        # local remainder pieces
        out[0] = _local(spec, zs, _UNIT, (wr2 * frem**2 / r4)[None, :], r)[0]
        for k in range(3):
            out[1 + k] = _local(spec, zs, _AXES[k], (wr2 * frem / r2)[None, :], r)[0]
        if npl:
            P = _projections(spec, zs, allpolys, r)
            j = 0
            for l in range(L):
                fl = cpp.field_factor(l, r)
                sl = slice(j, j + 2 * l + 1)
                blk = P[:, sl, :]
                out[0] += np.einsum("pmi,qmi,i->pq", blk, blk, wr2 * (fl**2 - frem**2) / r4, optimize=True)
                for k in range(3):
                    g = P[:, npl * (k + 1) + j: npl * (k + 1) + j + 2 * l + 1, :]
                    out[1 + k] += np.einsum("pmi,qmi,i->pq", g, blk, wr2 * (fl - frem) / r2, optimize=True)
                j += 2 * l + 1
        for k in range(4):
            out[k] = 0.5 * (out[k] + out[k].T)
        return out

    mats = _converge(evaluate, breaks, tol, f"CPP on center {c}")
    self_term = -0.5 * alpha * mats[0]
    fops = mats[1:]
    # field of the other cores at c (cut-off with the remainder channel)
    fN = np.zeros(3)
    for c2 in range(len(spec.centers)):
        if c2 == c:
            continue
        d = spec.positions[c2] - spec.positions[c]
        dist = np.linalg.norm(d)
        fN += spec.charges[c2] * d / dist**3 * float(cpp.field_factor(None, np.array(dist)))
    W = self_term + alpha * np.einsum("k,kpq->pq", fN, fops)
    return W, fops, fN


def cpp_matrix(spec: MoleculeSpec, R: float | None = None, tol: float = 1e-10) -> CPPTerms:
    """Core-polarization one-electron operator and field data.

    V_cpp = -1/2 sum_c alpha_c |f_c|^2 with f_c the cut-off field at core c of
    the valence electrons and the other cores.  Expanding the square gives the
    one-electron self term, the electron/other-core cross term, a core-core
    scalar and the two-electron term -alpha_c f_c(1) . f_c(2).
    """
    spec = _prepare(spec, R)
    W = np.zeros((spec.nao, spec.nao))
    alphas, fops, fNs = [], [], []
    scalar = 0.0
    for c, cpp in sorted(spec.cpp.items()):
        if cpp is None or cpp.core_polarizability == 0.0:
            continue
        _cpp_check(spec, c, cpp)
        Wc, f, fN = _cpp_single(spec, c, cpp, tol)
        W += Wc
        alphas.append(cpp.core_polarizability)
        fops.append(f)
        fNs.append(fN)
        scalar += -0.5 * cpp.core_polarizability * float(fN @ fN)
    return CPPTerms(W, tuple(alphas), tuple(fops), tuple(fNs), scalar)


# ------------------------------------------------------------ IntegralSet

@dataclass(frozen=True)
class IntegralSet:
    """All AO-basis quantities needed downstream at one geometry.

    ``field_coupling[k]`` is the one-electron operator multiplying F_k in the
    Hamiltonian; ``nuclear_dipole`` b and ``core_alpha`` a give the scalar
    field dependence  e_nuc - F . b - a |F|^2 / 2.  Without core polarization
    field_coupling equals D and b is the point-charge dipole.
    """

    S: np.ndarray
    T: np.ndarray
    V: np.ndarray
    W_ecp: np.ndarray
    W_cpp: np.ndarray
    D: np.ndarray
    eri: np.ndarray
    e_nuc: float
    field_coupling: np.ndarray
    nuclear_dipole: np.ndarray
    core_alpha: float
    R: float
    origin: np.ndarray
    charge: float
    labels: tuple = field(default=(), repr=False)
    cpp_factors: tuple = field(default=(), repr=False)
    eri_includes_cpp: bool = False

    @property
    def nao(self) -> int:
        return self.S.shape[0]

    @property
    def h0(self) -> np.ndarray:
        return self.T + self.V + self.W_ecp + self.W_cpp

    @property
    def eri_total(self) -> np.ndarray:
        """Electron repulsion plus, when enabled, the two-electron CPP term."""
        return self.eri

    def eri_coulomb(self) -> np.ndarray:
        """Bare Coulomb (pq|rs) (the CPP term removed if it was added)."""
        if not self.eri_includes_cpp:
            return self.eri
        out = self.eri.copy()
        for a, f in self.cpp_factors:
            out += a * np.einsum("kpq,krs->pqrs", f, f, optimize=True)
        return out

    def dump_csv(self, directory) -> list:
        """Write each matrix as CSV (debugging aid); returns the paths."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        out = []
        mats = {"S": self.S, "T": self.T, "V": self.V, "W_ecp": self.W_ecp, "W_cpp": self.W_cpp,
                "D_x": self.D[0], "D_y": self.D[1], "D_z": self.D[2]}
        for name, m in mats.items():
            p = d / f"{name}.csv"
            np.savetxt(p, m, delimiter=",", fmt="%.17g")
            out.append(p)
        return out


def compute_integrals(spec: MoleculeSpec, R: float | None = None, origin=None, *,
                      cpp_two_electron: bool = True, cpp_external_field: bool = True,
                      with_eri: bool = True, tol: float = 1e-10) -> IntegralSet:
    """Evaluate every integral class at internuclear distance R."""
    spec = _prepare(spec, R)
    origin = _default_origin(spec) if origin is None else np.asarray(origin, float)
    S, T, V, D = _one_electron(spec, origin)
    evals = np.linalg.eigvalsh(S)
    if evals[0] <= 0:
        raise IntegralError("overlap matrix is not positive definite")
    log.info("R=%.4f  nao=%d  cond(S)=%.3e", spec.distance, spec.nao, evals[-1] / evals[0])
    if evals[0] < LINDEP_THRESHOLD:
        log.warning("near linear dependence: smallest S eigenvalue %.3e", evals[0])
    W_ecp = ecp_matrix(spec, tol=tol) if spec.ecp else np.zeros_like(S)
    cpp = cpp_matrix(spec, tol=tol) if spec.cpp else CPPTerms(np.zeros_like(S))
    eri = eri_tensor(spec) if with_eri else np.zeros((spec.nao,) * 4)
    with_cpp2 = bool(cpp.alphas) and cpp_two_electron and spec.n_valence_electrons == 2
    if with_cpp2:
        n = spec.nao
        flat = eri.reshape(n * n, n * n)
        for a, f in zip(cpp.alphas, cpp.field_ops):
            fm = f.reshape(3, n * n)
            flat -= a * (fm.T @ fm)
    nuc_dip = (spec.charges[:, None] * (spec.positions - origin)).sum(0)
    coupling = D.copy()
    core_alpha = 0.0
    if cpp_external_field:
        for a, f, fN in zip(cpp.alphas, cpp.field_ops, cpp.nuclear_field):
            coupling -= a * f
            nuc_dip = nuc_dip - a * fN
            core_alpha += a
    charge = float(spec.charges.sum() - spec.n_valence_electrons)
    return IntegralSet(
        S=S, T=T, V=V, W_ecp=W_ecp, W_cpp=cpp.W, D=D, eri=eri,
        e_nuc=spec.nuclear_repulsion() + cpp.scalar,
        field_coupling=coupling, nuclear_dipole=nuc_dip, core_alpha=core_alpha,
        R=spec.distance, origin=origin, charge=charge,
        labels=tuple(build_ao_list(spec)),
        cpp_factors=tuple(zip(cpp.alphas, cpp.field_ops)),
        eri_includes_cpp=with_cpp2,
    )
