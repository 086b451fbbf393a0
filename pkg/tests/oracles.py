"""Independent numerical-quadrature references for the AO integrals.

Nothing here calls the analytic integral code.  AO values come from
``eval_ao``; one- and two-center quantities are integrated with scipy's
adaptive ``quad_vec`` over the radius and a product angular grid
(Gauss-Legendre in cos(theta), trapezoid in phi, which is exact for the
finite Fourier content of functions on a common axis).  The ERI reference
uses the Laplace transform of 1/r12 with Gauss-Hermite inner integrals.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.special import sph_harm_y

from ecpci.basis import build_ao_list, cartesian_powers, eval_ao, normalize, solid_harmonic_matrix

EPS = 1e-13
RMAX = 30.0


def angular_grid(n_theta=96, n_phi=48):
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    ph = np.arange(n_phi) * 2 * np.pi / n_phi
    CT, PH = np.meshgrid(ct, ph, indexing="ij")
    ST = np.sqrt(1 - CT**2)
    n = np.stack([ST * np.cos(PH), ST * np.sin(PH), CT], -1).reshape(-1, 3)
    w = (wt[:, None] * np.full(n_phi, 2 * np.pi / n_phi)).ravel()
    return n, w


def real_ylm(lmax, n):
    """Real orthonormal spherical harmonics at unit vectors n, grouped by l."""
    theta = np.arccos(np.clip(n[:, 2], -1, 1))
    phi = np.arctan2(n[:, 1], n[:, 0])
    out = []
    for l in range(lmax + 1):
        cols = []
        for m in range(-l, l + 1):
            y = sph_harm_y(l, abs(m), theta, phi)
            if m == 0:
                cols.append(y.real)
            elif m > 0:
                cols.append(math.sqrt(2) * y.real)
            else:
                cols.append(math.sqrt(2) * y.imag)
        out.append(np.stack(cols, 1))
    return out


def _normalized(spec):
    return replace(spec, shells=tuple(normalize(sh) if not sh.normalized else sh for sh in spec.shells))


def _radial(fun, center, spec, extra=(), epsabs=EPS, grid=(96, 48)):
    """quad_vec of fun(r, points, weights) over [0, RMAX] about ``center``."""
    n, w = angular_grid(*grid)
    c = np.asarray(center, float)
    dists = [float(np.linalg.norm(p - c)) for p in spec.positions]
    pts = sorted({d for d in list(dists) + list(extra) if 0 < d < RMAX})

    def f(r):
        return fun(r, c + r * n, n, w)

    val, err = quad_vec(f, 0.0, RMAX, points=pts or None, epsabs=epsabs, epsrel=1e-12, limit=4000)
    return val


def overlap_dipole(spec, idx, origin):
    """S and D (3, k, k) for the AOs ``idx`` about the first center."""
    spec = _normalized(spec)
    idx = list(idx)
    o = np.asarray(origin, float)

    def fun(r, pts, n, w):
        A = eval_ao(spec, pts)[:, idx]
        out = np.empty((4, len(idx), len(idx)))
        out[0] = (A * w[:, None]).T @ A
        for k in range(3):
            out[1 + k] = (A * (w * (pts[:, k] - o[k]))[:, None]).T @ A
        return r * r * out

    vals = _radial(fun, spec.positions[0], spec)
    return vals[0], vals[1:]


def attraction(spec, idx):
    """V_pq = -sum_c Z_c <p|1/|r - R_c||q>, each term about its own nucleus."""
    spec = _normalized(spec)
    idx = list(idx)
    V = np.zeros((len(idx), len(idx)))
    for c, Z in enumerate(spec.charges):

        def fun(r, pts, n, w):
            A = eval_ao(spec, pts)[:, idx]
            return r * (A * w[:, None]).T @ A

        V -= Z * _radial(fun, spec.positions[c], spec)
    return V


def kinetic(spec, idx, h=2e-3):
    """T = 1/2 <grad p . grad q> with Richardson-extrapolated central differences."""
    spec = _normalized(spec)
    idx = list(idx)

    def grad(pts, step):
        g = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = step
            g.append((eval_ao(spec, pts + e)[:, idx] - eval_ao(spec, pts - e)[:, idx]) / (2 * step))
        return np.stack(g)

    def fun(r, pts, n, w):
        G = (4 * grad(pts, h / 2) - grad(pts, h)) / 3
        return 0.5 * r * r * np.einsum("kip,kiq,i->pq", G, G, w)

    return _radial(fun, spec.positions[0], spec, epsabs=1e-11, grid=(64, 24))


# ------------------------------------------------------------ core potentials

def ecp(spec, idx, center=0):
    """Semi-local ECP on ``center``: local part plus l-projected differences."""
    spec = _normalized(spec)
    par = spec.ecp[center]
    idx = list(idx)
    ls = sorted(par.channels)

    def fun(r, pts, n, w):
        A = eval_ao(spec, pts)[:, idx]
        Y = real_ylm(max(ls), n) if ls else []
        loc = float(par.radial(None, np.array(r)))
        out = loc * (A * w[:, None]).T @ A
        for l in ls:
            P = (A * w[:, None]).T @ Y[l]
            out += (float(par.radial(l, np.array(r))) - loc) * P @ P.T
        return r * r * out

    return _radial(fun, spec.positions[center], spec)


def cpp(spec, idx, center=0):
    """(W, f) of the core-polarization operator on ``center``.

    The cut-off operator acts as F = F_rem + sum_{l<L} (F_l - F_rem) P_l, with
    F_rem the factor of the highest listed l.  The electron field at the core
    is f = (r / r^3) F; W = -alpha/2 <F r^-4 F> + alpha f_N . <f>.
    """
    spec = _normalized(spec)
    par = spec.cpp[center]
    idx = list(idx)
    L = par.max_l
    c0 = spec.positions[center]

    def fun(r, pts, n, w):
        A = eval_ao(spec, pts)[:, idx]
        Y = real_ylm(L, n)
        frem = float(par.field_factor(None, np.array(r)))
        FA = frem * A
        for l in range(L):
            P = (A * w[:, None]).T @ Y[l]
            FA = FA + (float(par.field_factor(l, np.array(r))) - frem) * (Y[l] @ P.T)
        out = np.empty((4, len(idx), len(idx)))
        out[0] = (FA * w[:, None]).T @ FA / r**4
        for k in range(3):
            X = (A * (w * n[:, k])[:, None]).T @ FA / r**2
            out[1 + k] = 0.5 * (X + X.T)
        return r * r * out

    vals = _radial(fun, c0, spec, extra=list(par.cutoff_radii.values()))
    fN = np.zeros(3)
    for c2, Z in enumerate(spec.charges):
        if c2 != center:
            d = spec.positions[c2] - c0
            dist = np.linalg.norm(d)
            fN += Z * d / dist**3 * float(par.field_factor(None, np.array(dist)))
    a = par.core_polarizability
    W = -0.5 * a * vals[0] + a * np.einsum("k,kpq->pq", fN, vals[1:])
    return W, vals[1:]


# ------------------------------------------------------------------ ERI

def _cartesian_terms(spec, idx):
    """Each AO as a list of (coef, exponent, center, (i, j, k)) Cartesian primitives."""
    spec = _normalized(spec)
    labels = build_ao_list(spec)
    out = []
    for p in idx:
        lab = labels[p]
        sh = spec.shells[lab.shell_index]
        C = solid_harmonic_matrix(sh.l)[lab.m + sh.l]
        A = spec.positions[sh.center_index]
        terms = []
        for a, c in zip(sh.exponents, sh.coefficients):
            for w, pw in zip(C, cartesian_powers(sh.l)):
                if abs(w) > 1e-15:
                    terms.append((c * w, a, A, pw))
        out.append(terms)
    return out


def _pair_terms(ti, tj):
    return [(c1 * c2, a1, A1, p1, a2, A2, p2) for c1, a1, A1, p1 in ti for c2, a2, A2, p2 in tj]


_GH = np.polynomial.hermite.hermgauss(40)


def _g(x, t, k):
    """1-D factor of a pair term along axis k."""
    _, a1, A1, p1, a2, A2, p2 = t
    return (x - A1[k]) ** p1[k] * (x - A2[k]) ** p2[k] * np.exp(-a1 * (x - A1[k]) ** 2 - a2 * (x - A2[k]) ** 2)


def _J(t, u, v, k):
    """int int g_u(x1) exp(-t^2 (x1 - x2)^2) g_v(x2) dx1 dx2 with Gauss-Hermite nodes."""
    s, ws = _GH
    p = u[1] + u[4]
    P = (u[1] * u[2][k] + u[4] * u[5][k]) / p
    q = v[1] + v[4]
    Q = (v[1] * v[2][k] + v[4] * v[5][k]) / q
    mu = p * q / (p + q)
    kap = t * t + mu
    d0 = mu * (Q - P) / kap  # centre of exp(-t^2 d^2 - mu (d - (Q - P))^2), d = x2 - x1
    d = d0 + s / math.sqrt(kap)
    # h(d) = int g_u(x) g_v(x + d) dx
    x_c = (p * P + q * (Q - d)) / (p + q)  # per d node
    x = x_c[:, None] + s[None, :] / math.sqrt(p + q)
    gx = _g(x, u, k) * _g(x + d[:, None], v, k) * np.exp((p + q) * (x - x_c[:, None]) ** 2)
    h = gx @ ws / math.sqrt(p + q)
    return float((h * np.exp(-t * t * d * d + kap * (d - d0) ** 2)) @ ws / math.sqrt(kap))


def eri(spec, quartet):
    """(pq|rs) for one AO quartet by the Laplace transform of 1/r12."""
    tp, tq, tr, ts = _cartesian_terms(spec, quartet)
    left = _pair_terms(tp, tq)
    right = _pair_terms(tr, ts)

    def f(t):
        tot = 0.0
        for u in left:
            for v in right:
                tot += u[0] * v[0] * _J(t, u, v, 0) * _J(t, u, v, 1) * _J(t, u, v, 2)
        return tot

    val, _ = quad(f, 0.0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=400)
    return 2.0 / math.sqrt(math.pi) * val
