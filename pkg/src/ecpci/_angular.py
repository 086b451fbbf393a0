"""Angular integrals of axial Gaussians about an operator center (numba).

All functions live on the z axis through the operator center C (taken as
origin).  For a Gaussian exp(-g |r - P z|^2) and a monomial n_x^I n_y^J n_z^S
of the unit vector n = r/|r|,

    int dOmega n_x^I n_y^J n_z^S exp(-g |r n - P z|^2)
        = phi(I, J) sgn(P)^S exp(-g (r - |P|)^2) U[(I+J)/2, S](kappa),

    U[h, S](kappa) = int_{-1}^{1} (1 - t^2)^h t^S exp(kappa (t - 1)) dt,

with kappa = 2 g r |P| and phi(I, J) = int_0^{2pi} cos^I sin^J.  U is
evaluated by Gauss-Legendre in t for moderate kappa and, for large kappa,
from the moments int_0^2 u^n exp(-kappa u) du by upward recursion.
"""
import math

import numpy as np
from numba import njit

KAPPA_SWITCH = 40.0
_GL_T, _GL_W = np.polynomial.legendre.leggauss(64)


@njit(cache=True)
def _binom(n, k):
    v = 1.0
    for i in range(k):
        v = v * (n - i) / (i + 1)
    return v


@njit(cache=True)
def phi_integral(I, J):
    if I % 2 or J % 2:
        return 0.0
    return 2.0 * math.exp(math.lgamma(0.5 * (I + 1)) + math.lgamma(0.5 * (J + 1)) - math.lgamma(0.5 * (I + J + 2)))


@njit(cache=True)
def _u_poly(hmax, smax):
    """Coefficients of [u(2-u)]^h (1-u)^S in powers of u: C[h, S, n]."""
    nmax = 2 * hmax + smax
    C = np.zeros((hmax + 1, smax + 1, nmax + 1))
    base = np.zeros(nmax + 1)
    for h in range(hmax + 1):
        # [u(2-u)]^h = u^h (2-u)^h
        base[:] = 0.0
        for j in range(h + 1):
            base[h + j] = _binom(h, j) * 2.0 ** (h - j) * (-1.0) ** j
        for S in range(smax + 1):
            for n in range(2 * h + 1):
                if base[n] == 0.0:
                    continue
                for j in range(S + 1):
                    C[h, S, n + j] += base[n] * _binom(S, j) * (-1.0) ** j
    return C


@njit(cache=True)
def u_table(hmax, smax, gamma, P, r, gl_t, gl_w, upoly, out):
    """out[h, S, i] = U[h, S](2 gamma r_i |P|)."""
    absP = abs(P)
    nmax = 2 * hmax + smax
    L = np.empty(nmax + 1)
    ng = gl_t.shape[0]
    tpow = np.empty(smax + 1)
    for i in range(r.shape[0]):
        kappa = 2.0 * gamma * r[i] * absP
        for h in range(hmax + 1):
            for S in range(smax + 1):
                out[h, S, i] = 0.0
        if kappa <= KAPPA_SWITCH:
            for g in range(ng):
                t = gl_t[g]
                wexp = gl_w[g] * math.exp(kappa * (t - 1.0))
                tpow[0] = 1.0
                for S in range(1, smax + 1):
                    tpow[S] = tpow[S - 1] * t
                one_m = 1.0 - t * t
                hp = wexp
                for h in range(hmax + 1):
                    for S in range(smax + 1):
                        out[h, S, i] += hp * tpow[S]
                    hp *= one_m
        else:
            e2 = math.exp(-2.0 * kappa)
            L[0] = (1.0 - e2) / kappa
            p2 = 1.0
            for n in range(1, nmax + 1):
                p2 *= 2.0
                L[n] = (n * L[n - 1] - p2 * e2) / kappa
            for h in range(hmax + 1):
                for S in range(smax + 1):
                    s = 0.0
                    for n in range(nmax + 1):
                        c = upoly[h, S, n]
                        if c != 0.0:
                            s += c * L[n]
                    out[h, S, i] = s


@njit(cache=True)
def project_shell(l, zA, exps, coefs, powers, c2s, mono, nterm, r, gl_t, gl_w):
    """out[m, poly, i] = int dOmega poly(n) chi_m(r_i n) for the shell at z = zA.

    ``mono[p, k] = (coef, a, b, s)`` lists the monomials coef n_x^a n_y^b n_z^s
    of angular polynomial p.
    """
    npoly = mono.shape[0]
    nr = r.shape[0]
    nc = (l + 1) * (l + 2) // 2
    maxdeg = 0
    for p in range(npoly):
        for k in range(nterm[p]):
            d = int(mono[p, k, 1] + mono[p, k, 2] + mono[p, k, 3])
            maxdeg = max(maxdeg, d)
    hmax = (l + maxdeg) // 2
    smax = l + maxdeg
    upoly = _u_poly(hmax, smax)
    U = np.empty((hmax + 1, smax + 1, nr))
    cart = np.zeros((nc, npoly, nr))
    sgn = 1.0 if zA >= 0.0 else -1.0
    absz = abs(zA)
    for ip in range(exps.shape[0]):
        a = exps[ip]
        u_table(hmax, smax, a, zA, r, gl_t, gl_w, upoly, U)
        env = np.empty(nr)
        for i in range(nr):
            env[i] = coefs[ip] * math.exp(-a * (r[i] - absz) ** 2)
        for c in range(nc):
            ix = powers[l, c, 0]
            iy = powers[l, c, 1]
            iz = powers[l, c, 2]
            for t in range(iz + 1):
                bt = _binom(iz, t) * (-zA) ** (iz - t)
                if bt == 0.0:
                    continue
                rp = ix + iy + t
                for p in range(npoly):
                    for k in range(nterm[p]):
                        I = ix + int(mono[p, k, 1])
                        J = iy + int(mono[p, k, 2])
                        S = t + int(mono[p, k, 3])
                        ph = phi_integral(I, J)
                        if ph == 0.0:
                            continue
                        f = mono[p, k, 0] * bt * ph * sgn**S
                        h = (I + J) // 2
                        for i in range(nr):
                            cart[c, p, i] += f * r[i] ** rp * env[i] * U[h, S, i]
    out = np.zeros((2 * l + 1, npoly, nr))
    for m in range(2 * l + 1):
        for c in range(nc):
            x = c2s[l, m, c]
            if x != 0.0:
                out[m] += x * cart[c]
    return out


@njit(cache=True)
def local_pair_block(la, zA, expsA, coefsA, lb, zB, expsB, coefsB, powers, c2s,
                     mono, nterm, Vw, r, gl_t, gl_w):
    """out[op, ma, mb] = sum_i Vw[op, i] int dOmega theta(n) chi_a chi_b (r_i n).

    ``theta`` is the single angular polynomial ``mono[0]``; ``Vw`` holds
    radial weights times r^2 times the radial operator.
    """
    nop = Vw.shape[0]
    nr = r.shape[0]
    nca = (la + 1) * (la + 2) // 2
    ncb = (lb + 1) * (lb + 2) // 2
    maxdeg = 0
    for k in range(nterm[0]):
        maxdeg = max(maxdeg, int(mono[0, k, 1] + mono[0, k, 2] + mono[0, k, 3]))
    hmax = (la + lb + maxdeg) // 2
    smax = la + lb + maxdeg
    upoly = _u_poly(hmax, smax)
    U = np.empty((hmax + 1, smax + 1, nr))
    cart = np.zeros((nop, nca, ncb))
    zc = np.zeros(la + lb + 1)
    g = np.empty(nr)
    env = np.empty(nr)
    for ia in range(expsA.shape[0]):
        a = expsA[ia]
        for ib in range(expsB.shape[0]):
            b = expsB[ib]
            gam = a + b
            P = (a * zA + b * zB) / gam
            pref = coefsA[ia] * coefsB[ib] * math.exp(-a * b / gam * (zA - zB) ** 2)
            if pref == 0.0:
                continue
            u_table(hmax, smax, gam, P, r, gl_t, gl_w, upoly, U)
            sgn = 1.0 if P >= 0.0 else -1.0
            absP = abs(P)
            for i in range(nr):
                env[i] = pref * math.exp(-gam * (r[i] - absP) ** 2)
            for ca in range(nca):
                i1 = powers[la, ca, 0]
                j1 = powers[la, ca, 1]
                k1 = powers[la, ca, 2]
                for cb in range(ncb):
                    i2 = powers[lb, cb, 0]
                    j2 = powers[lb, cb, 1]
                    k2 = powers[lb, cb, 2]
                    # (z - zA)^k1 (z - zB)^k2 in powers of z
                    zc[:] = 0.0
                    for t1 in range(k1 + 1):
                        c1 = _binom(k1, t1) * (-zA) ** (k1 - t1)
                        for t2 in range(k2 + 1):
                            zc[t1 + t2] += c1 * _binom(k2, t2) * (-zB) ** (k2 - t2)
                    for i in range(nr):
                        g[i] = 0.0
                    nonzero = False
                    for t in range(k1 + k2 + 1):
                        if zc[t] == 0.0:
                            continue
                        rp = i1 + i2 + j1 + j2 + t
                        for k in range(nterm[0]):
                            I = i1 + i2 + int(mono[0, k, 1])
                            J = j1 + j2 + int(mono[0, k, 2])
                            S = t + int(mono[0, k, 3])
                            ph = phi_integral(I, J)
                            if ph == 0.0:
                                continue
                            f = mono[0, k, 0] * zc[t] * ph * sgn**S
                            h = (I + J) // 2
                            nonzero = True
                            for i in range(nr):
                                g[i] += f * r[i] ** rp * U[h, S, i]
                    if not nonzero:
                        continue
                    for op in range(nop):
                        s = 0.0
                        for i in range(nr):
                            s += Vw[op, i] * g[i] * env[i]
                        cart[op, ca, cb] += s
    out = np.zeros((nop, 2 * la + 1, 2 * lb + 1))
    for op in range(nop):
        for ma in range(2 * la + 1):
            for mb in range(2 * lb + 1):
                s = 0.0
                for ca in range(nca):
                    x = c2s[la, ma, ca]
                    if x == 0.0:
                        continue
                    for cb in range(ncb):
                        s += x * c2s[lb, mb, cb] * cart[op, ca, cb]
                out[op, ma, mb] = s
    return out
