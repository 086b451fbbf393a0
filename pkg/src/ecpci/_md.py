"""McMurchie-Davidson Hermite-Gaussian kernels (numba).

Shells are passed as flat arrays: angular momentum, center, first primitive
and primitive count per shell, plus primitive exponents and bare-primitive
coefficients.  Cartesian blocks are transformed to real solid harmonics per
shell block with the padded matrix ``c2s[l, :2l+1, :ncart(l)]``.
"""
import math

import numpy as np
from numba import njit

from .boys import boys_into

LMAX = 3
NCART = np.array([1, 3, 6, 10])


def cart_table():
    """Padded Cartesian exponent table powers[l, c, xyz]."""
    from .basis import cartesian_powers

    tab = np.zeros((LMAX + 1, 10, 3), dtype=np.int64)
    for l in range(LMAX + 1):
        for c, p in enumerate(cartesian_powers(l)):
            tab[l, c] = p
    return tab


def c2s_table():
    from .basis import solid_harmonic_matrix

    tab = np.zeros((LMAX + 1, 7, 10))
    for l in range(LMAX + 1):
        C = solid_harmonic_matrix(l)
        tab[l, : C.shape[0], : C.shape[1]] = C
    return tab


@njit(cache=True)
def hermite_e(la, lb, a, b, qx):
    """E[i, j, t] expansion coefficients of x_A^i x_B^j Gaussian overlap in Hermite Gaussians."""
    p = a + b
    E = np.zeros((la + 1, lb + 1, la + lb + 2))
    E[0, 0, 0] = math.exp(-a * b / p * qx * qx)
    xpa = -b / p * qx
    xpb = a / p * qx
    half = 0.5 / p
    for i in range(la + 1):
        for j in range(lb + 1):
            if i == 0 and j == 0:
                continue
            for t in range(i + j + 1):
                if j == 0:
                    v = xpa * E[i - 1, j, t] + (t + 1) * E[i - 1, j, t + 1]
                    if t > 0:
                        v += half * E[i - 1, j, t - 1]
                else:
                    v = xpb * E[i, j - 1, t] + (t + 1) * E[i, j - 1, t + 1]
                    if t > 0:
                        v += half * E[i, j - 1, t - 1]
                E[i, j, t] = v
    return E


@njit(cache=True)
def hermite_r(L, alpha, x, y, z, R, F):
    """R[t, u, v] = R^0_tuv(alpha, (x, y, z)) for t + u + v <= L; R has shape (L+1, L+1, L+1, L+1) scratch."""
    boys_into(L, alpha * (x * x + y * y + z * z), F)
    fac = 1.0
    for n in range(L + 1):
        R[n, 0, 0, 0] = fac * F[n]
        fac *= -2.0 * alpha
    for s in range(1, L + 1):
        for n in range(L - s + 1):
            for t in range(s + 1):
                for u in range(s - t + 1):
                    v = s - t - u
                    if t > 0:
                        val = x * R[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * R[n + 1, t - 2, u, v]
                    elif u > 0:
                        val = y * R[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * R[n + 1, t, u - 2, v]
                    else:
                        val = z * R[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * R[n + 1, t, u, v - 2]
                    R[n, t, u, v] = val


@njit(cache=True)
def _to_spherical_pair(cart, la, lb, c2s, out):
    na = 2 * la + 1
    nb = 2 * lb + 1
    nca = (la + 1) * (la + 2) // 2
    ncb = (lb + 1) * (lb + 2) // 2
    for ma in range(na):
        for mb in range(nb):
            s = 0.0
            for ca in range(nca):
                ta = c2s[la, ma, ca]
                if ta == 0.0:
                    continue
                for cb in range(ncb):
                    tb = c2s[lb, mb, cb]
                    if tb != 0.0:
                        s += ta * tb * cart[ca, cb]
            out[ma, mb] = s


@njit(cache=True)
def one_electron(sh_l, sh_ctr, sh_start, sh_nprim, exps, coefs, centers, ao_off,
                 nuc_pos, nuc_charge, origin, powers, c2s, nao):
    """S, T, V, Dx, Dy, Dz in the spherical AO basis.

    V = -sum_C Z_C <1/|r - C|>; D_q = <q - origin_q>.
    """
    S = np.zeros((nao, nao))
    T = np.zeros((nao, nao))
    V = np.zeros((nao, nao))
    D = np.zeros((3, nao, nao))
    ns = sh_l.shape[0]
    Rs = np.zeros((8, 8, 8, 8))
    F = np.zeros(8)
    cS = np.zeros((10, 10))
    cT = np.zeros((10, 10))
    cV = np.zeros((10, 10))
    cD = np.zeros((3, 10, 10))
    blk = np.zeros((7, 7))
    for sa in range(ns):
        la = sh_l[sa]
        A = centers[sh_ctr[sa]]
        for sb in range(sa + 1):
            lb = sh_l[sb]
            B = centers[sh_ctr[sb]]
            nca = (la + 1) * (la + 2) // 2
            ncb = (lb + 1) * (lb + 2) // 2
            cS[:, :] = 0.0
            cT[:, :] = 0.0
            cV[:, :] = 0.0
            cD[:, :, :] = 0.0
            for ia in range(sh_start[sa], sh_start[sa] + sh_nprim[sa]):
                a = exps[ia]
                for ib in range(sh_start[sb], sh_start[sb] + sh_nprim[sb]):
                    b = exps[ib]
                    p = a + b
                    cc = coefs[ia] * coefs[ib]
                    Ex = hermite_e(la, lb + 2, a, b, A[0] - B[0])
                    Ey = hermite_e(la, lb + 2, a, b, A[1] - B[1])
                    Ez = hermite_e(la, lb + 2, a, b, A[2] - B[2])
                    P = (a * A + b * B) / p
                    sq = math.sqrt(math.pi / p)
                    for ca in range(nca):
                        i1 = powers[la, ca, 0]
                        j1 = powers[la, ca, 1]
                        k1 = powers[la, ca, 2]
                        for cb in range(ncb):
                            i2 = powers[lb, cb, 0]
                            j2 = powers[lb, cb, 1]
                            k2 = powers[lb, cb, 2]
                            sx = Ex[i1, i2, 0] * sq
                            sy = Ey[j1, j2, 0] * sq
                            sz = Ez[k1, k2, 0] * sq
                            cS[ca, cb] += cc * sx * sy * sz
                            # kinetic, 1-D pieces
                            tx = -2.0 * b * b * Ex[i1, i2 + 2, 0] + b * (2 * i2 + 1) * Ex[i1, i2, 0]
                            if i2 >= 2:
                                tx -= 0.5 * i2 * (i2 - 1) * Ex[i1, i2 - 2, 0]
                            ty = -2.0 * b * b * Ey[j1, j2 + 2, 0] + b * (2 * j2 + 1) * Ey[j1, j2, 0]
                            if j2 >= 2:
                                ty -= 0.5 * j2 * (j2 - 1) * Ey[j1, j2 - 2, 0]
                            tz = -2.0 * b * b * Ez[k1, k2 + 2, 0] + b * (2 * k2 + 1) * Ez[k1, k2, 0]
                            if k2 >= 2:
                                tz -= 0.5 * k2 * (k2 - 1) * Ez[k1, k2 - 2, 0]
                            cT[ca, cb] += cc * (tx * sq * sy * sz + sx * ty * sq * sz + sx * sy * tz * sq)
                            dx = (Ex[i1, i2, 1] + (P[0] - origin[0]) * Ex[i1, i2, 0]) * sq
                            dy = (Ey[j1, j2, 1] + (P[1] - origin[1]) * Ey[j1, j2, 0]) * sq
                            dz = (Ez[k1, k2, 1] + (P[2] - origin[2]) * Ez[k1, k2, 0]) * sq
                            cD[0, ca, cb] += cc * dx * sy * sz
                            cD[1, ca, cb] += cc * sx * dy * sz
                            cD[2, ca, cb] += cc * sx * sy * dz
                    L = la + lb
                    for n in range(nuc_charge.shape[0]):
                        C = nuc_pos[n]
                        hermite_r(L, p, P[0] - C[0], P[1] - C[1], P[2] - C[2], Rs, F)
                        pref = -nuc_charge[n] * 2.0 * math.pi / p * cc
                        for ca in range(nca):
                            i1 = powers[la, ca, 0]
                            j1 = powers[la, ca, 1]
                            k1 = powers[la, ca, 2]
                            for cb in range(ncb):
                                i2 = powers[lb, cb, 0]
                                j2 = powers[lb, cb, 1]
                                k2 = powers[lb, cb, 2]
                                s = 0.0
                                for t in range(i1 + i2 + 1):
                                    et = Ex[i1, i2, t]
                                    for u in range(j1 + j2 + 1):
                                        eu = Ey[j1, j2, u]
                                        for v in range(k1 + k2 + 1):
                                            s += et * eu * Ez[k1, k2, v] * Rs[0, t, u, v]
                                cV[ca, cb] += pref * s
            oa = ao_off[sa]
            ob = ao_off[sb]
            na = 2 * la + 1
            nb = 2 * lb + 1
            for mat in range(6):
                if mat == 0:
                    src = cS
                    dst = S
                elif mat == 1:
                    src = cT
                    dst = T
                elif mat == 2:
                    src = cV
                    dst = V
                else:
                    src = cD[mat - 3]
                    dst = D[mat - 3]
                _to_spherical_pair(src, la, lb, c2s, blk)
                for ma in range(na):
                    for mb in range(nb):
                        dst[oa + ma, ob + mb] = blk[ma, mb]
                        dst[ob + mb, oa + ma] = blk[ma, mb]
    return S, T, V, D


@njit(cache=True)
def _hermite_index(L):
    n = (L + 1) * (L + 2) * (L + 3) // 6
    idx = np.zeros((n, 3), dtype=np.int64)
    k = 0
    for s in range(L + 1):
        for t in range(s + 1):
            for u in range(s - t + 1):
                idx[k, 0] = t
                idx[k, 1] = u
                idx[k, 2] = s - t - u
                k += 1
    return idx


@njit(cache=True)
def _pair_hermite(la, lb, a, b, A, B, powers, out):
    """out[ca*ncb+cb, h] = E^x_t E^y_u E^z_v for Hermite index h = (t,u,v) over t+u+v <= la+lb."""
    Ex = hermite_e(la, lb, a, b, A[0] - B[0])
    Ey = hermite_e(la, lb, a, b, A[1] - B[1])
    Ez = hermite_e(la, lb, a, b, A[2] - B[2])
    L = la + lb
    idx = _hermite_index(L)
    nh = idx.shape[0]
    nca = (la + 1) * (la + 2) // 2
    ncb = (lb + 1) * (lb + 2) // 2
    for ca in range(nca):
        for cb in range(ncb):
            row = ca * ncb + cb
            i1 = powers[la, ca, 0]
            j1 = powers[la, ca, 1]
            k1 = powers[la, ca, 2]
            i2 = powers[lb, cb, 0]
            j2 = powers[lb, cb, 1]
            k2 = powers[lb, cb, 2]
            for h in range(nh):
                t = idx[h, 0]
                u = idx[h, 1]
                v = idx[h, 2]
                if t > i1 + i2 or u > j1 + j2 or v > k1 + k2:
                    out[row, h] = 0.0
                else:
                    out[row, h] = Ex[i1, i2, t] * Ey[j1, j2, u] * Ez[k1, k2, v]
    return nh


@njit(cache=True)
def _quartet_cart(la, lb, lc, ld, sa, sb, sc, sd, sh_start, sh_nprim, exps, coefs,
                  A, B, C, D, powers, out, Eab, Ecd, G, Rs, F):
    nab = ((la + 1) * (la + 2) // 2) * ((lb + 1) * (lb + 2) // 2)
    ncd = ((lc + 1) * (lc + 2) // 2) * ((ld + 1) * (ld + 2) // 2)
    L = la + lb + lc + ld
    idx_ab = _hermite_index(la + lb)
    idx_cd = _hermite_index(lc + ld)
    sign_cd = np.empty(idx_cd.shape[0])
    for h in range(idx_cd.shape[0]):
        sign_cd[h] = -1.0 if (idx_cd[h, 0] + idx_cd[h, 1] + idx_cd[h, 2]) % 2 else 1.0
    for i in range(nab):
        for j in range(ncd):
            out[i, j] = 0.0
    twopi25 = 2.0 * math.pi**2.5
    for ia in range(sh_start[sa], sh_start[sa] + sh_nprim[sa]):
        a = exps[ia]
        for ib in range(sh_start[sb], sh_start[sb] + sh_nprim[sb]):
            b = exps[ib]
            p = a + b
            P = (a * A + b * B) / p
            nhab = _pair_hermite(la, lb, a, b, A, B, powers, Eab)
            cab = coefs[ia] * coefs[ib]
            for ic in range(sh_start[sc], sh_start[sc] + sh_nprim[sc]):
                c = exps[ic]
                for id_ in range(sh_start[sd], sh_start[sd] + sh_nprim[sd]):
                    d = exps[id_]
                    q = c + d
                    Q = (c * C + d * D) / q
                    nhcd = _pair_hermite(lc, ld, c, d, C, D, powers, Ecd)
                    alpha = p * q / (p + q)
                    hermite_r(L, alpha, P[0] - Q[0], P[1] - Q[1], P[2] - Q[2], Rs, F)
                    pref = twopi25 / (p * q * math.sqrt(p + q)) * cab * coefs[ic] * coefs[id_]
                    for h1 in range(nhab):
                        t = idx_ab[h1, 0]
                        u = idx_ab[h1, 1]
                        v = idx_ab[h1, 2]
                        for j in range(ncd):
                            s = 0.0
                            for h2 in range(nhcd):
                                e = Ecd[j, h2]
                                if e != 0.0:
                                    s += sign_cd[h2] * e * Rs[0, t + idx_cd[h2, 0], u + idx_cd[h2, 1], v + idx_cd[h2, 2]]
                            G[h1, j] = s
                    for i in range(nab):
                        for h1 in range(nhab):
                            e = Eab[i, h1]
                            if e != 0.0:
                                e *= pref
                                for j in range(ncd):
                                    out[i, j] += e * G[h1, j]


@njit(cache=True)
def eri_tensor(sh_l, sh_ctr, sh_start, sh_nprim, exps, coefs, centers, ao_off, powers, c2s, nao):
    """Full (pq|rs) tensor in the spherical AO basis, chemists' notation."""
    eri = np.zeros((nao, nao, nao, nao))
    ns = sh_l.shape[0]
    Lmax = 0
    for s in range(ns):
        Lmax = max(Lmax, sh_l[s])
    Rs = np.zeros((4 * Lmax + 1, 4 * Lmax + 1, 4 * Lmax + 1, 4 * Lmax + 1))
    F = np.zeros(4 * Lmax + 1)
    nh = (2 * Lmax + 1) * (2 * Lmax + 2) * (2 * Lmax + 3) // 6
    Eab = np.zeros((100, nh))
    Ecd = np.zeros((100, nh))
    G = np.zeros((nh, 100))
    cart = np.zeros((100, 100))
    tmp = np.zeros((7, 10, 10, 10))
    tmp2 = np.zeros((7, 7, 10, 10))
    tmp3 = np.zeros((7, 7, 7, 10))
    sph = np.zeros((7, 7, 7, 7))
    for sa in range(ns):
        for sb in range(sa + 1):
            ab = sa * (sa + 1) // 2 + sb
            for sc in range(sa + 1):
                for sd in range(sc + 1):
                    cd = sc * (sc + 1) // 2 + sd
                    if cd > ab:
                        continue
                    la = sh_l[sa]
                    lb = sh_l[sb]
                    lc = sh_l[sc]
                    ld = sh_l[sd]
                    _quartet_cart(la, lb, lc, ld, sa, sb, sc, sd, sh_start, sh_nprim, exps, coefs,
                                  centers[sh_ctr[sa]], centers[sh_ctr[sb]], centers[sh_ctr[sc]],
                                  centers[sh_ctr[sd]], powers, cart, Eab, Ecd, G, Rs, F)
                    nca = (la + 1) * (la + 2) // 2
                    ncb = (lb + 1) * (lb + 2) // 2
                    ncc = (lc + 1) * (lc + 2) // 2
                    ncd_ = (ld + 1) * (ld + 2) // 2
                    na = 2 * la + 1
                    nb = 2 * lb + 1
                    nc = 2 * lc + 1
                    nd = 2 * ld + 1
                    # transform index a
                    for ma in range(na):
                        for cb in range(ncb):
                            for cc in range(ncc):
                                for cd_ in range(ncd_):
                                    s = 0.0
                                    for ca in range(nca):
                                        s += c2s[la, ma, ca] * cart[ca * ncb + cb, cc * ncd_ + cd_]
                                    tmp[ma, cb, cc, cd_] = s
                    for ma in range(na):
                        for mb in range(nb):
                            for cc in range(ncc):
                                for cd_ in range(ncd_):
                                    s = 0.0
                                    for cb in range(ncb):
                                        s += c2s[lb, mb, cb] * tmp[ma, cb, cc, cd_]
                                    tmp2[ma, mb, cc, cd_] = s
                    for ma in range(na):
                        for mb in range(nb):
                            for mc in range(nc):
                                for cd_ in range(ncd_):
                                    s = 0.0
                                    for cc in range(ncc):
                                        s += c2s[lc, mc, cc] * tmp2[ma, mb, cc, cd_]
                                    tmp3[ma, mb, mc, cd_] = s
                    for ma in range(na):
                        for mb in range(nb):
                            for mc in range(nc):
                                for md in range(nd):
                                    s = 0.0
                                    for cd_ in range(ncd_):
                                        s += c2s[ld, md, cd_] * tmp3[ma, mb, mc, cd_]
                                    sph[ma, mb, mc, md] = s
                    oa = ao_off[sa]
                    ob = ao_off[sb]
                    oc = ao_off[sc]
                    od = ao_off[sd]
                    for ma in range(na):
                        p_ = oa + ma
                        for mb in range(nb):
                            q_ = ob + mb
                            for mc in range(nc):
                                r_ = oc + mc
                                for md in range(nd):
                                    s_ = od + md
                                    v = sph[ma, mb, mc, md]
                                    eri[p_, q_, r_, s_] = v
                                    eri[q_, p_, r_, s_] = v
                                    eri[p_, q_, s_, r_] = v
                                    eri[q_, p_, s_, r_] = v
                                    eri[r_, s_, p_, q_] = v
                                    eri[s_, r_, p_, q_] = v
                                    eri[r_, s_, q_, p_] = v
                                    eri[s_, r_, q_, p_] = v
    return eri
