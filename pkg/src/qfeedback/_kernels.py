"""Compiled inner loops for the O(N^2) two-photon sector.

All kernels are serial with a fixed summation order, so trajectories are
bit-identical no matter how many threads or worker processes run elsewhere.
The packed layout is the row-major upper triangle including the diagonal:
entry (j, l >= j) sits at j*N - j*(j-1)//2 + (l - j).

The pair kernels work on float views of the complex arrays (re, im
interleaved) with the arithmetic spelled out, which lets LLVM vectorize the
inner loops; the complex-typed wrappers in dynamics.py never see this.
"""

import math

import numpy as np
from numba import njit

_SQRT2 = math.sqrt(2.0)


@njit(cache=True)
def pair_fused(pf, dpf, gre, gim, bre, bim, vre, vim, n):
    """One pass over the packed triangle doing both pair jobs.

    Contraction: v[j] = sum_p g[p] * M[p, j] with M the mirrored pair
    matrix carrying sqrt(2) on the diagonal (doubly occupied modes).
    Derivative: dP[(j, l)] = i (g*[l] b[j] + g*[j] b[l]) off the diagonal
    and i sqrt(2) g*[j] b[j] on it, written as floats (g* enters through
    negated imaginary parts).

    pf, dpf are float views of the packed arrays; v is accumulated in
    split re/im buffers that the caller zeroes.
    """
    base2 = 0
    for j in range(n):
        gjre = gre[j]
        gjim = gim[j]
        bjre = bre[j]
        bjim = bim[j]
        # Diagonal entry (j, j): sqrt(2) on both jobs.
        pre = pf[base2]
        pim = pf[base2 + 1]
        accre = _SQRT2 * (gjre * pre - gjim * pim)
        accim = _SQRT2 * (gjre * pim + gjim * pre)
        # i * sqrt(2) * conj(g_j) * b_j
        zre = _SQRT2 * (gjre * bjre + gjim * bjim)
        zim = _SQRT2 * (gjre * bjim - gjim * bjre)
        dpf[base2] = -zim
        dpf[base2 + 1] = zre
        for l in range(j + 1, n):
            m2 = base2 + 2 * (l - j)
            pre = pf[m2]
            pim = pf[m2 + 1]
            glre = gre[l]
            glim = gim[l]
            # v[j] += g[l] * P(j, l)
            accre += glre * pre - glim * pim
            accim += glre * pim + glim * pre
            # v[l] += g[j] * P(j, l)
            vre[l] += gjre * pre - gjim * pim
            vim[l] += gjre * pim + gjim * pre
            # z = conj(g[l]) b[j] + conj(g[j]) b[l]; dP = i z
            zre = (glre * bjre + glim * bjim) + (gjre * bre[l] + gjim * bim[l])
            zim = (glre * bjim - glim * bjre) + (gjre * bim[l] - gjim * bre[l])
            dpf[m2] = -zim
            dpf[m2 + 1] = zre
        vre[j] += accre
        vim[j] += accim
        base2 += 2 * (n - j)


@njit(cache=True)
def pair_contract(pairs, g, out):
    """out[j] = sum_p g[p] * M[p, j] over the mirrored pair matrix.

    Standalone complex version of the contraction half of pair_fused (kept
    for the public derivative path and tests).
    """
    n = g.shape[0]
    for j in range(n):
        out[j] = 0.0 + 0.0j
    base = 0
    for j in range(n):
        acc = _SQRT2 * g[j] * pairs[base]
        gj = g[j]
        for l in range(j + 1, n):
            plj = pairs[base + l - j]
            acc += g[l] * plj
            out[l] += gj * plj
        out[j] += acc
        base += n - j


@njit(cache=True)
def pair_deriv(b, gc, out):
    """dP[(j, l)] = i (gc[l] b[j] + gc[j] b[l]); diagonal i sqrt(2) gc[j] b[j]."""
    n = b.shape[0]
    base = 0
    for j in range(n):
        bj = b[j]
        gcj = gc[j]
        out[base] = 1j * _SQRT2 * gcj * bj
        for l in range(j + 1, n):
            out[base + l - j] = 1j * (gc[l] * bj + gcj * b[l])
        base += n - j


@njit(cache=True)
def four_dots(g, v0, v1, v2, v3):
    """Fixed-order plain sums sum_j g[j] * v[j] for four vectors at once."""
    s0 = 0.0 + 0.0j
    s1 = 0.0 + 0.0j
    s2 = 0.0 + 0.0j
    s3 = 0.0 + 0.0j
    for j in range(g.shape[0]):
        gj = g[j]
        s0 += gj * v0[j]
        s1 += gj * v1[j]
        s2 += gj * v2[j]
        s3 += gj * v3[j]
    return s0, s1, s2, s3


@njit(cache=True)
def rk4_combine(yf, k1f, k2f, k3f, k4f, h, outf):
    """out = y + h/6 (k1 + 2 k2 + 2 k3 + k4), fused over float views."""
    c = h / 6.0
    for i in range(yf.shape[0]):
        outf[i] = yf[i] + c * (k1f[i] + 2.0 * (k2f[i] + k3f[i]) + k4f[i])


@njit(cache=True)
def axpy(yf, a, xf, outf):
    """out = y + a * x over float views (a real)."""
    for i in range(yf.shape[0]):
        outf[i] = yf[i] + a * xf[i]


def warmup():
    """Trigger JIT compilation on tiny inputs (useful before timing)."""
    z = np.zeros(3, dtype=np.complex128)
    zf = np.zeros(6, dtype=np.float64)
    p = np.zeros(6, dtype=np.complex128)
    pf = np.zeros(12, dtype=np.float64)
    pair_fused(pf, pf.copy(), zf[:3], zf[:3], zf[:3], zf[:3],
               zf[:3].copy(), zf[:3].copy(), 3)
    pair_contract(p, z, z.copy())
    pair_deriv(z, z, p)
    four_dots(z, z, z, z, z)
    rk4_combine(zf, zf, zf, zf, zf, 0.1, zf.copy())
    axpy(zf, 0.5, zf, zf.copy())
