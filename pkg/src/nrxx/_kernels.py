"""Compiled per-cell kernels shared by the moment, spatial and time modules.

Every kernel works on dense coefficient rows laid out by
:class:`nrxx.moments.MultiIndexTable`; frames are passed as ``(u, theta)``
with ``u`` a length-3 array. Index tables use ``-1`` for "no such index".
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def project_row(c, u0, th0, u1, th1, minus, minus2, top, out):
    """Re-expand one coefficient row from frame (u0, th0) to (u1, th1).

    The homotopy along the straight path u(tau), theta(tau) has the
    constant, strictly degree-raising generator

        (A F)_a = sum_d (u0_d - u1_d) F_{a-e_d} + (th0 - th1)/2 F_{a-2e_d}

    so A^(top+1) = 0 on the truncated index set and exp(A) is a finite sum.
    """
    K = c.shape[0]
    du0 = u0[0] - u1[0]
    du1 = u0[1] - u1[1]
    du2 = u0[2] - u1[2]
    dth = 0.5 * (th0 - th1)
    for a in range(K):
        out[a] = c[a]
    if du0 == 0.0 and du1 == 0.0 and du2 == 0.0 and dth == 0.0:
        return
    term = c.copy()
    nxt = np.empty(K)
    for k in range(1, top + 1):
        inv_k = 1.0 / k
        for a in range(K):
            acc = 0.0
            m = minus[a, 0]
            if m >= 0:
                acc += du0 * term[m]
            m = minus[a, 1]
            if m >= 0:
                acc += du1 * term[m]
            m = minus[a, 2]
            if m >= 0:
                acc += du2 * term[m]
            if dth != 0.0:
                for d in range(3):
                    m = minus2[a, d]
                    if m >= 0:
                        acc += dth * term[m]
            nxt[a] = acc * inv_k
        for a in range(K):
            out[a] += nxt[a]
            term[a] = nxt[a]


@njit(cache=True)
def homotopy_rhs_row(c, du, dth, minus, minus2, out):
    K = c.shape[0]
    for a in range(K):
        acc = 0.0
        for d in range(3):
            m = minus[a, d]
            if m >= 0:
                acc += du[d] * c[m]
            m = minus2[a, d]
            if m >= 0:
                acc += dth * c[m]
        out[a] = acc


@njit(cache=True)
def macro_row(c, u, th, i_e, i_2e):
    """Return (rho, u_0, u_1, u_2, theta) of one row, any frame."""
    rho = c[0]
    if rho <= 0.0:
        return rho, 0.0, 0.0, 0.0, -1.0
    v0 = c[i_e[0]] / rho
    v1 = c[i_e[1]] / rho
    v2 = c[i_e[2]] / rho
    trace = c[i_2e[0]] + c[i_2e[1]] + c[i_2e[2]]
    theta = th + (2.0 * trace / rho - (v0 * v0 + v1 * v1 + v2 * v2)) / 3.0
    return rho, u[0] + v0, u[1] + v1, u[2] + v2, theta


@njit(cache=True)
def standardize_row(c, u, th, i_e, i_2e, minus, minus2, top, out, u_out):
    """Project ``c`` onto its own macroscopic frame.

    Writes the new coefficients to ``out`` and the frame velocity to
    ``u_out``; returns the new temperature, or a non-positive value when the
    row is inadmissible (``out`` is then left untouched).
    """
    rho, v0, v1, v2, theta = macro_row(c, u, th, i_e, i_2e)
    if rho <= 0.0 or not theta > 0.0:
        return -1.0
    u_out[0] = v0
    u_out[1] = v1
    u_out[2] = v2
    project_row(c, u, th, u_out, theta, minus, minus2, top, out)
    # Exact by construction; clear the round-off.
    out[i_e[0]] = 0.0
    out[i_e[1]] = 0.0
    out[i_e[2]] = 0.0
    return theta


@njit(cache=True)
def flux_row(c, u, th, j, minus, plus, alpha, nstate, out):
    """Coefficients of xi_j * f in the frame of ``c`` (orders <= M)."""
    K = c.shape[0]
    for a in range(nstate):
        acc = u[j] * c[a] + (alpha[a, j] + 1) * c[plus[a, j]]
        m = minus[a, j]
        if m >= 0:
            acc += th * c[m]
        out[a] = acc
    for a in range(nstate, K):
        out[a] = 0.0


@njit(cache=True)
def minmod(a, b):
    if a * b <= 0.0:
        return 0.0
    if abs(a) < abs(b):
        return a
    return b


@njit(cache=True)
def pad_cells(c, u, th, periodic, ng):
    N, K = c.shape
    cp = np.empty((N + 2 * ng, K))
    up = np.empty((N + 2 * ng, 3))
    tp = np.empty(N + 2 * ng)
    for i in range(N):
        cp[i + ng] = c[i]
        up[i + ng] = u[i]
        tp[i + ng] = th[i]
    for g in range(ng):
        lo = N - ng + g if periodic else 0
        hi = g if periodic else N - 1
        cp[g] = c[lo]
        up[g] = u[lo]
        tp[g] = th[lo]
        cp[N + ng + g] = c[hi]
        up[N + ng + g] = u[hi]
        tp[N + ng + g] = th[hi]
    return cp, up, tp


@njit(cache=True)
def closure_central(cp, tp, kn, dx, slots, slot_src):
    """Fill closure slots of padded cells 1..n-2 by the central difference."""
    n = cp.shape[0]
    for p in range(1, n - 1):
        scale = -tp[p] * kn / cp[p, 0] / (2.0 * dx)
        for q in range(slots.shape[0]):
            a = slots[q]
            m = slot_src[q]
            if m < 0:
                cp[p, a] = 0.0
            else:
                cp[p, a] = scale * (cp[p + 1, m] - cp[p - 1, m])


@njit(cache=True)
def reconstruct_padded(cp, up, tp, kn, dx, recon, cmax, nstate, top,
                       i_e, i_2e, minus, minus2, slots, slot_src):
    """Interface states for every interface k (between padded cells k, k+1).

    Returns arrays indexed by the padded cell p: the state extrapolated to
    the right face of p (``fl``) and to its left face (``fr``), each in its
    standard frame with closure slots set, plus per-interface signal speeds
    and a status (-1 ok, else 2*p + side of the first inadmissible state).
    """
    n, K = cp.shape
    fl = np.zeros((n, K))
    fr = np.zeros((n, K))
    ul = np.zeros((n, 3))
    ur = np.zeros((n, 3))
    tl = np.ones(n)
    tr = np.ones(n)
    lam_l = np.zeros(n)
    lam_r = np.zeros(n)
    status = -1
    if recon:
        nb_m = np.empty(K)
        nb_p = np.empty(K)
        west = np.zeros(K)
        east = np.zeros(K)
        for p in range(1, n - 1):
            project_row(cp[p - 1], up[p - 1], tp[p - 1], up[p], tp[p],
                        minus, minus2, top, nb_m)
            project_row(cp[p + 1], up[p + 1], tp[p + 1], up[p], tp[p],
                        minus, minus2, top, nb_p)
            for a in range(nstate):
                g = minmod((nb_p[a] - cp[p, a]) / dx, (cp[p, a] - nb_m[a]) / dx)
                west[a] = cp[p, a] - 0.5 * dx * g
                east[a] = cp[p, a] + 0.5 * dx * g
            th_new = standardize_row(east, up[p], tp[p], i_e, i_2e,
                                     minus, minus2, top, fl[p], ul[p])
            if th_new <= 0.0:
                if status < 0:
                    status = 2 * p
                th_new = tp[p]
                ul[p] = up[p]
                fl[p] = cp[p]
            tl[p] = th_new
            th_new = standardize_row(west, up[p], tp[p], i_e, i_2e,
                                     minus, minus2, top, fr[p], ur[p])
            if th_new <= 0.0:
                if status < 0:
                    status = 2 * p + 1
                th_new = tp[p]
                ur[p] = up[p]
                fr[p] = cp[p]
            tr[p] = th_new
            for a in range(nstate, K):
                fl[p, a] = 0.0
                fr[p, a] = 0.0
        # One-sided closure across each interface k | k+1.
        for k in range(1, n - 2):
            sl = -tl[k] * kn / fl[k, 0] / dx
            sr = -tr[k + 1] * kn / fr[k + 1, 0] / dx
            for q in range(slots.shape[0]):
                a = slots[q]
                m = slot_src[q]
                if m < 0:
                    continue
                diff = cp[k + 1, m] - cp[k, m]
                fl[k, a] = sl * diff
                fr[k + 1, a] = sr * diff
    else:
        for p in range(1, n - 1):
            fl[p] = cp[p]
            fr[p] = cp[p]
            ul[p] = up[p]
            ur[p] = up[p]
            tl[p] = tp[p]
            tr[p] = tp[p]
    for k in range(1, n - 2):
        cl = cmax * math.sqrt(tl[k])
        cr = cmax * math.sqrt(tr[k + 1])
        lam_l[k] = min(ul[k, 0] - cl, ur[k + 1, 0] - cr)
        lam_r[k] = max(ul[k, 0] + cl, ur[k + 1, 0] + cr)
    return fl, ul, tl, fr, ur, tr, lam_l, lam_r, status


@njit(cache=True)
def hll_row(fl, ul, tl, fr, ur, tr, lam_l, lam_r, uf, tf,
            minus, minus2, plus, alpha, nstate, top, out):
    """HLL flux of one interface, expressed in the frame (uf, tf)."""
    K = fl.shape[0]
    a_ = np.empty(K)
    b_ = np.empty(K)
    ga = np.empty(K)
    gb = np.empty(K)
    if lam_l >= 0.0:
        project_row(fl, ul, tl, uf, tf, minus, minus2, top, a_)
        flux_row(a_, uf, tf, 0, minus, plus, alpha, nstate, out)
        return
    if lam_r <= 0.0:
        project_row(fr, ur, tr, uf, tf, minus, minus2, top, b_)
        flux_row(b_, uf, tf, 0, minus, plus, alpha, nstate, out)
        return
    project_row(fl, ul, tl, uf, tf, minus, minus2, top, a_)
    project_row(fr, ur, tr, uf, tf, minus, minus2, top, b_)
    flux_row(a_, uf, tf, 0, minus, plus, alpha, nstate, ga)
    flux_row(b_, uf, tf, 0, minus, plus, alpha, nstate, gb)
    inv = 1.0 / (lam_r - lam_l)
    for a in range(nstate):
        out[a] = (lam_r * ga[a] - lam_l * gb[a]
                  + lam_l * lam_r * (b_[a] - a_[a])) * inv
    for a in range(nstate, K):
        out[a] = 0.0


@njit(cache=True)
def convection_rhs_cells(c, u, th, periodic, kn, dx, recon, cmax, nstate, top,
                         i_e, i_2e, minus, minus2, plus, alpha, slots, slot_src):
    N, K = c.shape
    cp, up, tp = pad_cells(c, u, th, periodic, 2)
    n = N + 4
    closure_central(cp, tp, kn, dx, slots, slot_src)
    fl, ul, tl, fr, ur, tr, lam_l, lam_r, status = reconstruct_padded(
        cp, up, tp, kn, dx, recon, cmax, nstate, top,
        i_e, i_2e, minus, minus2, slots, slot_src)
    rhs = np.zeros((N, K))
    if status >= 0:
        return rhs, status
    # Interfaces k = 1..N+1; g_own in frame k, g_next in frame k+1.
    g_own = np.zeros((n, K))
    g_next = np.zeros((n, K))
    for k in range(1, N + 2):
        hll_row(fl[k], ul[k], tl[k], fr[k + 1], ur[k + 1], tr[k + 1],
                lam_l[k], lam_r[k], up[k], tp[k],
                minus, minus2, plus, alpha, nstate, top, g_own[k])
        project_row(g_own[k], up[k], tp[k], up[k + 1], tp[k + 1],
                    minus, minus2, top, g_next[k])
    for i in range(N):
        p = i + 2
        for a in range(nstate):
            rhs[i, a] = -(g_own[p, a] - g_next[p - 1, a]) / dx
    return rhs, status


@njit(cache=True)
def rkc_combine_cells(c0, u0, t0, c1, u1, t1, c2, u2, t2, f0, f1,
                      w0, w1, w2, wf1, wf0, nstate, top,
                      i_e, i_2e, minus, minus2):
    """w0*W0 + w1*W1 + w2*W2 + wf1*F1 + wf0*F0 per cell, standardized.

    W1 and F1 share a frame, which is the combination frame; F0 is in the
    frame of W0. Returns the standardized result and a status (-1 ok, else
    the first inadmissible cell).
    """
    N, K = c0.shape
    out = np.zeros((N, K))
    uo = np.empty((N, 3))
    to = np.empty(N)
    p0 = np.empty(K)
    p2 = np.empty(K)
    pf = np.empty(K)
    acc = np.zeros(K)
    status = -1
    for i in range(N):
        project_row(c0[i], u0[i], t0[i], u1[i], t1[i], minus, minus2, top, p0)
        project_row(f0[i], u0[i], t0[i], u1[i], t1[i], minus, minus2, top, pf)
        if w2 != 0.0:
            project_row(c2[i], u2[i], t2[i], u1[i], t1[i], minus, minus2, top, p2)
        else:
            p2[:] = 0.0
        for a in range(nstate):
            acc[a] = (w0 * p0[a] + w1 * c1[i, a] + w2 * p2[a]
                      + wf1 * f1[i, a] + wf0 * pf[a])
        th_new = standardize_row(acc, u1[i], t1[i], i_e, i_2e,
                                 minus, minus2, top, out[i], uo[i])
        if th_new <= 0.0:
            if status < 0:
                status = i
            th_new = t1[i]
            uo[i] = u1[i]
        to[i] = th_new
        for a in range(nstate, K):
            out[i, a] = 0.0
    return out, uo, to, status
