"""NumPy fallback for the flow speed kernels.

Mirrors _speed.pyx: same formulas, same return contract.  Kept in plain
NumPy so the package works without a C toolchain.
"""

import math

import numpy as np

FAM_MEAN = 0
FAM_ROOT = 1
FAM_POWER = 2
FAM_QUOTIENT = 3


def _d1_reflect(u, h):
    ue = np.concatenate((u[2:0:-1], u, u[-2:-4:-1]))
    d1 = (ue[:-4] - 8.0 * ue[1:-3] + 8.0 * ue[3:-1] - ue[4:]) / (12.0 * h)
    # reflection symmetry makes these exact zeros; enforce to kill rounding
    d1[0] = 0.0
    d1[-1] = 0.0
    return d1


def _d2_reflect(u, h):
    ue = np.concatenate((u[2:0:-1], u, u[-2:-4:-1]))
    return (
        -ue[:-4] + 16.0 * ue[1:-3] - 30.0 * ue[2:-2] + 16.0 * ue[3:-1] - ue[4:]
    ) / (12.0 * h * h)


def _d1_periodic(u, h):
    ue = np.concatenate((u[-2:], u, u[:2]))
    return (ue[:-4] - 8.0 * ue[1:-3] + 8.0 * ue[3:-1] - ue[4:]) / (12.0 * h)


def _d2_periodic(u, h):
    ue = np.concatenate((u[-2:], u, u[:2]))
    return (
        -ue[:-4] + 16.0 * ue[1:-3] - 30.0 * ue[2:-2] + 16.0 * ue[3:-1] - ue[4:]
    ) / (12.0 * h * h)


def _binom(n, k):
    if k < 0 or k > n:
        return 0.0
    return float(math.comb(n, k))


def _quotient_eval(k, l, n, km, ka, want_grad):
    # H_j of (km, ka x (n-1)) collapses to two terms by multiplicity
    def h_of(j):
        if j == 0:
            return np.ones_like(ka)
        return _binom(n - 1, j) * ka**j + _binom(n - 1, j - 1) * ka ** (j - 1) * km

    hk = h_of(k)
    hl = h_of(l)
    ratio = (hk / _binom(n, k)) / (hl / _binom(n, l))
    F = n * ratio ** (1.0 / (k - l))
    if not want_grad:
        return F, None, None

    def dh_m(j):
        if j == 0:
            return np.zeros_like(ka)
        return _binom(n - 1, j - 1) * ka ** (j - 1)

    def dh_a(j):
        if j == 0:
            return np.zeros_like(ka)
        out = _binom(n - 2, j - 1) * ka ** (j - 1)
        if j >= 2:
            out = out + _binom(n - 2, j - 2) * ka ** (j - 2) * km
        return out

    common = F / (k - l)
    fm = common * (dh_m(k) / hk - dh_m(l) / hl)
    fa = common * (dh_a(k) / hk - dh_a(l) / hl)
    return F, fm, fa


def _family_eval(fam, k, l, r, n, km, ka, want_grad):
    if fam == FAM_MEAN:
        F = km + (n - 1.0) * ka
        if not want_grad:
            return F, None, None
        one = np.ones_like(F)
        return F, one, one
    if fam == FAM_POWER:
        s = km**r + (n - 1.0) * ka**r
        pref = float(n) ** (1.0 - 1.0 / r)
        F = pref * s ** (1.0 / r)
        if not want_grad:
            return F, None, None
        fs = pref * s ** (1.0 / r - 1.0)
        return F, fs * km ** (r - 1.0), fs * ka ** (r - 1.0)
    if fam == FAM_ROOT:
        l = 0
    return _quotient_eval(k, l, n, km, ka, want_grad)


def circle_speed(u, h, fam, k, l, r, p, want_diag, out):
    u = np.asarray(u, dtype=np.float64)
    d1 = _d1_periodic(u, h)
    d2 = _d2_periodic(u, h)
    su = np.sin(u)
    cu = np.cos(u)
    w2 = su * su + d1 * d1
    w = np.sqrt(w2)
    kap = (su * su * cu + 2.0 * d1 * d1 * cu - su * d2) / (w2 * w)

    idx = int(np.argmin(kap))
    min_kappa = float(kap[idx])
    max_kappa = float(kap.max())
    if min_kappa <= 0.0:
        out[:] = np.nan
        return (math.nan, math.nan, math.nan, min_kappa, idx, math.nan, max_kappa)

    # all admissible families collapse to F = kappa in one dimension
    F = kap
    v = w / su
    Fp = F**p
    speed = v / Fp
    out[:] = speed
    min_F = float(F.min())
    if not want_diag:
        return (math.nan, math.nan, math.nan, min_kappa, idx, min_F, max_kappa)
    denom = su * su * (Fp * F)
    adiff = p / (v * v) / denom
    return (
        float(adiff.max()),
        0.0,
        float(speed.max()),
        min_kappa,
        idx,
        min_F,
        max_kappa,
    )


def axisym_speed(u, cot_t, n, h, fam, k, l, r, p, want_diag, out):
    u = np.asarray(u, dtype=np.float64)
    d1 = _d1_reflect(u, h)
    d2 = _d2_reflect(u, h)
    su = np.sin(u)
    cu = np.cos(u)
    w2 = su * su + d1 * d1
    w = np.sqrt(w2)
    km = (su * su * cu + 2.0 * d1 * d1 * cu - su * d2) / (w2 * w)
    ka = np.empty_like(km)
    ka[1:-1] = (su[1:-1] * cu[1:-1] - cot_t[1:-1] * d1[1:-1]) / (su[1:-1] * w[1:-1])
    ka[0] = km[0]
    ka[-1] = km[-1]

    node_min = np.minimum(km, ka)
    idx = int(np.argmin(node_min))
    min_kappa = float(node_min[idx])
    max_kappa = float(max(km.max(), ka.max()))
    if min_kappa <= 0.0:
        out[:] = np.nan
        return (math.nan, math.nan, math.nan, min_kappa, idx, math.nan, max_kappa)

    F, fm, fa = _family_eval(fam, k, l, r, n, km, ka, want_diag)
    v = w / su
    Fp = F**p
    speed = v / Fp
    out[:] = speed
    min_F = float(F.min())
    if not want_diag:
        return (math.nan, math.nan, math.nan, min_kappa, idx, min_F, max_kappa)
    denom = su * su * (Fp * F)
    adiff = p * (fm / (v * v)) / denom
    adiff[0] += p * (n - 1.0) * fa[0] / denom[0]
    adiff[-1] += p * (n - 1.0) * fa[-1] / denom[-1]
    cadv = np.zeros_like(adiff)
    cadv[1:-1] = p * (n - 1.0) * fa[1:-1] * np.abs(cot_t[1:-1]) / denom[1:-1]
    return (
        float(adiff.max()),
        float(cadv.max()),
        float(speed.max()),
        min_kappa,
        idx,
        min_F,
        max_kappa,
    )
