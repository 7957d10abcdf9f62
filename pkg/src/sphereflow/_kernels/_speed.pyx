# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled flow speed kernels.  _ref.py is the NumPy mirror; keep in sync."""

from libc.math cimport sin, cos, sqrt, fabs, pow, NAN, INFINITY


cdef inline double _pw(double x, double e) noexcept nogil:
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 0.5:
        return sqrt(x)
    if e == -0.5:
        return 1.0 / sqrt(x)
    if e == -1.0:
        return 1.0 / x
    if e == 1.5:
        return x * sqrt(x)
    if e == 3.0:
        return x * x * x
    if e == 0.0:
        return 1.0
    return pow(x, e)


cdef inline double _ipow(double x, int e) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    for i in range(e):
        out *= x
    return out


cdef inline double _binom(int n, int k) noexcept nogil:
    cdef double out = 1.0
    cdef int i
    if k < 0 or k > n:
        return 0.0
    if k > n - k:
        k = n - k
    for i in range(k):
        out = out * (n - i) / (i + 1.0)
    return out


cdef inline Py_ssize_t _refl(Py_ssize_t j, Py_ssize_t last) noexcept nogil:
    if j < 0:
        return -j
    if j > last:
        return 2 * last - j
    return j


cdef inline Py_ssize_t _wrap(Py_ssize_t j, Py_ssize_t n) noexcept nogil:
    if j < 0:
        return j + n
    if j >= n:
        return j - n
    return j


def circle_speed(const double[::1] u, double h, int fam, int k, int l, double r,
                 double p, int want_diag, double[::1] out):
    cdef Py_ssize_t N = u.shape[0]
    cdef Py_ssize_t j, idx = 0
    cdef double inv12h = 1.0 / (12.0 * h)
    cdef double inv12h2 = 1.0 / (12.0 * h * h)
    cdef double um2, um1, u0, up1, up2, d1, d2, su, cu, w2, w, kap
    cdef double v, Fp, speed, adiff
    cdef double min_kappa = INFINITY, min_F = INFINITY
    cdef double max_kappa = -INFINITY
    cdef double max_adiff = -INFINITY, max_speed = -INFINITY
    cdef bint bad = 0

    for j in range(N):
        um2 = u[_wrap(j - 2, N)]
        um1 = u[_wrap(j - 1, N)]
        u0 = u[j]
        up1 = u[_wrap(j + 1, N)]
        up2 = u[_wrap(j + 2, N)]
        d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) * inv12h
        d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) * inv12h2
        su = sin(u0)
        cu = cos(u0)
        w2 = su * su + d1 * d1
        w = sqrt(w2)
        kap = (su * su * cu + 2.0 * d1 * d1 * cu - su * d2) / (w2 * w)
        if kap < min_kappa:
            min_kappa = kap
            idx = j
        if kap > max_kappa:
            max_kappa = kap
        if kap <= 0.0:
            bad = 1
            out[j] = NAN
            continue
        v = w / su
        Fp = _pw(kap, p)
        speed = v / Fp
        out[j] = speed
        if kap < min_F:
            min_F = kap
        if want_diag:
            adiff = p / (v * v) / (su * su * Fp * kap)
            if adiff > max_adiff:
                max_adiff = adiff
            if speed > max_speed:
                max_speed = speed

    if bad:
        for j in range(N):
            out[j] = NAN
        return (NAN, NAN, NAN, min_kappa, idx, NAN, max_kappa)
    if not want_diag:
        return (NAN, NAN, NAN, min_kappa, idx, min_F, max_kappa)
    return (max_adiff, 0.0, max_speed, min_kappa, idx, min_F, max_kappa)


def axisym_speed(const double[::1] u, const double[::1] cot_t, int n, double h, int fam,
                 int k, int l, double r, double p, int want_diag,
                 double[::1] out):
    cdef Py_ssize_t N = u.shape[0]
    cdef Py_ssize_t last = N - 1
    cdef Py_ssize_t j, idx = 0
    cdef double inv12h = 1.0 / (12.0 * h)
    cdef double inv12h2 = 1.0 / (12.0 * h * h)
    cdef double nm1 = n - 1.0
    cdef double um2, um1, u0, up1, up2, d1, d2, su, cu, w2, w
    cdef double km, ka, node_min, v, F, fm, fa, Fp, speed, denom, adiff, cadv
    cdef double hk, hl, dhk_m, dhl_m, dhk_a, dhl_a, ratio, common, s, fs
    cdef double min_kappa = INFINITY, min_F = INFINITY
    cdef double max_kappa = -INFINITY, node_max = 0.0
    cdef double max_adiff = -INFINITY, max_cadv = 0.0, max_speed = -INFINITY
    cdef bint bad = 0

    # quotient coefficients (root collapses to quotient(k, 0))
    cdef int kk = k, ll = l
    if fam == 1:
        fam = 3
        ll = 0
    cdef double b_nk = _binom(n, kk), b_nl = _binom(n, ll)
    cdef double bk1 = _binom(n - 1, kk), bk2 = _binom(n - 1, kk - 1)
    cdef double bk3 = _binom(n - 2, kk - 1), bk4 = _binom(n - 2, kk - 2)
    cdef double bl1 = _binom(n - 1, ll), bl2 = _binom(n - 1, ll - 1)
    cdef double bl3 = _binom(n - 2, ll - 1), bl4 = _binom(n - 2, ll - 2)
    cdef double inv_kl = 0.0
    if fam == 3:
        inv_kl = 1.0 / (kk - ll)
    cdef double pref = 0.0, inv_r = 0.0
    if fam == 2:
        pref = pow(<double> n, 1.0 - 1.0 / r)
        inv_r = 1.0 / r

    for j in range(N):
        um2 = u[_refl(j - 2, last)]
        um1 = u[_refl(j - 1, last)]
        u0 = u[j]
        up1 = u[_refl(j + 1, last)]
        up2 = u[_refl(j + 2, last)]
        d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) * inv12h
        if j == 0 or j == last:
            d1 = 0.0
        d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) * inv12h2
        su = sin(u0)
        cu = cos(u0)
        w2 = su * su + d1 * d1
        w = sqrt(w2)
        km = (su * su * cu + 2.0 * d1 * d1 * cu - su * d2) / (w2 * w)
        if j == 0 or j == last:
            ka = km
        else:
            ka = (su * cu - cot_t[j] * d1) / (su * w)
        node_min = km if km < ka else ka
        node_max = km if km > ka else ka
        if node_min < min_kappa:
            min_kappa = node_min
            idx = j
        if node_max > max_kappa:
            max_kappa = node_max
        if node_min <= 0.0:
            bad = 1
            out[j] = NAN
            continue

        if fam == 0:
            F = km + nm1 * ka
            fm = 1.0
            fa = 1.0
        elif fam == 2:
            s = _pw(km, r) + nm1 * _pw(ka, r)
            F = pref * _pw(s, inv_r)
            if want_diag:
                fs = pref * _pw(s, inv_r - 1.0)
                fm = fs * _pw(km, r - 1.0)
                fa = fs * _pw(ka, r - 1.0)
        else:
            hk = bk1 * _ipow(ka, kk) + bk2 * _ipow(ka, kk - 1) * km
            if ll == 0:
                hl = 1.0
            else:
                hl = bl1 * _ipow(ka, ll) + bl2 * _ipow(ka, ll - 1) * km
            ratio = (hk / b_nk) / (hl / b_nl)
            F = n * _pw(ratio, inv_kl)
            if want_diag:
                dhk_m = bk2 * _ipow(ka, kk - 1)
                dhk_a = bk3 * _ipow(ka, kk - 1)
                if kk >= 2:
                    dhk_a += bk4 * _ipow(ka, kk - 2) * km
                if ll == 0:
                    dhl_m = 0.0
                    dhl_a = 0.0
                else:
                    dhl_m = bl2 * _ipow(ka, ll - 1)
                    dhl_a = bl3 * _ipow(ka, ll - 1)
                    if ll >= 2:
                        dhl_a += bl4 * _ipow(ka, ll - 2) * km
                common = F * inv_kl
                fm = common * (dhk_m / hk - dhl_m / hl)
                fa = common * (dhk_a / hk - dhl_a / hl)

        v = w / su
        Fp = _pw(F, p)
        speed = v / Fp
        out[j] = speed
        if F < min_F:
            min_F = F
        if want_diag:
            denom = su * su * (Fp * F)
            adiff = p * (fm / (v * v)) / denom
            if j == 0 or j == last:
                adiff += p * nm1 * fa / denom
            else:
                cadv = p * nm1 * fa * fabs(cot_t[j]) / denom
                if cadv > max_cadv:
                    max_cadv = cadv
            if adiff > max_adiff:
                max_adiff = adiff
            if speed > max_speed:
                max_speed = speed

    if bad:
        for j in range(N):
            out[j] = NAN
        return (NAN, NAN, NAN, min_kappa, idx, NAN, max_kappa)
    if not want_diag:
        return (NAN, NAN, NAN, min_kappa, idx, min_F, max_kappa)
    return (max_adiff, max_cadv, max_speed, min_kappa, idx, min_F, max_kappa)
