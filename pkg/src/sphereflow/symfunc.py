"""Curvature-function algebra on principal-curvature vectors.

Elementary symmetric polynomials H_k, the Garding cones Gamma_k, and the
admissible curvature functions F (mean curvature, normalized roots of H_k,
power means, quotients H_k/H_l) with analytic gradients and Hessians.
Every family is homogeneous of degree one, symmetric, and normalized so
that F(1, ..., 1) = n.

All evaluations sort the curvature vector internally and un-sort derivative
output, which makes permutation symmetry exact in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "elementary_symmetric",
    "elementary_symmetric_all",
    "elementary_symmetric_gradient",
    "elementary_symmetric_hessian",
    "cone_membership",
    "normalized_root",
    "CurvatureSpec",
    "curvature_value",
    "curvature_gradient",
    "curvature_hessian",
    "inverse_concavity_form",
    "axisym_family_eval",
]

# Tolerance below which two principal curvatures count as colliding when
# assembling divided differences of gradient components.
_COLLISION_TOL = 1e-8


def _as_kappa(kappa) -> np.ndarray:
    k = np.asarray(kappa, dtype=float)
    if k.ndim != 1 or k.size == 0:
        raise DomainError("kappa must be a nonempty 1-d vector")
    return k


def elementary_symmetric(kappa, k: int) -> float:
    """Unnormalized elementary symmetric polynomial H_k(kappa).

    H_0 = 1, H_1 = sum kappa_i, ..., H_n = prod kappa_i.  The normalized
    variant is H_k / binom(n, k).
    """
    kap = _as_kappa(kappa)
    n = kap.size
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    return elementary_symmetric_all(kap)[k]


def elementary_symmetric_all(kappa) -> np.ndarray:
    """All H_0 .. H_n by the stable product recurrence."""
    kap = np.sort(_as_kappa(kappa))
    n = kap.size
    e = np.zeros(n + 1)
    e[0] = 1.0
    for i in range(n):
        x = kap[i]
        for j in range(i + 1, 0, -1):
            e[j] += x * e[j - 1]
    return e


def _deflate(e: np.ndarray, x: float) -> np.ndarray:
    """Symmetric polynomials of the vector with one entry x removed.

    Given e_j of the full vector, returns d_j = e_j(kappa without x) from
    the Horner-style recursion d_j = e_j - x d_{j-1}.
    """
    m = e.size - 1
    d = np.zeros(m)
    d[0] = 1.0
    for j in range(1, m):
        d[j] = e[j] - x * d[j - 1]
    return d


def elementary_symmetric_gradient(kappa, k: int) -> np.ndarray:
    """dH_k/dkappa_i = H_{k-1}(kappa with entry i removed)."""
    kap = _as_kappa(kappa)
    n = kap.size
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    e = elementary_symmetric_all(kap)
    g = np.empty(n)
    for i in range(n):
        g[i] = _deflate(e, kap[i])[k - 1] if k - 1 < n else 0.0
    return g


def elementary_symmetric_hessian(kappa, k: int) -> np.ndarray:
    """d^2 H_k / dkappa_i dkappa_j: H_{k-2} of kappa minus both entries off
    the diagonal, zero on the diagonal (H_k is multilinear)."""
    kap = _as_kappa(kappa)
    n = kap.size
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    hess = np.zeros((n, n))
    if k < 2:
        return hess
    e = elementary_symmetric_all(kap)
    for i in range(n):
        di = _deflate(e, kap[i])
        for j in range(i + 1, n):
            hess[i, j] = hess[j, i] = _deflate(di, kap[j])[k - 2]
    return hess


def cone_membership(kappa, k: int) -> bool:
    """True iff kappa lies in Gamma_k, i.e. H_1 > 0, ..., H_k > 0."""
    kap = _as_kappa(kappa)
    if not 1 <= k <= kap.size:
        raise ValueError(f"k = {k} out of range for n = {kap.size}")
    e = elementary_symmetric_all(kap)
    return bool(np.all(e[1 : k + 1] > 0.0))


def normalized_root(kappa, k: int) -> float:
    """sigma~_k = (H_k / binom(n,k))^{1/k}, defined on Gamma_k."""
    kap = _as_kappa(kappa)
    n = kap.size
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    if not cone_membership(kap, k):
        raise DomainError(f"kappa not in Gamma_{k}")
    hk = elementary_symmetric_all(kap)[k]
    return (hk / math.comb(n, k)) ** (1.0 / k)


# --- curvature-function families ------------------------------------------

_FAMILIES = ("mean", "root_k", "power_mean", "quotient")


@dataclass(frozen=True)
class CurvatureSpec:
    """An admissible curvature function: family, parameters, flow exponent p.

    family   one of "mean", "root_k" (needs k), "power_mean" (needs r),
             "quotient" (needs k > l >= 0)
    p        flow exponent, speed F^{-p}, p > 0
    n        number of principal curvatures
    """

    family: str
    n: int
    p: float = 1.0
    k: int | None = None
    l: int | None = None
    r: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.p > 0:
            raise ValueError("p must be > 0")
        if self.family == "root_k":
            if self.k is None or not 1 <= self.k <= self.n:
                raise ValueError("root_k requires 1 <= k <= n")
        elif self.family == "power_mean":
            if self.r is None or self.r == 0 or abs(self.r) > 1:
                raise ValueError("power_mean requires 0 < |r| <= 1")
        elif self.family == "quotient":
            if self.k is None or self.l is None or not self.n >= self.k > self.l >= 0:
                raise ValueError("quotient requires n >= k > l >= 0")

    @property
    def is_concave(self) -> bool:
        return True  # every admitted family is concave on the positive cone

    @property
    def is_inverse_concave(self) -> bool:
        # mean and power means with |r| <= 1 are inverse concave, quotients
        # H_k/H_l are inverse concave, and root_k coincides with
        # quotient(k, 0), so it inherits the flag.
        return True

    def to_dict(self) -> dict:
        doc = {"family": self.family, "p": self.p}
        if self.k is not None:
            doc["k"] = self.k
        if self.l is not None:
            doc["l"] = self.l
        if self.r is not None:
            doc["r"] = self.r
        return doc

    @classmethod
    def from_dict(cls, doc: dict, n: int) -> "CurvatureSpec":
        return cls(
            family=doc["family"],
            n=n,
            p=float(doc.get("p", 1.0)),
            k=doc.get("k"),
            l=doc.get("l"),
            r=doc.get("r"),
        )

    @classmethod
    def unchecked(cls, family: str, n: int, p: float = 1.0, k=None, l=None, r=None):
        """Skip parameter validation.

        Exists so the property suite can be pointed at deliberately
        inadmissible parameter choices (negative controls); never used by
        the flow itself.
        """
        obj = object.__new__(cls)
        object.__setattr__(obj, "family", family)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "k", k)
        object.__setattr__(obj, "l", l)
        object.__setattr__(obj, "r", r)
        return obj


def _require_positive_cone(kappa: np.ndarray):
    if not np.all(kappa > 0.0):
        raise DomainError("kappa not in the positive cone")


def _quotient_indices(spec: CurvatureSpec) -> tuple[int, int]:
    # root_k is quotient(k, 0) with H~_0 = 1
    if spec.family == "root_k":
        return spec.k, 0
    return spec.k, spec.l


def curvature_value(spec: CurvatureSpec, kappa) -> float:
    """F(kappa) for the family, normalized so F(1, ..., 1) = n."""
    kap = _as_kappa(kappa)
    if kap.size != spec.n:
        raise ValueError("kappa length does not match spec.n")
    _require_positive_cone(kap)
    n = spec.n
    if spec.family == "mean":
        return float(np.sum(np.sort(kap)))
    if spec.family == "power_mean":
        r = spec.r
        s = float(np.sum(np.sort(kap**r)))
        return n ** (1.0 - 1.0 / r) * s ** (1.0 / r)
    k, l = _quotient_indices(spec)
    e = elementary_symmetric_all(kap)
    ht_k = e[k] / math.comb(n, k)
    ht_l = e[l] / math.comb(n, l)
    return n * (ht_k / ht_l) ** (1.0 / (k - l))


def curvature_gradient(spec: CurvatureSpec, kappa) -> np.ndarray:
    """Analytic partial derivatives F_i = dF/dkappa_i (all positive)."""
    kap = _as_kappa(kappa)
    if kap.size != spec.n:
        raise ValueError("kappa length does not match spec.n")
    _require_positive_cone(kap)
    n = spec.n
    order = np.argsort(kap)
    ks = kap[order]
    if spec.family == "mean":
        g = np.ones(n)
    elif spec.family == "power_mean":
        r = spec.r
        s = float(np.sum(ks**r))
        g = n ** (1.0 - 1.0 / r) * s ** (1.0 / r - 1.0) * ks ** (r - 1.0)
    else:
        k, l = _quotient_indices(spec)
        f = curvature_value(spec, ks)
        e = elementary_symmetric_all(ks)
        gk = elementary_symmetric_gradient(ks, k) / e[k]
        gl = (elementary_symmetric_gradient(ks, l) / e[l]) if l >= 1 else 0.0
        g = f / (k - l) * (gk - gl)
    out = np.empty(n)
    out[order] = g
    return out


def curvature_hessian(spec: CurvatureSpec, kappa) -> np.ndarray:
    """Analytic Hessian d^2F/dkappa_i dkappa_j.

    Negative semidefinite on the concave families; annihilates kappa by
    degree-one homogeneity.
    """
    kap = _as_kappa(kappa)
    if kap.size != spec.n:
        raise ValueError("kappa length does not match spec.n")
    _require_positive_cone(kap)
    n = spec.n
    order = np.argsort(kap)
    ks = kap[order]
    if spec.family == "mean":
        hess = np.zeros((n, n))
    elif spec.family == "power_mean":
        r = spec.r
        s = float(np.sum(ks**r))
        pref = (1.0 - r) * n ** (1.0 - 1.0 / r) * s ** (1.0 / r - 2.0)
        outer = np.outer(ks ** (r - 1.0), ks ** (r - 1.0))
        hess = pref * (outer - s * np.diag(ks ** (r - 2.0)))
    else:
        k, l = _quotient_indices(spec)
        f = curvature_value(spec, ks)
        m = k - l
        e = elementary_symmetric_all(ks)
        gk = elementary_symmetric_gradient(ks, k) / e[k]
        hk = elementary_symmetric_hessian(ks, k) / e[k]
        if l >= 1:
            gl = elementary_symmetric_gradient(ks, l) / e[l]
            hl = elementary_symmetric_hessian(ks, l) / e[l]
        else:
            gl = np.zeros(n)
            hl = np.zeros((n, n))
        d = (gk - gl) / m
        hess = f * (
            np.outer(d, d)
            + (hk - np.outer(gk, gk) - hl + np.outer(gl, gl)) / m
        )
    out = np.empty((n, n))
    out[np.ix_(order, order)] = hess
    return out


def inverse_concavity_form(spec: CurvatureSpec, h, eta) -> float:
    """Quadratic form whose nonnegativity encodes inverse concavity.

    In an eigenbasis of the positive definite symmetric matrix h with
    eigenvalues kappa,

        Q = sum_ij F_ij eta_ii eta_jj
            + sum_{i != j} (F_i - F_j)/(kappa_i - kappa_j) eta_ij^2
            + 2 sum_{i,j} F_i eta_ij^2 / kappa_j
            - (2/F) (sum_i F_i eta_ii)^2.

    Colliding eigenvalues replace the divided difference by its analytic
    limit F_ii - F_ij.  Q(h, h) = 0 by degree-one homogeneity.
    """
    hm = np.asarray(h, dtype=float)
    em = np.asarray(eta, dtype=float)
    if hm.shape != (spec.n, spec.n) or em.shape != (spec.n, spec.n):
        raise ValueError("h and eta must be n x n")
    if np.max(np.abs(hm - hm.T)) > 1e-14 * max(1.0, np.max(np.abs(hm))):
        raise ValueError("h must be symmetric")
    if np.max(np.abs(em - em.T)) > 1e-14 * max(1.0, np.max(np.abs(em)), 1.0):
        raise ValueError("eta must be symmetric")
    kappa, q = np.linalg.eigh(hm)
    if kappa[0] <= 0.0:
        raise DomainError("h must be positive definite")
    et = q.T @ em @ q
    f = curvature_value(spec, kappa)
    grad = curvature_gradient(spec, kappa)
    hess = curvature_hessian(spec, kappa)

    n = spec.n
    diag = np.diag(et)
    total = float(diag @ hess @ diag)
    for i in range(n):
        for j in range(i + 1, n):
            gap = kappa[i] - kappa[j]
            if abs(gap) < _COLLISION_TOL * max(1.0, abs(kappa[i])):
                dd = hess[i, i] - hess[i, j]
            else:
                dd = (grad[i] - grad[j]) / gap
            total += 2.0 * dd * et[i, j] ** 2
    total += 2.0 * float(grad @ (et**2) @ (1.0 / kappa))
    total -= 2.0 / f * float(grad @ diag) ** 2
    return total


# --- axisymmetric fast path -------------------------------------------------


def axisym_family_eval(spec: CurvatureSpec, kap_m, kap_a):
    """Vectorized F and partials for the curvature pattern (kap_m, kap_a x (n-1)).

    Returns (F, F_merid, F_azim) where F_azim is the derivative with respect
    to one azimuthal curvature.  Used by the flow kernels and the record
    assembly; cross-checked in the tests against the generic gradient.
    """
    km = np.asarray(kap_m, dtype=float)
    ka = np.asarray(kap_a, dtype=float)
    n = spec.n
    if spec.family == "mean":
        f = km + (n - 1) * ka
        one = np.ones_like(f)
        return f, one, one
    if spec.family == "power_mean":
        r = spec.r
        s = km**r + (n - 1) * ka**r
        pref = n ** (1.0 - 1.0 / r)
        f = pref * s ** (1.0 / r)
        fs = pref * s ** (1.0 / r - 1.0)
        return f, fs * km ** (r - 1.0), fs * ka ** (r - 1.0)

    k, l = _quotient_indices(spec)

    # closed forms: H_j = C(n-1, j) ka^j + C(n-1, j-1) ka^{j-1} km
    def h_val(j):
        if j == 0:
            return np.ones_like(km)
        out = math.comb(n - 1, j - 1) * ka ** (j - 1) * km
        if j <= n - 1:
            out = out + math.comb(n - 1, j) * ka**j
        return out

    def h_dm(j):
        if j == 0:
            return np.zeros_like(km)
        return math.comb(n - 1, j - 1) * ka ** (j - 1) * np.ones_like(km)

    def h_da(j):
        # derivative with respect to one azimuthal entry
        if j == 0:
            return np.zeros_like(km)
        out = np.zeros_like(km)
        if j - 1 <= n - 2:
            out = out + math.comb(n - 2, j - 1) * ka ** (j - 1)
        if j >= 2:
            out = out + math.comb(n - 2, j - 2) * ka ** (j - 2) * km
        return out

    hk, hl = h_val(k), h_val(l)
    f = n * ((hk / math.comb(n, k)) / (hl / math.comb(n, l))) ** (1.0 / (k - l))
    fm = f / (k - l) * (h_dm(k) / hk - h_dm(l) / hl)
    fa = f / (k - l) * (h_da(k) / hk - h_da(l) / hl)
    return f, fm, fa
