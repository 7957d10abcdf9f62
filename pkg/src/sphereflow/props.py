"""Randomized invariant checks for the curvature-function algebra.

Each invariant draws its own deterministic random stream (spawned from the
suite seed in registry order, so adding an invariant does not reshuffle the
others) and evaluates a known identity or inequality on random admissible
inputs.  A sample fails when its slack drops below zero; slacks are
tolerance minus error for identities and the signed margin for
inequalities.

Extra curvature specs can be injected into the sampling pool, which is how
the negative-control tests point the suite at inadmissible families.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import symfunc
from .symfunc import CurvatureSpec

_DIMS = (2, 3, 4, 5)


@dataclass(frozen=True)
class InvariantResult:
    name: str
    samples: int
    failures: int
    worst_margin: float
    first_failure: str | None

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    samples: int
    results: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def _sample_kappa(rng, n, lo=0.1, hi=10.0):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=n))


def _sample_spec(rng, extras):
    if extras and rng.random() < 0.25:
        return extras[rng.integers(len(extras))]
    n = int(rng.choice(_DIMS))
    fam = int(rng.integers(4))
    if fam == 0:
        return CurvatureSpec("mean", n)
    if fam == 1:
        return CurvatureSpec("root_k", n, k=int(rng.integers(1, n + 1)))
    if fam == 2:
        r = float(rng.uniform(-1.0, 1.0))
        if abs(r) < 0.05:
            r = 0.5
        return CurvatureSpec("power_mean", n, r=r)
    k = int(rng.integers(1, n + 1))
    l = int(rng.integers(0, k))
    return CurvatureSpec("quotient", n, k=k, l=l)


def _describe(spec, kappa):
    return f"{spec.family}(n={spec.n}, k={spec.k}, l={spec.l}, r={spec.r}) at kappa={kappa!r}"


class _Collector:
    def __init__(self, name, samples):
        self.name = name
        self.samples = samples
        self.failures = 0
        self.worst = math.inf
        self.first = None

    def add(self, margin, detail_fn):
        if margin < self.worst:
            self.worst = margin
        if margin < 0.0:
            self.failures += 1
            if self.first is None:
                self.first = detail_fn()

    def result(self):
        return InvariantResult(
            name=self.name,
            samples=self.samples,
            failures=self.failures,
            worst_margin=self.worst,
            first_failure=self.first,
        )


def _inv_normalization(rng, samples, extras):
    col = _Collector("normalization", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        ones = np.ones(spec.n)
        err = abs(symfunc.curvature_value(spec, ones) - spec.n)
        col.add(1e-12 * spec.n - err, lambda: _describe(spec, ones))
    return col.result()


def _inv_permutation(rng, samples, extras):
    col = _Collector("permutation-symmetry", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n)
        perm = rng.permutation(spec.n)
        f0 = symfunc.curvature_value(spec, kap)
        f1 = symfunc.curvature_value(spec, kap[perm])
        g0 = symfunc.curvature_gradient(spec, kap)
        g1 = symfunc.curvature_gradient(spec, kap[perm])
        err = abs(f0 - f1) + float(np.max(np.abs(g0[perm] - g1)))
        col.add(-err, lambda: _describe(spec, kap))
    return col.result()


def _inv_homogeneity(rng, samples, extras):
    col = _Collector("homogeneity", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n)
        lam = float(np.exp(rng.uniform(-2.0, 2.0)))
        f = symfunc.curvature_value(spec, kap)
        err = abs(symfunc.curvature_value(spec, lam * kap) - lam * f)
        col.add(1e-12 * lam * f - err, lambda: _describe(spec, kap))
    return col.result()


def _inv_euler(rng, samples, extras):
    col = _Collector("euler-identity", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n)
        f = symfunc.curvature_value(spec, kap)
        g = symfunc.curvature_gradient(spec, kap)
        err = abs(float(g @ kap) - f)
        col.add(1e-10 * max(1.0, f) - err, lambda: _describe(spec, kap))
    return col.result()


def _inv_maclaurin(rng, samples, extras):
    col = _Collector("maclaurin-chain", samples)
    for _ in range(samples):
        n = int(rng.choice(_DIMS))
        # mix of positive and sign-mixed vectors to reach Gamma_m < Gamma_+
        kap = rng.normal(1.0, 0.8, size=n)
        if not symfunc.cone_membership(kap, 1):
            kap = np.abs(kap) + 0.05
        m = 1
        while m < n and symfunc.cone_membership(kap, m + 1):
            m += 1
        roots = [symfunc.normalized_root(kap, j) for j in range(1, m + 1)]
        worst = 0.0
        for a, b in zip(roots, roots[1:]):
            worst = min(worst, a - b + 1e-12 * abs(roots[0]))
        col.add(worst, lambda: f"n={n}, kappa={kap!r}, chain={roots!r}")
    return col.result()


def _inv_derivative_identity(rng, samples, extras):
    col = _Collector("derivative-identity", samples)
    for _ in range(samples):
        n = int(rng.choice(_DIMS))
        kap = _sample_kappa(rng, n)
        e = symfunc.elementary_symmetric_all(kap)
        worst = math.inf
        for k in range(1, n):
            gk1 = symfunc.elementary_symmetric_gradient(kap, k + 1)
            gk = symfunc.elementary_symmetric_gradient(kap, k)
            lhs = gk1 + kap * gk
            err = float(np.max(np.abs(lhs - e[k])))
            worst = min(worst, 1e-10 * max(1.0, abs(e[k])) - err)
        col.add(worst, lambda: f"n={n}, kappa={kap!r}")
    return col.result()


def _inv_concavity_bounds(rng, samples, extras):
    col = _Collector("concavity-bounds", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n)
        f = symfunc.curvature_value(spec, kap)
        g = symfunc.curvature_gradient(spec, kap)
        h1 = float(np.sum(kap))
        margin = min(
            h1 * (1.0 + 1e-12) - f,
            float(np.sum(g)) - spec.n * (1.0 - 1e-12),
        )
        col.add(margin, lambda: _describe(spec, kap))
    return col.result()


def _fd_gradient(spec, kap, step):
    g = np.empty(kap.size)
    for i in range(kap.size):
        hp = kap.copy()
        hm = kap.copy()
        hi = step * max(1.0, abs(kap[i]))
        hp[i] += hi
        hm[i] -= hi
        g[i] = (symfunc.curvature_value(spec, hp) - symfunc.curvature_value(spec, hm)) / (
            2.0 * hi
        )
    return g


def _inv_gradient_fd(rng, samples, extras):
    col = _Collector("gradient-fd", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n, lo=0.2, hi=5.0)
        g = symfunc.curvature_gradient(spec, kap)
        gfd = _fd_gradient(spec, kap, 1e-5)
        scale = float(np.max(np.abs(g))) + 1e-30
        err = float(np.max(np.abs(g - gfd))) / scale
        col.add(1e-6 - err, lambda: _describe(spec, kap))
    return col.result()


def _inv_hessian_fd(rng, samples, extras):
    col = _Collector("hessian-fd", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        kap = _sample_kappa(rng, spec.n, lo=0.2, hi=5.0)
        hess = symfunc.curvature_hessian(spec, kap)
        n = spec.n
        fd = np.empty((n, n))
        for i in range(n):
            hi = 1e-5 * max(1.0, abs(kap[i]))
            hp = kap.copy()
            hm = kap.copy()
            hp[i] += hi
            hm[i] -= hi
            fd[i] = (
                symfunc.curvature_gradient(spec, hp)
                - symfunc.curvature_gradient(spec, hm)
            ) / (2.0 * hi)
        fd = 0.5 * (fd + fd.T)
        scale = float(np.max(np.abs(hess))) + 1e-3
        err = float(np.max(np.abs(hess - fd))) / scale
        col.add(1e-6 - err, lambda: _describe(spec, kap))
    return col.result()


def _random_h_eta(rng, n, probe):
    kap = _sample_kappa(rng, n, lo=0.2, hi=5.0)
    a = rng.normal(size=(n, n))
    q, _ = np.linalg.qr(a)
    h = q @ np.diag(kap) @ q.T
    h = 0.5 * (h + h.T)
    if probe == 0:
        eta = rng.normal(size=(n, n))
        eta = 0.5 * (eta + eta.T)
    elif probe == 1:
        eta = np.diag(rng.normal(size=n))
    else:
        i, j = rng.integers(n), rng.integers(n)
        eta = np.zeros((n, n))
        eta[i, j] += 1.0
        eta[j, i] += 1.0
    eta /= np.linalg.norm(eta) + 1e-30
    return h, eta


def _inv_inverse_concavity(rng, samples, extras):
    col = _Collector("inverse-concavity-form", samples)
    for s in range(samples):
        spec = _sample_spec(rng, extras)
        if not spec.is_inverse_concave:
            continue
        h, eta = _random_h_eta(rng, spec.n, probe=s % 3)
        q = symfunc.inverse_concavity_form(spec, h, eta)
        f = symfunc.curvature_value(spec, np.linalg.eigvalsh(h))
        col.add(q + 1e-10 * spec.n * f, lambda: f"{spec.family}(n={spec.n}, k={spec.k}, l={spec.l}, r={spec.r}), Q={q:.3e}")
    return col.result()


def _inv_self_null(rng, samples, extras):
    col = _Collector("self-null-direction", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        h, _ = _random_h_eta(rng, spec.n, probe=0)
        q = symfunc.inverse_concavity_form(spec, h, h)
        f = symfunc.curvature_value(spec, np.linalg.eigvalsh(h))
        scale = f * float(np.linalg.norm(h)) ** 2
        col.add(1e-9 * scale - abs(q), lambda: f"{spec.family}(n={spec.n}), Q(h,h)={q:.3e}")
    return col.result()


def _inv_multiplicity(rng, samples, extras):
    col = _Collector("multiplicity-closed-form", samples)
    for _ in range(samples):
        spec = _sample_spec(rng, extras)
        if spec.n < 2:
            continue
        km, ka = _sample_kappa(rng, 2, lo=0.2, hi=5.0)
        kap = np.concatenate([[km], np.full(spec.n - 1, ka)])
        f, fm, fa = symfunc.axisym_family_eval(spec, np.array([km]), np.array([ka]))
        f_ref = symfunc.curvature_value(spec, kap)
        g_ref = symfunc.curvature_gradient(spec, kap)
        err = max(
            abs(float(f[0]) - f_ref) / max(1.0, f_ref),
            abs(float(fm[0]) - g_ref[0]),
            abs(float(fa[0]) - g_ref[1]),
        )
        col.add(1e-10 - err, lambda: _describe(spec, kap))
    return col.result()


_REGISTRY = [
    _inv_normalization,
    _inv_permutation,
    _inv_homogeneity,
    _inv_euler,
    _inv_maclaurin,
    _inv_derivative_identity,
    _inv_concavity_bounds,
    _inv_gradient_fd,
    _inv_hessian_fd,
    _inv_inverse_concavity,
    _inv_self_null,
    _inv_multiplicity,
]


def run_suite(seed=42, samples=1000, extra_specs=None):
    """Run every registered invariant on its own substream of the seed."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    extras = list(extra_specs) if extra_specs else []
    streams = np.random.SeedSequence(seed).spawn(len(_REGISTRY))
    results = []
    for fn, ss in zip(_REGISTRY, streams):
        rng = np.random.default_rng(ss)
        results.append(fn(rng, samples, extras))
    return SuiteReport(seed=seed, samples=samples, results=results)
