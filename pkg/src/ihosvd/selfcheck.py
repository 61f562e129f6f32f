"""Randomized property checks with brute-force oracles.

Each check returns a :class:`Check` holding the worst observed statistic and
the bound it must respect. The oracles here deliberately avoid the library's
fast paths: mode products are checked against explicit index loops and
Kronecker matrices, the gradient against finite differences of the
vectorized objective.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import orthonormalize, pinv, svd
from .observation import ObservationMask, sample_uniform
from .solvers import grad_h, ihooi_iterate, objective_g, objective_g_energy
from .solvers.common import random_factors
from .synthetic import GeneratorSpec, generate
from .tensor_core import fold, kron, kron_all, mode_product, product_all, unfold, vectorize


@dataclass
class Check:
    name: str
    value: float
    bound: float
    upper: bool = True  # value must be <= bound (else >= bound)

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.bound if self.upper else self.value >= self.bound

    def line(self) -> str:
        op = "<=" if self.upper else ">="
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34} {self.value: .3e} {op} {self.bound:.1e}"


def _rand_shape(rng, max_dim=4, max_order=4):
    order = int(rng.integers(1, max_order + 1))
    return tuple(int(v) for v in rng.integers(1, max_dim + 1, size=order))


def mode_product_loops(t: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Mode-n product by summing over every index explicitly."""
    shape = list(t.shape)
    shape[n] = b.shape[0]
    out = np.zeros(shape)
    for idx in itertools.product(*(range(m) for m in shape)):
        total = 0.0
        for i in range(t.shape[n]):
            src = list(idx)
            src[n] = i
            total += t[tuple(src)] * b[idx[n], i]
        out[idx] = total
    return out


def _kron_except(factors, n=None):
    # (A_N ⊗ ... ⊗ A_1), skipping mode n
    return kron_all([a for i, a in reversed(list(enumerate(factors))) if i != n])


def check_identities(instances: int = 100, seed: int = 0) -> list[Check]:
    """Multilinear identities on random instances with entries in [-1, 1]."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(
        ["mode product vs loops", "fold(unfold)", "product of products", "unfolding formula",
         "vectorization formula", "kron associativity", "kron mixed product", "kron transpose",
         "kron pseudo-inverse", "energy identity", "distinct modes commute"], 0.0)

    def bump(key, val):
        worst[key] = max(worst[key], float(val))

    for _ in range(instances):
        shape = _rand_shape(rng)
        t = rng.uniform(-1, 1, shape)
        n = int(rng.integers(len(shape)))
        b = rng.uniform(-1, 1, (int(rng.integers(1, 5)), shape[n]))
        bump("mode product vs loops", np.max(np.abs(mode_product(t, b, n) - mode_product_loops(t, b, n))))
        for k in range(len(shape)):
            bump("fold(unfold)", np.max(np.abs(fold(unfold(t, k), k, shape) - t)))
        x = rng.uniform(-1, 1, (int(rng.integers(1, 5)), b.shape[0]))
        bump("product of products",
             np.max(np.abs(mode_product(t, x @ b, n) - mode_product(mode_product(t, b, n), x, n))))
        if len(shape) > 1:
            m = (n + 1) % len(shape)
            c = rng.uniform(-1, 1, (int(rng.integers(1, 5)), shape[m]))
            ab = mode_product(mode_product(t, b, n), c, m)
            ba = mode_product(mode_product(t, c, m), b, n)
            bump("distinct modes commute", np.max(np.abs(ab - ba)))

        core = rng.uniform(-1, 1, shape)
        factors = [rng.uniform(-1, 1, (int(rng.integers(1, 5)), r)) for r in shape]
        full = product_all(core, factors)
        for k in range(len(shape)):
            rhs = factors[k] @ unfold(core, k) @ _kron_except(factors, k).T
            bump("unfolding formula", np.max(np.abs(unfold(full, k) - rhs)))
        bump("vectorization formula",
             np.max(np.abs(vectorize(full) - _kron_except(factors) @ vectorize(core))))

        a, bb, cc, d = (rng.uniform(-1, 1, (int(rng.integers(1, 4)), int(rng.integers(1, 4)))) for _ in range(4))
        bump("kron associativity", np.max(np.abs(kron(kron(a, bb), cc) - kron(a, kron(bb, cc)))))
        a2 = rng.uniform(-1, 1, (2, 3)); b2 = rng.uniform(-1, 1, (3, 2))
        c2 = rng.uniform(-1, 1, (3, 2)); d2 = rng.uniform(-1, 1, (2, 3))
        bump("kron mixed product", np.max(np.abs(kron(a2, b2) @ kron(c2, d2) - kron(a2 @ c2, b2 @ d2))))
        bump("kron transpose", np.max(np.abs(kron(a, bb).T - kron(a.T, bb.T))))
        bump("kron pseudo-inverse", np.max(np.abs(pinv(kron(a, bb)) - kron(pinv(a), pinv(bb)))))

        ranks = tuple(int(rng.integers(1, m + 1)) for m in shape)
        orth = random_factors(shape, ranks, rng)
        gap = objective_g(orth, t) - objective_g_energy(orth, t)
        bump("energy identity", abs(gap))
    return [Check(k, v, 0.0 if k == "fold(unfold)" else 1e-10) for k, v in worst.items()]


def _h_value(xvec, mvec, observed, factors):
    # vectorized imputation objective: 1/2||D2 x||^2 - 1/2||K^T (D2 x + D1 m)||^2
    d1 = observed.astype(float)
    d2 = 1.0 - d1
    kt = _kron_except([a.T for a in factors])
    z = d2 * xvec + d1 * mvec
    return 0.5 * np.dot(d2 * xvec, d2 * xvec) - 0.5 * np.sum((kt @ z) ** 2)


def _feasible_instance(rng, shape=(4, 3, 3), ranks=(2, 2, 2)):
    factors = random_factors(shape, ranks, rng)
    m = rng.standard_normal(shape)
    observed = rng.random(shape) < 0.5
    mask = ObservationMask.from_bool(observed)
    x = np.where(observed, m, rng.standard_normal(shape))
    return factors, m, mask, x


def check_gradient(instances: int = 5, probes: int = 10, step: float = 1e-5, seed: int = 1) -> Check:
    """Worst relative error of the gradient against central differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        factors, m, mask, x = _feasible_instance(rng)
        g = vectorize(grad_h(x, factors, mask, m))
        obs = vectorize(mask.as_bool)
        free = np.flatnonzero(~obs)
        picks = rng.choice(free, size=min(probes, free.size), replace=False)
        xv, mv = vectorize(x).copy(), vectorize(m)
        fd = np.empty(picks.size)
        for j, i in enumerate(picks):
            xp, xm = xv.copy(), xv.copy()
            xp[i] += step
            xm[i] -= step
            fd[j] = (_h_value(xp, mv, obs, factors) - _h_value(xm, mv, obs, factors)) / (2 * step)
        worst = max(worst, np.linalg.norm(fd - g[picks]) / max(np.linalg.norm(g[picks]), 1e-300))
    return Check("gradient vs central differences", worst, 1e-6)


def check_lipschitz(pairs: int = 200, seed: int = 2) -> Check:
    """Worst ratio ||grad(x) - grad(y)|| / ||x - y|| over random feasible pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        shape = tuple(int(v) for v in rng.integers(2, 6, size=3))
        ranks = tuple(int(rng.integers(1, s + 1)) for s in shape)
        factors, m, mask, x = _feasible_instance(rng, shape, ranks)
        y = np.where(mask.as_bool, m, rng.standard_normal(shape) * rng.uniform(0.1, 10))
        dx = np.linalg.norm(x - y)
        if dx == 0:
            continue
        dg = np.linalg.norm(grad_h(x, factors, mask) - grad_h(y, factors, mask))
        worst = max(worst, dg / dx)
    return Check("gradient Lipschitz ratio", worst, 1.0 + 1e-10)


def check_von_neumann(instances: int = 1000, seed: int = 3) -> list[Check]:
    rng = np.random.default_rng(seed)
    slack, eq_err = np.inf, 0.0
    for _ in range(instances):
        s, t = (int(v) for v in rng.integers(1, 9, size=2))
        x, y = rng.standard_normal((s, t)), rng.standard_normal((s, t))
        bound = float(np.dot(svd(x).s, svd(y).s))
        slack = min(slack, bound - float(np.sum(x * y)))
        k = min(s, t)
        u = orthonormalize(rng.standard_normal((s, k)))
        v = orthonormalize(rng.standard_normal((t, k)))
        a = np.sort(rng.random(k))[::-1]
        b = np.sort(rng.random(k))[::-1]
        xs, ys = (u * a) @ v.T, (u * b) @ v.T
        eq_err = max(eq_err, abs(float(np.sum(xs * ys)) - float(np.dot(a, b))))
    return [Check("von Neumann slack", slack, -1e-10, upper=False),
            Check("von Neumann equality case", eq_err, 1e-10)]


def lemma_alignment_slack(x: np.ndarray, y: np.ndarray, r: int) -> float:
    """``||U^T Y||^2 - ||X^T Y||^2 - alpha ||D^T U^T Y - X^T Y||^2`` for orthonormal ``x``."""
    full_u, s, _ = np.linalg.svd(y, full_matrices=True)
    u = full_u[:, :r]
    sig = s[:r]
    below = s[r] if r < s.size else 0.0
    ratio = 0.0 if sig[-1] == 0.0 and below == 0.0 else (below / sig[-1]) ** 2
    alpha = (1.0 - ratio) / (1.0 + ratio)
    tu, _, tvt = np.linalg.svd(x.T @ u * sig**2)
    d = tvt.T @ tu.T
    uty, xty = u.T @ y, x.T @ y
    return float(np.sum(uty**2) - np.sum(xty**2) - alpha * np.sum((d.T @ uty - xty) ** 2))


def check_alignment(instances: int = 1000, seed: int = 4) -> Check:
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(instances):
        s, t = (int(v) for v in rng.integers(1, 9, size=2))
        r = int(rng.integers(1, min(s, t) + 1))
        x = orthonormalize(rng.standard_normal((s, r)))
        y = rng.standard_normal((s, t))
        worst = min(worst, lemma_alignment_slack(x, y, r))
    return Check("alignment inequality slack", worst, -1e-10, upper=False)


def check_monotone(iterations: int = 50, seed: int = 5) -> Check:
    """Largest relative objective increase over a short iHOOI run."""
    _, m = generate(GeneratorSpec("gaussian", (10, 10, 10), (2, 2, 2), seed))
    mask = sample_uniform(m.shape, 0.5, seed)
    factors = random_factors(m.shape, (2, 2, 2), np.random.default_rng(seed))
    x = mask.project(m)
    prev = objective_g(factors, x)
    worst = -np.inf
    for _ in range(iterations):
        model, x, row = ihooi_iterate(factors, x, mask)
        factors = model.factors
        worst = max(worst, (row.obj - prev) / (1.0 + prev))
        prev = row.obj
    return Check("iHOOI objective increase", worst, 1e-12)


def run_all(quick: bool = True) -> list[Check]:
    scale = 1 if quick else 10
    checks = check_identities(10 * scale)
    checks.append(check_gradient())
    checks.append(check_lipschitz(20 * scale))
    checks.extend(check_von_neumann(100 * scale))
    checks.append(check_alignment(100 * scale))
    checks.append(check_monotone())
    return checks
