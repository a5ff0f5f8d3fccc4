"""Largest singular value of matrix-free operators, plus a dense oracle.

Two iterative routes share one certificate. Power iteration on A^H A and
restarted Golub-Kahan-Lanczos bidiagonalization both end on a concrete unit
vector v; the reported value is ||A v|| (a lower bound on ||A||) and the
residual is ||A^H A v - lambda v|| / lambda with lambda = ||A v||^2.

Inner products use fixed-order blocked sums instead of BLAS so results do
not depend on BLAS threading.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._kernels import as_flat, axpy, cdot, scale, sq_norm

logger = logging.getLogger(__name__)

DENSE_CAP = 2000
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITERS = 20000


class DenseCapExceeded(ValueError):
    pass


@dataclass
class LinearOperatorHandle:
    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_adjoint: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x, out=None):
        return _call(self.apply, x, out)

    def adjoint_call(self, x, out=None):
        return _call(self.apply_adjoint, x, out)

    @classmethod
    def from_dense(cls, M) -> LinearOperatorHandle:
        M = np.asarray(M, dtype=complex)
        if M.shape[0] != M.shape[1]:
            raise ValueError("square matrices only")
        MH = np.ascontiguousarray(M.conj().T)
        return cls(M.shape[0], lambda x, out=None: np.matmul(M, x, out=out), lambda x, out=None: np.matmul(MH, x, out=out))

    @classmethod
    def from_operator(cls, op) -> LinearOperatorHandle:
        """Wrap anything with ``dim``, ``apply`` and ``adjoint()``."""
        adj = op.adjoint()
        return cls(op.dim, op.apply, adj.apply)


@dataclass
class NormEstimate:
    value: float
    residual: float
    iterations: int
    seed: int
    converged: bool
    method: str = "power"
    seed_values: list[float] = field(default_factory=list)
    seed_residuals: list[float] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "value": self.value,
            "residual": self.residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "converged": self.converged,
            "method": self.method,
            "seed_values": self.seed_values,
            "seed_residuals": self.seed_residuals,
        }

    @property
    def seed_spread(self) -> float:
        """Max relative disagreement among per-seed values."""
        if not self.seed_values:
            return 0.0
        hi, lo = max(self.seed_values), min(self.seed_values)
        return (hi - lo) / hi if hi else 0.0


def _call(fn, x, out):
    try:
        return fn(x, out=out)
    except TypeError:
        y = fn(x)
        if out is None:
            return y
        out[:] = y
        return out


def _norm(x: np.ndarray) -> float:
    return math.sqrt(sq_norm(as_flat(x)))


def _dot(x: np.ndarray, y: np.ndarray) -> complex:
    return complex(cdot(as_flat(x), as_flat(y)))


def start_vector(dim: int, seed: int) -> np.ndarray:
    """Unit complex Gaussian vector from PCG64(seed): real parts then imaginary parts."""
    rng = np.random.Generator(np.random.PCG64(seed))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / _norm(v)


def _certify(A: LinearOperatorHandle, v: np.ndarray):
    w = A(v)
    lam = _norm(w) ** 2
    if lam == 0.0:
        return 0.0, 0.0, v
    u = A.adjoint_call(w)
    w = u.copy()
    axpy(-lam, v, w)
    residual = _norm(w) / lam
    return lam, residual, u


def _power_single(A, v, tol, max_iters, history=None):
    lam, residual, it = 0.0, math.inf, 0
    for it in range(1, max_iters + 1):
        lam, residual, u = _certify(A, v)
        if history is not None:
            history.append(math.sqrt(lam))
        if residual <= tol or lam == 0.0:
            break
        v = u / _norm(u)
    return lam, residual, it, v


def _gkl_pass(A, v1, steps, tol=None, coeffs=None, check_every=10):
    """Golub-Kahan-Lanczos sweep from unit v1 (no reorthogonalization).

    With ``tol`` the sweep stops once the top Ritz pair's residual estimate
    |beta_k p_k| / sigma drops below it. With ``coeffs`` it instead replays
    exactly ``len(coeffs)`` steps and returns sum_j coeffs[j] v_j.
    Works in four preallocated buffers.
    """
    alphas, betas = [], []
    v = np.array(v1, dtype=complex)
    u_prev = np.zeros_like(v)
    p = np.empty_like(v)
    r = np.empty_like(v)
    acc = np.zeros_like(v) if coeffs is not None else None
    beta = 0.0
    for j in range(steps):
        if coeffs is not None:
            axpy(complex(coeffs[j]), v, acc)
            if j + 1 == len(coeffs):
                break
        A(v, out=p)
        if j:
            axpy(-beta, u_prev, p)
        alpha = _norm(p)
        if alpha == 0.0:
            break
        scale(p, 1.0 / alpha)
        A.adjoint_call(p, out=r)
        axpy(-alpha, v, r)
        beta = _norm(r)
        alphas.append(alpha)
        betas.append(beta)
        if beta <= 1e-14 * alpha:
            break
        if tol is not None and (j + 1) % check_every == 0:
            _, est = _top_ritz(alphas, betas)
            if est <= tol:
                break
        scale(r, 1.0 / beta)
        u_prev, p = p, u_prev
        v, r = r, v
    return alphas, betas, acc


def _top_ritz(alphas, betas):
    k = len(alphas)
    B = np.diag(alphas)
    if k > 1:
        B += np.diag(betas[: k - 1], 1)
    P, sig, Qh = np.linalg.svd(B)
    est = abs(betas[k - 1] * P[k - 1, 0]) / sig[0] if sig[0] else 0.0
    return Qh[0], est


def _lanczos_single(A, v, tol, max_iters, steps):
    """Restarted two-pass bidiagonalization; ``steps`` caps one sweep."""
    total, lam, residual = 0, 0.0, math.inf
    while total < max_iters:
        budget = max(1, min(steps, (max_iters - total) // 2))
        alphas, betas, _ = _gkl_pass(A, v, budget, tol=0.1 * tol)
        k = len(alphas)
        total += k
        if k == 0:
            break
        q, _ = _top_ritz(alphas, betas)
        _, _, ritz = _gkl_pass(A, v, k, coeffs=q)
        total += k
        v = ritz / _norm(ritz)
        lam, residual, u = _certify(A, v)
        total += 1
        logger.debug("lanczos sweep of %d: value %.15f residual %.3e", k, math.sqrt(lam), residual)
        if residual <= tol or lam == 0.0:
            break
        v = u / _norm(u)
    return lam, residual, total, v


def norm_power(
    A,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    seeds=(0, 1, 2),
    method: str = "power",
    lanczos_steps: int = 2000,
    history: list | None = None,
) -> NormEstimate:
    """Estimate ||A|| from several seeded starts; keep the best converged run.

    ``method`` is ``"power"`` or ``"lanczos"``. ``iterations`` counts
    applications of A^H A. ``history`` (power method only) collects the
    per-iteration estimates of the first seed.
    """
    if not isinstance(A, LinearOperatorHandle):
        A = LinearOperatorHandle.from_operator(A)
    if A.dim < 1:
        raise ValueError("empty operator")
    if tol <= 0:
        raise ValueError("tol must be positive")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    runs = []
    for i, seed in enumerate(seeds):
        v = start_vector(A.dim, seed)
        if method == "power":
            lam, res, its, _ = _power_single(A, v, tol, max_iters, history if i == 0 else None)
        elif method == "lanczos":
            lam, res, its, _ = _lanczos_single(A, v, tol, max_iters, lanczos_steps)
        else:
            raise ValueError(f"unknown method {method!r}")
        runs.append((math.sqrt(lam), res, its, seed, res <= tol or lam == 0.0))
        logger.info("seed %d: value %.15f residual %.3e iterations %d", seed, *runs[-1][:3])
    pool = [r for r in runs if r[4]] or runs
    best = max(pool, key=lambda r: r[0])
    return NormEstimate(
        value=best[0],
        residual=best[1],
        iterations=best[2],
        seed=best[3],
        converged=best[4],
        method=method,
        seed_values=[r[0] for r in runs],
        seed_residuals=[r[1] for r in runs],
    )


def norm_dense(M, cap: int = DENSE_CAP) -> float:
    """Largest singular value by full SVD."""
    M = np.asarray(M)
    if max(M.shape) > cap:
        raise DenseCapExceeded(f"dimension {max(M.shape)} exceeds dense cap {cap}")
    return float(np.linalg.svd(M, compute_uv=False)[0])


@dataclass(frozen=True)
class GapBound:
    m: int
    delta: float
    D: float


def gap_bound(m: int, delta: float) -> GapBound:
    """D = sqrt(m^2 - delta^2 / 2), defined for 0 <= delta <= m sqrt(2)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if delta < 0 or delta * delta > 2 * m * m * (1 + 1e-15):
        raise ValueError(f"delta must lie in [0, m*sqrt(2)], got {delta}")
    return GapBound(m, float(delta), math.sqrt(max(0.0, m * m - delta * delta / 2)))
