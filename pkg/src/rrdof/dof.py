"""Effective degrees of freedom for the shrinkage class of reduced-rank fits.

Closed-form exact unbiased estimators (driven only by the singular values and
the shrinkage weights), singular-value/vector derivative kernels, and three
independent oracles: an analytic divergence assembled entrywise from the
derivative kernels, a central finite-difference divergence, and stochastic
Monte-Carlo / data-perturbation covariance estimators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .estimators import ShrinkageRule, validate_weights
from .exceptions import ContractViolationError, DegeneracyError, DomainError
from .linalg import as_matrix, thin_svd


@dataclass(frozen=True)
class GapPolicy:
    """Handling of near-equal singular values.

    Relative gaps (d_k - d_{k+1}) / d_1 below `rel_gap_tol` either raise
    (mode="error") or set the degenerate flag while still computing
    (mode="flag", the default: the degenerate set has measure zero but
    floating point visits its neighborhood).
    """

    rel_gap_tol: float = 1e-8
    mode: str = "flag"

    def check(self, d: np.ndarray) -> bool:
        d = np.asarray(d, dtype=float)
        if d.size == 0 or d[0] <= 0:
            return False
        gaps = -np.diff(d) / d[0]
        degenerate = bool(gaps.size and np.min(gaps) < self.rel_gap_tol)
        if degenerate and self.mode == "error":
            raise DegeneracyError(
                "near-equal singular values (relative gap below "
                f"{self.rel_gap_tol:g})"
            )
        return degenerate


@dataclass(frozen=True)
class DofEstimate:
    """A degrees-of-freedom value plus its provenance.

    method is one of {naive, exact, analytic_divergence, finite_difference,
    monte_carlo, perturbation}; std_error is populated for the stochastic
    methods.
    """

    value: float
    method: str
    std_error: float | None = None
    degenerate_flag: bool = False


def naive_df(r_x: int, q: int, r: int) -> float:
    """Free-parameter count (r_x + q - r) * r of a rank-r coefficient matrix."""
    if not 0 <= r <= min(r_x, q):
        raise DomainError(f"rank {r} outside [0, {min(r_x, q)}]")
    return float((r_x + q - r) * r)


def _validate_spectrum(d: np.ndarray, r_x: int, q: int) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    r_bar = min(r_x, q)
    if d.size != r_bar:
        raise DomainError(f"expected {r_bar} singular values, got {d.size}")
    if np.any(d <= 0) or np.any(np.diff(d) >= 0):
        raise DomainError("singular values must be strictly decreasing and positive")
    return d


def exact_df_rrr(d, r_x: int, q: int, r: int, gp: GapPolicy = GapPolicy()) -> DofEstimate:
    """Exact unbiased df of the rank-r reduced-rank fit.

    max(r_x, q) * r plus the cross terms (d_k^2 + d_l^2) / (d_k^2 - d_l^2)
    over kept/discarded pairs; exactly r_x * q at full rank.
    """
    d = _validate_spectrum(d, r_x, q)
    r_bar = min(r_x, q)
    if not 1 <= r <= r_bar:
        raise DomainError(f"rank {r} outside [1, {r_bar}]")
    if r == r_bar:
        return DofEstimate(value=float(r_x * q), method="exact")
    degenerate = gp.check(d)
    d2 = d**2
    kept = d2[:r, None]
    dropped = d2[None, r:]
    cross = np.sum((kept + dropped) / (kept - dropped))
    value = max(r_x, q) * r + cross
    return DofEstimate(value=float(value), method="exact", degenerate_flag=degenerate)


def exact_df_shrunk(
    d, r_x: int, q: int, s, s_prime, gp: GapPolicy = GapPolicy()
) -> DofEstimate:
    """Exact unbiased df of a shrinkage-class fit with weights s, derivatives s'.

    Sum of: max(r_x, q) * sum(s_k); the cross terms s_k (d_k^2 + d_l^2) /
    (d_k^2 - d_l^2) over support/non-support pairs (absent when the support
    is full); the within-support terms d_k^2 (s_k - s_l) / (d_k^2 - d_l^2);
    and the derivative terms d_k * s_k'.
    """
    d = _validate_spectrum(d, r_x, q)
    s = np.asarray(s, dtype=float)
    s_prime = np.asarray(s_prime, dtype=float)
    if s.shape != d.shape or s_prime.shape != d.shape:
        raise DomainError("weights and derivatives must match the spectrum length")
    validate_weights(s, s_prime)
    r_bar = min(r_x, q)
    r_tilde = int(np.count_nonzero(s > 0))
    if r_tilde == 0:
        return DofEstimate(value=0.0, method="exact")
    if np.any(s[:r_tilde] <= 0):
        raise ContractViolationError("weight support must be a leading block")
    degenerate = gp.check(d)
    d2 = d**2
    value = max(r_x, q) * float(np.sum(s[:r_tilde]))
    if r_tilde < r_bar:
        kept = d2[:r_tilde, None]
        dropped = d2[None, r_tilde:]
        value += float(np.sum(s[:r_tilde, None] * (kept + dropped) / (kept - dropped)))
    for k in range(r_tilde):
        for l in range(r_tilde):
            if l != k:
                value += d2[k] * (s[k] - s[l]) / (d2[k] - d2[l])
    value += float(np.sum(d[:r_tilde] * s_prime[:r_tilde]))
    return DofEstimate(value=float(value), method="exact", degenerate_flag=degenerate)


def _tall(h: np.ndarray) -> np.ndarray:
    # Formulas are stated for r_x >= q; the divergence and the derivative
    # kernels are presented for H' otherwise.
    return h if h.shape[0] >= h.shape[1] else h.T


def sv_derivatives(
    h, i: int, j: int, gp: GapPolicy = GapPolicy()
) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of all singular values and right singular vectors of `h`
    with respect to its (i, j) entry.

    `h` is put in the tall orientation internally (transpose if rows < cols,
    with (i, j) swapped accordingly). Returns (dd, dv): dd[k] is the
    derivative of d_k; column k of dv is the derivative of the k-th right
    singular vector of the tall orientation.
    """
    h = as_matrix(h)
    if h.shape[0] < h.shape[1]:
        h, (i, j) = h.T, (j, i)
    r_x, q = h.shape
    f = thin_svd(h)
    d, v = f.d, f.right
    if d[-1] <= 0:
        raise DegeneracyError("matrix must have full column rank")
    gp.check(d)
    if not (0 <= i < r_x and 0 <= j < q):
        raise DomainError(f"entry ({i}, {j}) outside a {r_x}x{q} matrix")

    hi = h[i]  # i-th row
    hv = hi @ v  # equals d_k * u_{ik}
    dd = v[j] * hv / d

    # dv_k = -(H'H - d_k^2 I)^- (H'Z + Z'H) v_k with the Moore-Penrose
    # resolvent V (D^2 - d_k^2 I)^+ V'.
    d2 = d**2
    dv = np.empty((q, q))
    for k in range(q):
        zv = hi * v[j, k]
        zv[j] += hv[k]
        coeff = v.T @ zv
        denom = d2 - d2[k]
        inv = np.zeros(q)
        mask = np.arange(q) != k
        inv[mask] = 1.0 / denom[mask]
        dv[:, k] = -(v @ (inv * coeff))
    return dd, dv


def divergence_analytic(
    h, rule: ShrinkageRule, gp: GapPolicy = GapPolicy()
) -> DofEstimate:
    """Divergence of the shrunk matrix, assembled entrywise from the
    derivative kernels; independent of the closed-form estimators."""
    h = _tall(as_matrix(h))
    r_x, q = h.shape
    f = thin_svd(h)
    d, v = f.d, f.right
    if d[-1] <= 0:
        raise DegeneracyError("matrix must have full column rank")
    degenerate = gp.check(d)
    s, s_prime = rule.weights(d)
    validate_weights(s, s_prime)
    m_diag = np.einsum("jk,k,jk->j", v, s, v)  # diagonal of V diag(s) V'
    total = 0.0
    for i in range(r_x):
        for j in range(q):
            dd, dv = sv_derivatives(h, i, j, gp=GapPolicy(gp.rel_gap_tol, "flag"))
            # d h~_ij/dh_ij = [Z M]_ij + [H sum_k s_k (dv_k v_k' + v_k dv_k')]_ij
            #                + [H sum_k s_k' dd_k v_k v_k']_ij
            hi = h[i]
            term1 = m_diag[j]
            hdv = hi @ dv  # (h_i' dv_k) over k
            hv = hi @ v  # (h_i' v_k) over k
            term2 = float(np.sum(s * (hdv * v[j] + hv * dv[j])))
            term3 = float(np.sum(s_prime * dd * hv * v[j]))
            total += term1 + term2 + term3
    return DofEstimate(value=total, method="analytic_divergence", degenerate_flag=degenerate)


def _apply_rule(h: np.ndarray, rule: ShrinkageRule) -> np.ndarray:
    f = thin_svd(h)
    s, _ = rule.weights(f.d)
    return (f.left * (s * f.d)[None, :]) @ f.right.T


def divergence_fd(h, rule: ShrinkageRule, step: float = 1e-6) -> DofEstimate:
    """Central finite-difference estimate of the divergence of the shrunk matrix."""
    if step <= 0:
        raise DomainError("step must be positive")
    h = _tall(as_matrix(h)).copy()
    r_x, q = h.shape
    total = 0.0
    for i in range(r_x):
        for j in range(q):
            orig = h[i, j]
            h[i, j] = orig + step
            plus = _apply_rule(h, rule)[i, j]
            h[i, j] = orig - step
            minus = _apply_rule(h, rule)[i, j]
            h[i, j] = orig
            total += (plus - minus) / (2.0 * step)
    return DofEstimate(value=total, method="finite_difference")


def _substream(seed: int, *path: int) -> np.random.Generator:
    """Reproducible substream keyed by (seed, path); order-independent."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path)))


def _cov_df(fitted: np.ndarray, draws: np.ndarray, scale: float) -> tuple[float, float]:
    """Sum of sample covariances cov(fitted_ij, draws_ij)/scale plus a
    leave-one-out jackknife standard error. Arrays are (reps, n*q)."""
    m = fitted.shape[0]
    a_bar = fitted.mean(axis=0)
    b_bar = draws.mean(axis=0)
    cross = np.einsum("ti,ti->", fitted, draws)
    value = (cross - m * float(a_bar @ b_bar)) / (m - 1) / scale

    # Jackknife: recompute the summed covariance leaving out each replication.
    s_ab = np.einsum("ti,ti->t", fitted, draws)  # per-rep inner products
    tot_ab = cross
    sum_a = fitted.sum(axis=0)
    sum_b = draws.sum(axis=0)
    loo = np.empty(m)
    for t in range(m):
        ab = tot_ab - s_ab[t]
        mean_dot = float((sum_a - fitted[t]) @ (sum_b - draws[t])) / (m - 1)
        loo[t] = (ab - mean_dot) / (m - 2) / scale
    se = float(np.sqrt((m - 1) / m * np.sum((loo - loo.mean()) ** 2)))
    return float(value), se


def mc_df(
    x,
    mean,
    sigma2: float,
    fitter: Callable[[np.ndarray], np.ndarray],
    reps: int,
    seed: int,
) -> DofEstimate:
    """Monte-Carlo estimate of sum_ij cov(mu_hat_ij, y_ij) / sigma2.

    Draws Y = mean + Gaussian noise of variance sigma2, refits each draw, and
    uses unbiased sample covariances across replications.
    """
    if reps < 2:
        raise DomainError("reps must be at least 2")
    if sigma2 <= 0:
        raise DomainError("sigma2 must be positive")
    mean = as_matrix(mean)
    n, q = mean.shape
    fitted = np.empty((reps, n * q))
    draws = np.empty((reps, n * q))
    sd = float(np.sqrt(sigma2))
    for t in range(reps):
        rng = _substream(seed, 0, t)
        y = mean + sd * rng.standard_normal(mean.shape)
        draws[t] = y.ravel()
        fitted[t] = np.asarray(fitter(y), dtype=float).ravel()
    value, se = _cov_df(fitted, draws, sigma2)
    return DofEstimate(value=value, method="monte_carlo", std_error=se)


def perturbation_df(
    x,
    y,
    fitter: Callable[[np.ndarray], np.ndarray],
    n_pert: int,
    tau: float,
    seed: int,
) -> DofEstimate:
    """Data-perturbation estimate sum_ij cov(mu_hat_ij(Y + D), D_ij) / tau^2
    over Gaussian perturbations D with entrywise standard deviation tau."""
    if n_pert < 2:
        raise DomainError("n_pert must be at least 2")
    if tau <= 0:
        raise DomainError("tau must be positive")
    y = as_matrix(y)
    n, q = y.shape
    fitted = np.empty((n_pert, n * q))
    deltas = np.empty((n_pert, n * q))
    for t in range(n_pert):
        rng = _substream(seed, 1, t)
        delta = tau * rng.standard_normal(y.shape)
        deltas[t] = delta.ravel()
        fitted[t] = np.asarray(fitter(y + delta), dtype=float).ravel()
    value, se = _cov_df(fitted, deltas, tau**2)
    return DofEstimate(value=value, method="perturbation", std_error=se)
