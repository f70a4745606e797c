"""Least-squares, rank-constrained, and singular-value-shrinkage estimators.

Every estimator in the family keeps the singular vectors of the least-squares
fit and replaces the singular values d_k by s_k * d_k for weights
s_k in [0, 1] that are nonincreasing in k. The hard rule (rank truncation)
and the soft / adaptive threshold rules are provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolationError, DomainError, ShapeError
from .linalg import GramFactors, HFactor, as_matrix, build_h, gram_factors


@dataclass(frozen=True)
class ShrinkageRule:
    """Weight family s_k(d_k, lambda) with derivative ds_k/dd_k.

    kind: "hard" (rank truncation), "soft" (soft threshold on singular
    values), or "adaptive" (power-weighted threshold).
    """

    kind: str
    rank: int = 0
    lam: float = 0.0
    gamma: float = 2.0

    def weights(self, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Weights and derivatives evaluated at the singular values `d`.

        At the threshold point d_k = lam the derivative is taken from the
        right; the non-differentiable set has measure zero.
        """
        d = np.asarray(d, dtype=float)
        if self.kind == "hard":
            s = np.where(np.arange(d.size) < self.rank, 1.0, 0.0)
            return s, np.zeros_like(d)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "soft":
                s = np.where(d > 0, 1.0 - self.lam / np.where(d > 0, d, 1.0), 0.0)
                active = s > 0
                s = np.where(active, s, 0.0)
                sp = np.where(active, self.lam / np.where(d > 0, d, 1.0) ** 2, 0.0)
                return s, sp
            if self.kind == "adaptive":
                g = self.gamma
                base = np.where(d > 0, d, 1.0)
                s = np.where(d > 0, 1.0 - (self.lam / base) ** (g + 1.0), 0.0)
                active = s > 0
                s = np.where(active, s, 0.0)
                sp = np.where(active, (g + 1.0) * self.lam ** (g + 1.0) * base ** (-g - 2.0), 0.0)
                return s, sp
        raise DomainError(f"unknown shrinkage kind: {self.kind!r}")


def hard(r: int) -> ShrinkageRule:
    """Rank truncation: keep the leading r singular values unchanged."""
    if r < 0:
        raise DomainError("rank must be nonnegative")
    return ShrinkageRule(kind="hard", rank=int(r))


def soft(lam: float) -> ShrinkageRule:
    """Soft threshold: shrunk values (d_k - lam)_+."""
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    return ShrinkageRule(kind="soft", lam=float(lam))


def adaptive(lam: float, gamma: float = 2.0) -> ShrinkageRule:
    """Power-weighted threshold: shrunk values (d_k - lam^(g+1) d_k^-g)_+."""
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    return ShrinkageRule(kind="adaptive", lam=float(lam), gamma=float(gamma))


def validate_weights(s: np.ndarray, s_prime: np.ndarray | None = None) -> None:
    """Raise if weights leave [0, 1] or are not nonincreasing."""
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > 1 + 1e-12):
        raise ContractViolationError("shrinkage weights must lie in [0, 1]")
    if np.any(np.diff(s) > 1e-12):
        raise ContractViolationError("shrinkage weights must be nonincreasing")
    if s_prime is not None and np.asarray(s_prime).shape != s.shape:
        raise ContractViolationError("weights and derivatives differ in length")


@dataclass(frozen=True)
class LsFit:
    """Least-squares fit bundle: data, Gram factors, H and its SVD, fitted values."""

    x: np.ndarray
    y: np.ndarray
    gram: GramFactors
    hf: HFactor
    y_hat: np.ndarray
    r_bar: int

    @property
    def d(self) -> np.ndarray:
        """Singular values of the least-squares fit (equivalently of H)."""
        return self.hf.svd.d


@dataclass(frozen=True)
class FittedModel:
    """A member of the shrinkage class: weights applied to an LsFit."""

    rule: ShrinkageRule
    d_tilde: np.ndarray
    y_fit: np.ndarray
    r_tilde: int
    source: LsFit = field(repr=False)


def fit_ols(x, y) -> LsFit:
    """Least-squares fit Y_hat = X (X'X)^+ X' Y; valid for any p, q vs n."""
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
    gf = gram_factors(x)
    hf = build_h(x, y, gf)
    y_hat = ((x @ gf.q_mat) / gf.s[None, :]) @ hf.h
    return LsFit(x=x, y=y, gram=gf, hf=hf, y_hat=y_hat, r_bar=hf.r_bar)


def fit_shrunk(ls: LsFit, rule: ShrinkageRule) -> FittedModel:
    """Apply a shrinkage rule to the singular values of the least-squares fit."""
    d = ls.d
    s, s_prime = rule.weights(d)
    validate_weights(s, s_prime)
    v = ls.hf.svd.right
    y_fit = (ls.y_hat @ (v * s[None, :])) @ v.T
    r_tilde = int(np.count_nonzero(s > 0))
    return FittedModel(rule=rule, d_tilde=s * d, y_fit=y_fit, r_tilde=r_tilde, source=ls)


def fit_rrr(ls: LsFit, r: int) -> FittedModel:
    """Rank-r reduced-rank fit; identical to fit_shrunk with the hard rule."""
    if not 1 <= r <= ls.r_bar:
        raise DomainError(f"rank {r} outside [1, {ls.r_bar}]")
    return fit_shrunk(ls, hard(r))


def coef_matrix(fm: FittedModel) -> np.ndarray:
    """Coefficient matrix B with X @ B = y_fit, lying in the row space of X."""
    ls = fm.source
    u = ls.hf.svd.left
    v = ls.hf.svd.right
    core = (u * fm.d_tilde[None, :]) @ v.T
    return (ls.gram.q_mat / ls.gram.s[None, :]) @ core
