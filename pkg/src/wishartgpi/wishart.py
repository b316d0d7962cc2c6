"""Wishart model: sampling, density, Laplace transform, minor moments.

The scale matrix is partitioned into diagonal blocks by a BlockSpec; the
degrees-of-freedom parameter alpha is real with alpha > p - 1. Sampling
uses the Bartlett factorization, which stays valid for non-integer alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import exp, log

import numpy as np

from .errors import DomainError, NotPositiveDefinite
from .linalg import BlockSpec, as_symmetric, block_view, is_positive_definite, sqrt_pd
from .special import log_mvgamma

__all__ = [
    "RngStream",
    "WishartModel",
    "sample",
    "log_density",
    "laplace_transform",
    "log_laplace_transform",
    "minor_moment",
    "log_minor_moment",
    "log_det_moment",
    "random_correlation",
    "sample_sphere",
]

_LOG_2 = log(2.0)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by (seed, stream_id).

    Streams with different ids are statistically independent and cheap to
    construct, which lets estimators be reproduced exactly from the pair
    of integers alone.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ValueError(f"{name} must fit in uint64, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + offset)


@dataclass(frozen=True)
class WishartModel:
    """Wishart distribution on p x p matrices with a block partition.

    Parameters
    ----------
    alpha : float
        Degrees of freedom; must exceed ``p - 1``.
    sigma : array_like
        Positive definite p x p scale matrix.
    spec : BlockSpec, optional
        Diagonal block partition; defaults to a single p x p block.
    """

    alpha: float
    sigma: np.ndarray
    spec: BlockSpec = None  # type: ignore[assignment]

    def __post_init__(self):
        sigma = as_symmetric(self.sigma)
        p = sigma.shape[0]
        if not is_positive_definite(sigma):
            raise NotPositiveDefinite("scale matrix must be positive definite")
        if not self.alpha > p - 1:
            raise DomainError(f"alpha must exceed p - 1 = {p - 1}, got {self.alpha}")
        spec = self.spec if self.spec is not None else BlockSpec((p,))
        if spec.total != p:
            raise ValueError(f"block partition covers {spec.total} rows, matrix has {p}")
        sigma.setflags(write=False)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "spec", spec)

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    @property
    def d(self) -> int:
        return self.spec.d

    @cached_property
    def _chol(self) -> np.ndarray:
        return np.linalg.cholesky(self.sigma)

    @cached_property
    def _sqrt_sigma(self) -> np.ndarray:
        return sqrt_pd(self.sigma)

    @cached_property
    def _logdet_sigma(self) -> float:
        return float(np.linalg.slogdet(self.sigma)[1])

    def sigma_block(self, i: int) -> np.ndarray:
        """Diagonal block Sigma_ii."""
        return block_view(self.sigma, self.spec, i, i)

    def standalone(self, i: int) -> "WishartModel":
        """Model of the i-th diagonal block alone: same alpha, scale Sigma_ii."""
        return WishartModel(self.alpha, self.sigma_block(i))


def _sample_batch(model: WishartModel, gen: np.random.Generator, m: int) -> np.ndarray:
    """m Bartlett draws as an (m, p, p) array.

    The generator is consumed in a fixed order (all subdiagonal normals,
    then chi-square diagonals from the top left down), so a draw depends
    only on the stream, never on surrounding code.
    """
    p = model.p
    B = np.zeros((m, p, p))
    rows, cols = np.tril_indices(p, k=-1)
    if rows.size:
        B[:, rows, cols] = gen.standard_normal((m, rows.size))
    for i in range(p):
        B[:, i, i] = np.sqrt(gen.gamma((model.alpha - i) / 2.0, 2.0, size=m))
    A = model._chol[None, :, :] @ B
    X = A @ A.transpose(0, 2, 1)
    return (X + X.transpose(0, 2, 1)) / 2.0


def sample(model: WishartModel, rng: RngStream, size: int | None = None) -> np.ndarray:
    """Draw from the model; one (p, p) matrix, or (size, p, p) when size given."""
    gen = rng.generator()
    if size is None:
        return _sample_batch(model, gen, 1)[0]
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    return _sample_batch(model, gen, int(size))


def log_density(model: WishartModel, X) -> float:
    """Log density at a positive definite matrix X.

    (alpha - p - 1)/2 * log|X| - tr(Sigma^'-1' X)/2 minus the normalizer
    p*alpha/2*log 2 + alpha/2*log|Sigma| + log Gamma_p(alpha/2). Rejects
    non-PD input instead of returning -inf.
    """
    X = as_symmetric(X)
    p = model.p
    if X.shape[0] != p:
        raise ValueError(f"matrix is {X.shape[0]}x{X.shape[0]}, model is {p}x{p}")
    if not is_positive_definite(X):
        raise DomainError("log_density requires a positive definite argument")
    logdet_x = float(np.linalg.slogdet(X)[1])
    quad = float(np.trace(np.linalg.solve(model.sigma, X)))
    alpha = model.alpha
    return (
        0.5 * (alpha - p - 1) * logdet_x
        - 0.5 * quad
        - 0.5 * p * alpha * _LOG_2
        - 0.5 * alpha * model._logdet_sigma
        - log_mvgamma(p, alpha / 2.0)
    )


def log_laplace_transform(model: WishartModel, T) -> float:
    """log E[etr(-T X)] = -alpha/2 * log|I + 2 T Sigma|.

    Valid iff T + Sigma^-1/2 is positive definite; computed through the
    congruent matrix I + 2 Sigma^{1/2} T Sigma^{1/2} so that the domain
    check and the log-determinant use one symmetric eigenproblem.
    """
    T = as_symmetric(T)
    if T.shape[0] != model.p:
        raise ValueError("argument dimension does not match the model")
    S = model._sqrt_sigma
    W = np.eye(model.p) + 2.0 * S @ T @ S
    lam = np.linalg.eigvalsh((W + W.T) / 2.0)
    if lam[0] <= 0.0:
        raise DomainError("Laplace transform undefined: T + Sigma^-1/2 not positive definite")
    return -0.5 * model.alpha * float(np.sum(np.log(lam)))


def laplace_transform(model: WishartModel, T) -> float:
    """E[etr(-T X)] = |I + 2 T Sigma|^(-alpha/2)."""
    return exp(log_laplace_transform(model, T))


def log_det_moment(alpha: float, p: int, logdet_sigma: float, nu: float) -> float:
    """log E(|X|^nu) for X Wishart(alpha, Sigma) with p = dim, |Sigma| given.

    Equals p*nu*log 2 + nu*log|Sigma| + log Gamma_p(alpha/2 + nu)
    - log Gamma_p(alpha/2); finite iff nu > (p-1)/2 - alpha/2.
    """
    if not nu > (p - 1) / 2.0 - alpha / 2.0:
        raise DomainError(
            f"determinant moment diverges: need nu > {(p - 1) / 2.0 - alpha / 2.0}, got {nu}"
        )
    return (
        p * nu * _LOG_2
        + nu * logdet_sigma
        + log_mvgamma(p, alpha / 2.0 + nu)
        - log_mvgamma(p, alpha / 2.0)
    )


def log_minor_moment(model: WishartModel, i: int, nu: float) -> float:
    """log E(|X_ii|^nu) for the i-th diagonal block of a model draw."""
    sigma_ii = model.sigma_block(i)
    logdet = float(np.linalg.slogdet(sigma_ii)[1])
    return log_det_moment(model.alpha, sigma_ii.shape[0], logdet, nu)


def minor_moment(model: WishartModel, i: int, nu: float) -> float:
    """E(|X_ii|^nu): closed-form moment of a principal minor determinant."""
    return exp(log_minor_moment(model, i, nu))


def random_correlation(p: int, rng: RngStream, jitter: float = 1e-6) -> np.ndarray:
    """Random full-rank correlation matrix (unit diagonal, PD).

    Normalizes a Gram matrix of p Gaussian vectors in dimension p + 2;
    the jitter bounds the spectrum away from zero.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    gen = rng.generator()
    G = gen.standard_normal((p, p + 2))
    C = G @ G.T + jitter * np.eye(p)
    d = 1.0 / np.sqrt(np.diag(C))
    R = d[:, None] * C * d[None, :]
    np.fill_diagonal(R, 1.0)
    return (R + R.T) / 2.0


def sample_sphere(d: int, rng: RngStream, size: int | None = None) -> np.ndarray:
    """Uniform draws on the unit sphere in R^d; (d,) or (size, d)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    gen = rng.generator()
    m = 1 if size is None else int(size)
    Z = gen.standard_normal((m, d))
    U = Z / np.linalg.norm(Z, axis=1, keepdims=True)
    return U[0] if size is None else U
