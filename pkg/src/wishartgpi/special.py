"""Multivariate gamma functions, integer partitions, and zonal polynomials.

Zonal polynomials use the normalization in which the ones of a given
weight k sum to ``(tr X)**k``. Tables of monomial-basis coefficients are
built once per weight with exact rational arithmetic and memoized; the
coefficients do not depend on the number of variables, so the cache is
keyed by weight alone.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial, lgamma, log, pi, prod

import numpy as np

from .errors import CapExceeded, DomainError

__all__ = [
    "log_mvgamma",
    "log_partition_gamma_upper",
    "log_partition_gamma_lower",
    "partitions_of",
    "ZonalTable",
    "zonal_table",
    "zonal_polynomial",
    "zonal_expansion_coefficients",
]

_LOG_PI = log(pi)

ZONAL_WEIGHT_CAP = 12
EXPANSION_P_CAP = 5


def log_mvgamma(p: int, nu: float) -> float:
    """Log of the p-variate gamma function at nu.

    log Gamma_p(nu) = p(p-1)/4 * log(pi) + sum_{j=0}^{p-1} log Gamma(nu - j/2),
    defined for nu > (p-1)/2.
    """
    p = int(p)
    if p < 1:
        raise DomainError(f"dimension must be >= 1, got {p}")
    if not nu > (p - 1) / 2:
        raise DomainError(f"log_mvgamma needs nu > (p-1)/2 = {(p - 1) / 2}, got {nu}")
    return 0.25 * p * (p - 1) * _LOG_PI + sum(lgamma(nu - 0.5 * j) for j in range(p))


def _padded(kappa, m: int) -> list[int]:
    k = [int(x) for x in kappa]
    if any(x < 0 for x in k) or any(k[i] < k[i + 1] for i in range(len(k) - 1)):
        raise DomainError(f"not a partition: {kappa}")
    if len(k) > m:
        if any(x > 0 for x in k[m:]):
            raise DomainError(f"partition {kappa} has more than {m} parts")
        k = k[:m]
    return k + [0] * (m - len(k))


def log_partition_gamma_upper(m: int, a: float, kappa) -> float:
    """Log of the partition-shifted m-variate gamma with parts added.

    log of pi^{m(m-1)/4} * prod_{j=1}^m Gamma(a + k_j - (j-1)/2); every
    gamma argument must be positive.
    """
    k = _padded(kappa, m)
    args = [a + k[j] - 0.5 * j for j in range(m)]
    if min(args) <= 0.0:
        raise DomainError(f"gamma argument not positive: a={a}, kappa={tuple(kappa)}")
    return 0.25 * m * (m - 1) * _LOG_PI + sum(lgamma(x) for x in args)


def log_partition_gamma_lower(m: int, b: float, kappa) -> float:
    """Log of the partition-shifted m-variate gamma with parts subtracted.

    log of pi^{m(m-1)/4} * prod_{j=1}^m Gamma(b - k_j - (m-j)/2); requires
    b > k_1 + (m-1)/2, which makes every gamma argument positive.
    """
    k = _padded(kappa, m)
    args = [b - k[j] - 0.5 * (m - 1 - j) for j in range(m)]
    if min(args) <= 0.0:
        raise DomainError(f"needs b > k_1 + (m-1)/2; got b={b}, kappa={tuple(kappa)}")
    return 0.25 * m * (m - 1) * _LOG_PI + sum(lgamma(x) for x in args)


def partitions_of(k: int, max_parts: int | None = None) -> list[tuple[int, ...]]:
    """All partitions of k into at most max_parts parts, reverse-lexicographic."""
    k = int(k)
    if k < 0:
        raise DomainError(f"weight must be >= 0, got {k}")
    if max_parts is None:
        max_parts = k
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, largest: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(largest, remaining), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(k, k, [])
    return out


def _rho(kappa) -> int:
    # sum_i k_i (k_i - i) with 1-based i; the recurrence denominator.
    return sum(k * (k - i) for i, k in enumerate(kappa, start=1))


def _dominated(mu, kappa) -> bool:
    # mu <= kappa in dominance order (equal weights assumed).
    s_mu = s_ka = 0
    for i in range(max(len(mu), len(kappa))):
        s_mu += mu[i] if i < len(mu) else 0
        s_ka += kappa[i] if i < len(kappa) else 0
        if s_mu > s_ka:
            return False
    return True


def _moves(lam):
    """Single-move targets of lam: add t to part i, remove t from part j > i, re-sort.

    Yields (coefficient l_i - l_j + 2t, resulting partition). Positions with
    equal values count separately.
    """
    ell = len(lam)
    for j in range(1, ell):
        for i in range(j):
            for t in range(1, lam[j] + 1):
                vec = list(lam)
                vec[i] += t
                vec[j] -= t
                mu = tuple(sorted((x for x in vec if x > 0), reverse=True))
                yield lam[i] - lam[j] + 2 * t, mu


@dataclass(frozen=True)
class ZonalTable:
    """Monomial-basis coefficients of all zonal polynomials of one weight.

    ``coeffs[kappa][lam]`` is the (exact rational) coefficient of the
    monomial symmetric function m_lam in C_kappa. ``order`` lists the
    partitions of the weight in reverse-lexicographic order.
    """

    k: int
    order: tuple[tuple[int, ...], ...]
    coeffs: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]]


def _build_table(k: int) -> ZonalTable:
    parts = partitions_of(k)
    monic: dict[tuple, dict[tuple, Fraction]] = {}
    for a, kappa in enumerate(parts):
        row = {kappa: Fraction(1)}
        rho_k = _rho(kappa)
        for lam in parts[a + 1 :]:
            if not _dominated(lam, kappa):
                continue
            acc = Fraction(0)
            for coef, mu in _moves(lam):
                c = row.get(mu)
                if c is not None:
                    acc += coef * c
            if acc:
                row[lam] = acc / (rho_k - _rho(lam))
        monic[kappa] = row
    # Rescale so the weight-k zonal polynomials sum to (tr X)^k: match
    # (sum x_i)^k = sum_lam (k!/prod lam_i!) m_lam by forward substitution
    # down the dominance-compatible order.
    scale: dict[tuple, Fraction] = {}
    for lam in parts:
        t = Fraction(factorial(k), prod(factorial(x) for x in lam))
        for kappa in parts:
            if kappa == lam:
                break
            c = monic[kappa].get(lam)
            if c is not None:
                t -= scale[kappa] * c
        scale[lam] = t
    coeffs = {
        kappa: {lam: scale[kappa] * c for lam, c in row.items()}
        for kappa, row in monic.items()
    }
    return ZonalTable(k=k, order=tuple(parts), coeffs=coeffs)


_TABLE_CACHE: dict[int, ZonalTable] = {}
_TABLE_LOCK = threading.Lock()


def zonal_table(k: int) -> ZonalTable:
    """Memoized zonal coefficient table for weight k (cap ZONAL_WEIGHT_CAP)."""
    k = int(k)
    if k < 0:
        raise DomainError(f"weight must be >= 0, got {k}")
    if k > ZONAL_WEIGHT_CAP:
        raise CapExceeded(f"zonal weight {k} exceeds cap {ZONAL_WEIGHT_CAP}")
    with _TABLE_LOCK:
        table = _TABLE_CACHE.get(k)
        if table is None:
            table = _build_table(k)
            _TABLE_CACHE[k] = table
        return table


def _eval_monomial_symmetric(lam, x: np.ndarray) -> np.ndarray:
    # x has shape (..., p); lam has no zero parts and len(lam) <= p.
    p = x.shape[-1]
    ell = len(lam)
    if ell == 0:
        return np.ones(x.shape[:-1])
    denom = prod(factorial(c) for c in Counter(lam).values())
    total = np.zeros(x.shape[:-1])
    for idx in permutations(range(p), ell):
        term = np.ones(x.shape[:-1])
        for r in range(ell):
            term = term * x[..., idx[r]] ** lam[r]
        total += term
    return total / denom


def zonal_polynomial(kappa, eigenvalues) -> float | np.ndarray:
    """Zonal polynomial C_kappa evaluated at a spectrum (or batch of spectra).

    Parameters
    ----------
    kappa : partition
        Non-increasing tuple of positive ints.
    eigenvalues : array_like
        Spectrum of the matrix argument, shape ``(p,)`` or ``(..., p)``.

    Returns
    -------
    float or ndarray
        C_kappa at each spectrum. Normalized so that the zonal
        polynomials of weight k sum to ``(sum of eigenvalues)**k``.
    """
    kappa = tuple(int(x) for x in kappa if int(x) != 0)
    x = np.asarray(eigenvalues, dtype=float)
    scalar = x.ndim == 1
    p = x.shape[-1]
    if len(kappa) > p:
        raise DomainError(f"partition {kappa} has more parts than variables ({p})")
    table = zonal_table(sum(kappa))
    row = table.coeffs[kappa]
    out = np.zeros(x.shape[:-1])
    for lam, c in row.items():
        if len(lam) <= p:
            out += float(c) * _eval_monomial_symmetric(lam, x)
    return float(out) if scalar else out


_EXPANSION_CACHE: dict[int, dict[tuple[int, ...], float]] = {}
_EXPANSION_LOCK = threading.Lock()


def zonal_expansion_coefficients(p: int, cap: int = EXPANSION_P_CAP) -> dict[tuple[int, ...], float]:
    """Coefficients a_kappa with prod_{i<j}(x_i + x_j) = sum_kappa a_kappa C_kappa(x).

    The product over the p(p-1)/2 unordered pairs of eigenvalues is a
    symmetric polynomial of degree p(p-1)/2, so the sum runs over the
    partitions of that weight with at most p parts. Coefficients are
    recovered by least squares on random spectra and the reconstruction
    residual is required to vanish to 1e-10, which would fail loudly if
    the degree or the basis were wrong.
    """
    p = int(p)
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if p > cap:
        raise CapExceeded(f"p={p} exceeds expansion cap {cap}")
    with _EXPANSION_LOCK:
        cached = _EXPANSION_CACHE.get(p)
        if cached is not None:
            return dict(cached)
    if p == 1:
        coeffs = {(): 1.0}
    else:
        k = p * (p - 1) // 2
        parts = [kappa for kappa in partitions_of(k) if len(kappa) <= p]
        rng = np.random.default_rng(20240901)  # fixed: output must be deterministic
        n = max(50, 2 * len(parts))
        spectra = rng.uniform(0.5, 2.5, size=(n, p))
        iu, ju = np.triu_indices(p, k=1)
        target = np.prod(spectra[:, iu] + spectra[:, ju], axis=1)
        design = np.column_stack([zonal_polynomial(kappa, spectra) for kappa in parts])
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        rel = np.linalg.norm(design @ coef - target) / np.linalg.norm(target)
        if not rel <= 1e-10:
            raise RuntimeError(f"zonal expansion residual {rel:.3e} exceeds 1e-10 at p={p}")
        coeffs = {kappa: float(c) for kappa, c in zip(parts, coef)}
    with _EXPANSION_LOCK:
        _EXPANSION_CACHE[p] = dict(coeffs)
    return coeffs
