"""Chunked, reproducible Monte Carlo estimation.

Work is split into fixed-size chunks; chunk c of an estimator anchored at
stream id b draws from the Philox stream (seed, b << 32 | c). Chunk
statistics are folded in chunk order, so the result is bit-identical for
any worker count. A StreamPlan hands out anchor ids so that the
estimators inside one experiment never share a stream.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import DegenerateEvent, DegenerateVariance, InfiniteMoment
from .wishart import RngStream, WishartModel, _sample_batch

__all__ = [
    "CHUNK_DRAWS",
    "MCEstimate",
    "StreamPlan",
    "ExponentVector",
    "Finiteness",
    "finiteness_classify",
    "mc_mean",
    "mc_probability",
    "mc_product_moment",
    "product_estimate",
]

CHUNK_DRAWS = 65536
_BLOCK_SHIFT = 32


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate: sample mean, stderr of the mean, draw count.

    Exact (zero-variance) quantities are represented with stderr 0.
    """

    mean: float
    stderr: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.stderr >= 0.0:
            raise ValueError(f"stderr must be >= 0, got {self.stderr}")

    @classmethod
    def exact(cls, value: float) -> "MCEstimate":
        return cls(float(value), 0.0, 1)


class StreamPlan:
    """Allocates disjoint stream anchors for estimator roles, in call order.

    Anchors are consecutive integers from `base`; an anchor is never
    handed out twice, which is what keeps LHS and RHS estimators of a
    verdict on provably disjoint streams.
    """

    def __init__(self, seed: int, base: int = 0):
        self.seed = int(seed)
        self._base = int(base)
        self._count = 0

    def allocate(self) -> RngStream:
        anchor = self._base + self._count
        if anchor >= 2**_BLOCK_SHIFT:
            raise ValueError("stream anchor space exhausted")
        self._count += 1
        return RngStream(self.seed, anchor)

    @property
    def allocated(self) -> int:
        return self._count


# Stride between anchor namespaces when a bare RngStream is handed to a
# check that needs several internal estimators.
ROLE_STRIDE = 1024


def as_plan(rng: "StreamPlan | RngStream") -> StreamPlan:
    if isinstance(rng, StreamPlan):
        return rng
    return StreamPlan(rng.seed, rng.stream_id * ROLE_STRIDE)


def _chunk_layout(n: int) -> list[tuple[int, int]]:
    n = int(n)
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    layout = [(c, CHUNK_DRAWS) for c in range(n // CHUNK_DRAWS)]
    if n % CHUNK_DRAWS:
        layout.append((len(layout), n % CHUNK_DRAWS))
    return layout


def _chunk_stream(anchor: RngStream, c: int) -> RngStream:
    if not anchor.stream_id < 2**_BLOCK_SHIFT:
        raise ValueError("anchor stream id too large to carry a chunk index")
    return RngStream(anchor.seed, (anchor.stream_id << _BLOCK_SHIFT) | c)


def _map_chunks(fn, layout, workers: int):
    if workers <= 1:
        return [fn(spec) for spec in layout]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, layout))


def mc_mean(draw_values, n: int, rng: RngStream, workers: int = 1) -> MCEstimate:
    """Mean of ``draw_values(generator, m)`` over n draws, chunked and reproducible.

    `draw_values` must return an (m,) array and consume the generator in a
    deterministic order. Raises DegenerateVariance when every draw is
    identical (stderr would be meaningless).
    """
    layout = _chunk_layout(n)

    def one(spec):
        c, m = spec
        gen = _chunk_stream(rng, c).generator()
        v = np.asarray(draw_values(gen, m), dtype=float)
        if v.shape != (m,):
            raise ValueError(f"draw_values returned shape {v.shape}, expected ({m},)")
        if not np.all(np.isfinite(v)):
            raise FloatingPointError("non-finite draw value in Monte Carlo chunk")
        mean = float(v.mean())
        return m, mean, float(np.sum((v - mean) ** 2))

    results = _map_chunks(one, layout, workers)
    # Chan et al. pairwise combine, folded in fixed chunk order.
    n_acc, mean_acc, m2_acc = 0, 0.0, 0.0
    for nb, mb, m2b in results:
        delta = mb - mean_acc
        tot = n_acc + nb
        mean_acc += delta * nb / tot
        m2_acc += m2b + delta * delta * n_acc * nb / tot
        n_acc = tot
    if n_acc >= 2 and m2_acc == 0.0:
        raise DegenerateVariance("all Monte Carlo draws identical")
    stderr = sqrt(m2_acc / (n_acc - 1) / n_acc) if n_acc >= 2 else 0.0
    return MCEstimate(mean_acc, stderr, n_acc)


def mc_probability(draw_indicator, n: int, rng: RngStream, workers: int = 1) -> MCEstimate:
    """Probability of an event, with the exact binomial stderr.

    ``draw_indicator(generator, m)`` returns an (m,) boolean array. Raises
    DegenerateEvent when the estimate is exactly 0 or 1.
    """
    layout = _chunk_layout(n)

    def one(spec):
        c, m = spec
        gen = _chunk_stream(rng, c).generator()
        hits = np.asarray(draw_indicator(gen, m), dtype=bool)
        if hits.shape != (m,):
            raise ValueError(f"draw_indicator returned shape {hits.shape}, expected ({m},)")
        return int(hits.sum())

    total = sum(_map_chunks(one, layout, workers))
    n_tot = sum(m for _, m in layout)
    p = total / n_tot
    if p in (0.0, 1.0):
        raise DegenerateEvent(f"event probability estimated at {p:.0f}; thresholds degenerate")
    return MCEstimate(p, sqrt(p * (1.0 - p) / n_tot), n_tot)


@dataclass(frozen=True)
class ExponentVector:
    """Magnitudes and signs of the per-block determinant exponents.

    The moment under study is E prod_i |X_ii|^(signs[i] * values[i]) with
    values[i] >= 0 and signs[i] in {-1, +1}.
    """

    values: tuple[float, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        signs = tuple(int(s) for s in self.signs)
        if len(values) != len(signs):
            raise ValueError("values and signs must have equal length")
        if any(v < 0 for v in values):
            raise ValueError(f"exponent magnitudes must be >= 0, got {values}")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError(f"signs must be -1 or +1, got {signs}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_signed(cls, signed) -> "ExponentVector":
        signed = [float(x) for x in signed]
        return cls(
            tuple(abs(x) for x in signed),
            tuple(-1 if x < 0 else 1 for x in signed),
        )

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def signed(self) -> tuple[float, ...]:
        return tuple(s * v for v, s in zip(self.values, self.signs))


class Finiteness(enum.Enum):
    INFINITE = "Infinite"
    FINITE_GUARANTEED = "FiniteGuaranteed"
    UNKNOWN = "Unknown"


def finiteness_classify(alpha: float, block_sizes, exps: ExponentVector) -> Finiteness:
    """Classify E prod |X_ii|^(+-nu_i) as Infinite / FiniteGuaranteed / Unknown.

    Nonnegative powers are always finite. A negative power nu on a block
    of size p is infinite once nu >= alpha/2 - (p-1)/2; the product is
    guaranteed finite when every negative power sits strictly inside
    ((p-1)/2, alpha/2 - (p-1)/2); in between the classification is Unknown.
    Zero exponents are constant factors and are skipped.
    """
    block_sizes = tuple(int(p) for p in block_sizes)
    if len(block_sizes) != exps.d:
        raise ValueError("block_sizes and exponents must have equal length")
    guaranteed = True
    for p, v, s in zip(block_sizes, exps.values, exps.signs):
        if s > 0 or v == 0.0:
            continue
        hi = alpha / 2.0 - (p - 1) / 2.0
        if v >= hi:
            return Finiteness.INFINITE
        if not v > (p - 1) / 2.0:
            guaranteed = False
    return Finiteness.FINITE_GUARANTEED if guaranteed else Finiteness.UNKNOWN


def mc_product_moment(
    model: WishartModel,
    exps: ExponentVector,
    n: int,
    rng: RngStream,
    subset=None,
    workers: int = 1,
    override_finiteness: bool = False,
) -> MCEstimate:
    """Monte Carlo estimate of E prod_{i in subset} |X_ii|^(signs[i]*values[i]).

    Parameters
    ----------
    model : WishartModel
        Source distribution with its block partition.
    exps : ExponentVector
        One (magnitude, sign) pair per block of the model.
    n : int
        Number of draws.
    rng : RngStream
        Anchor stream; the estimator consumes the chunk family under it.
    subset : sequence of int, optional
        Block indices entering the product (default: all blocks).
    workers : int
        Thread count; never affects the result.
    override_finiteness : bool
        Allow estimation when finiteness is merely Unknown. Without it,
        anything short of FiniteGuaranteed raises InfiniteMoment.

    Notes
    -----
    Per-draw products are accumulated in log space and exponentiated once
    per draw; an all-zero exponent product short-circuits to the exact
    constant 1.
    """
    if exps.d != model.d:
        raise ValueError(f"exponents cover {exps.d} blocks, model has {model.d}")
    subset = tuple(range(model.d)) if subset is None else tuple(int(i) for i in subset)
    if len(set(subset)) != len(subset):
        raise ValueError(f"subset has repeated blocks: {subset}")
    slices = [model.spec.range(i) for i in subset]
    signed = [exps.signed[i] for i in subset]
    if all(x == 0.0 for x in signed):
        return MCEstimate(1.0, 0.0, int(n))
    sub_exps = ExponentVector(
        tuple(exps.values[i] for i in subset), tuple(exps.signs[i] for i in subset)
    )
    sub_sizes = tuple(model.spec.sizes[i] for i in subset)
    cls = finiteness_classify(model.alpha, sub_sizes, sub_exps)
    if cls is Finiteness.INFINITE:
        raise InfiniteMoment("requested product moment is provably infinite")
    if cls is Finiteness.UNKNOWN and not override_finiteness:
        raise InfiniteMoment(
            "product moment not guaranteed finite; pass override_finiteness=True to force"
        )

    def draw_values(gen, m):
        X = _sample_batch(model, gen, m)
        acc = np.zeros(m)
        for sl, nu in zip(slices, signed):
            if nu == 0.0:
                continue
            acc += nu * np.linalg.slogdet(X[:, sl, sl])[1]
        return np.exp(acc)

    return mc_mean(draw_values, n, rng, workers)


def product_estimate(a: MCEstimate, b: MCEstimate) -> MCEstimate:
    """Product of two independent estimates with first-order error propagation."""
    mean = a.mean * b.mean
    stderr = sqrt((a.mean * b.stderr) ** 2 + (b.mean * a.stderr) ** 2)
    return MCEstimate(mean, stderr, min(a.n, b.n))
