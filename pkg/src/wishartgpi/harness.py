"""Config-driven experiment runner with machine-readable reports.

A single JSON config describes one inequality sweep: the model shape,
where the scale matrices come from, the exponents or thresholds, sample
counts and seeding. ``run`` executes one verdict per (scale-matrix
instance x split) and writes a fixed-column CSV plus a JSON report that
embeds every random matrix, making each row standalone-reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field
from math import inf

import numpy as np

from .bounds import integral_window
from .errors import ConfigError
from .linalg import BlockSpec, as_symmetric, direct_sum, is_positive_definite
from .montecarlo import (
    ExponentVector,
    Finiteness,
    ROLE_STRIDE,
    StreamPlan,
    finiteness_classify,
)
from .checks import (
    BernsteinSpec,
    InequalityVerdict,
    RadialSpec,
    STATEMENTS,
    bernstein_pair_check,
    eigen_gpi_check,
    elliptical_gpi_check,
    gpi_sandwich,
    lt_order_gap,
    opposite_gpi_lower,
    opposite_gpi_upper,
    product_moment_conjecture_check,
    proved_status,
    split_model,
    tail_probability_conjecture_check,
    verdict_from,
)
from .wishart import RngStream, WishartModel, laplace_transform, random_correlation

__all__ = [
    "SCHEMA_VERSION",
    "OUTPUT_DIR_ENV",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "ReportRow",
    "run",
    "write_reports",
    "verify_suite",
]

SCHEMA_VERSION = 1

# Default directory for report files when a config gives a relative
# output path; all other behavior comes from the config itself.
OUTPUT_DIR_ENV = "WISHARTGPI_OUTPUT_DIR"

INEQUALITY_IDS = (
    "sandwich",
    "conj11",
    "conj36",
    "opp_lower",
    "opp_upper",
    "bernstein",
    "eigen",
    "elliptical",
    "lt_order",
)

# Reserved stream namespace for drawing random scale matrices; row
# plans sit at row_index * ROLE_STRIDE, far below this.
_SIGMA_STREAM_BASE = 1 << 40

CSV_COLUMNS = (
    "experiment_id",
    "inequality_id",
    "statement",
    "d",
    "alpha",
    "block_sizes",
    "sigma_digest",
    "exponents",
    "lhs",
    "lhs_se",
    "rhs",
    "rhs_se",
    "z",
    "verdict",
    "n",
    "seed",
    "status",
)


def _fmt(x: float) -> str:
    # 17 significant digits reproduce any float64 bit pattern.
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class ExperimentConfig:
    """One inequality sweep, parsed from (and serializable to) JSON."""

    inequality_id: str
    d: int
    block_sizes: tuple[int, ...]
    alpha: float
    sigma_source: dict
    n_samples: int
    seed: int
    z_threshold: float = 3.0
    split: object = "all"
    exponents: dict | None = None
    thresholds: tuple[float, ...] | None = None
    bernstein: dict | None = None
    elliptical: dict | None = None
    t_blocks: list | None = None
    bound: str = "lower"
    workers: int | None = None
    output_path: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        out = asdict(self)
        out["block_sizes"] = list(self.block_sizes)
        if self.thresholds is not None:
            out["thresholds"] = list(self.thresholds)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        return parse_config(raw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON: {err}") from None
        return parse_config(raw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _need(raw: dict, key: str, kind, what: str):
    if key not in raw:
        raise ConfigError(f"missing field {key!r} ({what})")
    val = raw[key]
    if kind is float:
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"field {key!r} must be a number, got {val!r}")
        return float(val)
    if kind is int:
        if not isinstance(val, int) or isinstance(val, bool):
            raise ConfigError(f"field {key!r} must be an integer, got {val!r}")
        return val
    if not isinstance(val, kind):
        raise ConfigError(f"field {key!r} must be {kind.__name__}, got {type(val).__name__}")
    return val


def _parse_exponents(raw, d: int) -> ExponentVector:
    if not isinstance(raw, dict) or "values" not in raw or "signs" not in raw:
        raise ConfigError("exponents must be an object with 'values' and 'signs' lists")
    try:
        exps = ExponentVector(tuple(raw["values"]), tuple(raw["signs"]))
    except (ValueError, TypeError) as err:
        raise ConfigError(f"bad exponents: {err}") from None
    if exps.d != d:
        raise ConfigError(f"exponents carry {exps.d} entries, config d={d}")
    return exps


def _parse_bernstein_spec(raw, p: int, which: str) -> BernsteinSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"bernstein.{which} must be an object")
    A = np.array(raw.get("trace_offset", np.zeros((p, p))), dtype=float)
    atoms = tuple(
        (float(c), np.array(S, dtype=float)) for c, S in raw.get("atoms", [])
    )
    try:
        spec = BernsteinSpec(A, atoms)
    except ValueError as err:
        raise ConfigError(f"bernstein.{which}: {err}") from None
    if spec.dim != p:
        raise ConfigError(f"bernstein.{which} has dimension {spec.dim}, block needs {p}")
    return spec


def parse_config(raw: dict, override_finiteness: bool = False) -> ExperimentConfig:
    """Validate a raw JSON object into an ExperimentConfig.

    All windows and shape constraints that do not depend on a concrete
    random scale matrix are checked here, before any sampling. The
    finiteness refusal can be lifted either by the keyword or by an
    "override_finiteness": true field in the document.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}; this build reads {SCHEMA_VERSION}")
    ineq = _need(raw, "inequality_id", str, "which inequality to check")
    if ineq not in INEQUALITY_IDS:
        raise ConfigError(f"unknown inequality_id {ineq!r}; valid: {', '.join(INEQUALITY_IDS)}")
    d = _need(raw, "d", int, "number of diagonal blocks")
    sizes = _need(raw, "block_sizes", list, "block sizes")
    try:
        spec = BlockSpec(tuple(sizes))
    except (ValueError, TypeError) as err:
        raise ConfigError(f"bad block_sizes: {err}") from None
    if spec.d != d:
        raise ConfigError(f"block_sizes has {spec.d} blocks, config d={d}")
    alpha = _need(raw, "alpha", float, "degrees of freedom")
    if not alpha > spec.total - 1:
        raise ConfigError(f"alpha must exceed p-1 = {spec.total - 1}, got {alpha}")
    n_samples = _need(raw, "n_samples", int, "Monte Carlo draws per estimate")
    if n_samples < 2:
        raise ConfigError(f"n_samples must be >= 2, got {n_samples}")
    seed = _need(raw, "seed", int, "stream seed")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    z_threshold = float(raw.get("z_threshold", 3.0))
    if z_threshold <= 0:
        raise ConfigError("z_threshold must be positive")

    source = _need(raw, "sigma_source", dict, "where scale matrices come from")
    kind = source.get("kind")
    if kind == "explicit":
        mat = np.array(source.get("matrix"), dtype=float)
        if mat.shape != (spec.total, spec.total):
            raise ConfigError(
                f"sigma_source.matrix must be {spec.total}x{spec.total}, got {mat.shape}"
            )
        try:
            sym = as_symmetric(mat)
        except ValueError as err:
            raise ConfigError(f"sigma_source.matrix: {err}") from None
        if not is_positive_definite(sym):
            raise ConfigError("sigma_source.matrix is not positive definite")
    elif kind == "random":
        count = source.get("count")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ConfigError("sigma_source.random needs a positive integer 'count'")
        jitter = source.get("jitter", 1e-6)
        if not isinstance(jitter, (int, float)) or jitter < 0:
            raise ConfigError("sigma_source.jitter must be a nonnegative number")
    else:
        raise ConfigError("sigma_source.kind must be 'explicit' or 'random'")

    split = raw.get("split", "all")
    if split != "all":
        if not isinstance(split, int) or isinstance(split, bool):
            raise ConfigError("split must be an integer or 'all'")
        top = spec.total if ineq == "eigen" else d
        if not 2 <= split <= top:
            raise ConfigError(f"split must lie in 2..{top}, got {split}")

    exponents = None
    thresholds = None
    bern = None
    ellip = None
    t_blocks = None
    bound = raw.get("bound", "lower")

    if ineq in ("sandwich", "conj11", "opp_lower", "opp_upper"):
        exponents = _parse_exponents(raw.get("exponents"), d)
        if ineq == "sandwich":
            if any(s != -1 for s in exponents.signs):
                raise ConfigError("sandwich exponents must all carry sign -1")
            if bound not in ("lower", "upper", "both"):
                raise ConfigError("bound must be 'lower', 'upper', or 'both'")
            if d < 2:
                raise ConfigError("sandwich needs d >= 2")
        if ineq == "conj11" and any(s != 1 for s in exponents.signs):
            raise ConfigError("conj11 exponents must all carry sign +1")
        if ineq == "opp_lower":
            want = (-1,) + (1,) * (d - 1)
            if d < 2 or exponents.signs != want or any(v <= 0 for v in exponents.values):
                raise ConfigError("opp_lower needs positive magnitudes with signs (-1, +1, ..., +1)")
        if ineq == "opp_upper":
            want = (-1,) * (d - 1) + (1,)
            if d < 2 or exponents.signs != want or any(v <= 0 for v in exponents.values):
                raise ConfigError("opp_upper needs positive magnitudes with signs (-1, ..., -1, +1)")
        # Fail fast on finiteness/moment windows before any sampling.
        if ineq in ("sandwich", "opp_lower", "opp_upper"):
            verdict = finiteness_classify(alpha, spec.sizes, exponents)
            if verdict is Finiteness.INFINITE:
                raise ConfigError(
                    "exponents sit at or beyond the divergence boundary; the moment is infinite"
                )
            allow = override_finiteness or bool(raw.get("override_finiteness"))
            if verdict is not Finiteness.FINITE_GUARANTEED and not allow:
                raise ConfigError(
                    "exponents leave the guaranteed-finite window; pass override_finiteness"
                )
        if ineq == "sandwich" and bound in ("upper", "both"):
            for i, p_i in enumerate(spec.sizes):
                lo, hi, _rule = integral_window(p_i, alpha)
                if not lo < exponents.values[i] < hi:
                    raise ConfigError(
                        f"upper bound needs nu_{i + 1} strictly inside ({lo}, {hi}) "
                        f"for block size {p_i}, got {exponents.values[i]}"
                    )
    elif ineq == "eigen":
        exponents = _parse_exponents(raw.get("exponents"), spec.total)
        if any(s != 1 for s in exponents.signs):
            raise ConfigError("eigen exponents must all carry sign +1")
    elif ineq == "conj36":
        t_raw = raw.get("thresholds")
        if t_raw is not None:
            if not isinstance(t_raw, list) or len(t_raw) != d:
                raise ConfigError(f"thresholds must be a list of {d} positive numbers or null")
            thresholds = tuple(float(t) for t in t_raw)
            if any(t <= 0 for t in thresholds):
                raise ConfigError("thresholds must be positive")
    elif ineq == "bernstein":
        if d != 2:
            raise ConfigError("bernstein needs exactly two blocks")
        braw = _need(raw, "bernstein", dict, "functional pair")
        bern = {
            "f": _parse_bernstein_spec(braw.get("f"), spec.sizes[0], "f"),
            "g": _parse_bernstein_spec(braw.get("g"), spec.sizes[1], "g"),
        }
    elif ineq == "elliptical":
        eraw = _need(raw, "elliptical", dict, "sphere exponents and radial law")
        alphas = eraw.get("alphas")
        if not isinstance(alphas, list) or len(alphas) != spec.total:
            raise ConfigError(f"elliptical.alphas must list {spec.total} exponents")
        if any((not isinstance(a, (int, float))) or a < 0 for a in alphas):
            raise ConfigError("elliptical.alphas must be nonnegative numbers")
        rraw = eraw.get("radial", {"kind": "chisq"})
        try:
            radial = RadialSpec(**rraw)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"elliptical.radial: {err}") from None
        ellip = {"alphas": tuple(float(a) for a in alphas), "radial": radial}
    elif ineq == "lt_order":
        traw = _need(raw, "t_blocks", list, "transform argument blocks")
        if len(traw) != d:
            raise ConfigError(f"t_blocks must hold {d} matrices")
        t_blocks = []
        for i, entry in enumerate(traw):
            t = np.atleast_2d(np.array(entry, dtype=float))
            if t.shape != (spec.sizes[i], spec.sizes[i]):
                raise ConfigError(
                    f"t_blocks[{i}] must be {spec.sizes[i]}x{spec.sizes[i]}, got {t.shape}"
                )
            lam_min = float(np.linalg.eigvalsh(as_symmetric(t))[0])
            if lam_min < -1e-10 * max(1.0, float(np.abs(t).max())):
                raise ConfigError(f"t_blocks[{i}] is not nonnegative definite")
            t_blocks.append(t.tolist())

    workers = raw.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ConfigError("workers must be a positive integer or null")
    output_path = raw.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError("output_path must be a string or null")

    return ExperimentConfig(
        inequality_id=ineq,
        d=d,
        block_sizes=spec.sizes,
        alpha=alpha,
        sigma_source=dict(source),
        n_samples=n_samples,
        seed=seed,
        z_threshold=z_threshold,
        split=split,
        exponents=None if exponents is None else {"values": list(exponents.values), "signs": list(exponents.signs)},
        thresholds=thresholds,
        bernstein=None if bern is None else dict(raw["bernstein"]),
        elliptical=None if ellip is None else dict(raw["elliptical"]),
        t_blocks=t_blocks,
        bound=bound,
        workers=workers,
        output_path=output_path,
        schema_version=SCHEMA_VERSION,
    )


@dataclass(frozen=True)
class ReportRow:
    """One verdict, flattened for the CSV sheet plus JSON extras."""

    experiment_id: str
    inequality_id: str
    statement: str
    d: int
    alpha: float
    block_sizes: tuple[int, ...]
    sigma_digest: str
    exponents: str
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    z: float
    verdict: str
    n: int
    seed: int
    status: str
    wall_time_ms: float = 0.0
    sigma: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def csv_values(self) -> list[str]:
        return [
            self.experiment_id,
            self.inequality_id,
            self.statement,
            str(self.d),
            _fmt(self.alpha),
            "|".join(str(s) for s in self.block_sizes),
            self.sigma_digest,
            self.exponents,
            _fmt(self.lhs),
            _fmt(self.lhs_se),
            _fmt(self.rhs),
            _fmt(self.rhs_se),
            _fmt(self.z),
            self.verdict,
            str(self.n),
            str(self.seed),
            self.status,
        ]

    def to_json_dict(self) -> dict:
        out = {k: getattr(self, k) for k in CSV_COLUMNS}
        out["block_sizes"] = list(self.block_sizes)
        if out["z"] in (inf, -inf):  # keep the document strict-JSON parseable
            out["z"] = repr(out["z"])
        out["wall_time_ms"] = self.wall_time_ms
        out["sigma"] = self.sigma
        out["detail"] = self.detail
        return out


def sigma_digest(sigma: np.ndarray) -> str:
    """Stable 12-hex-digit digest of the row-major float64 bytes."""
    buf = np.ascontiguousarray(sigma, dtype=float).tobytes()
    return hashlib.sha256(buf).hexdigest()[:12]


def _sigma_instances(config: ExperimentConfig, spec: BlockSpec):
    source = config.sigma_source
    if source["kind"] == "explicit":
        yield 0, as_symmetric(np.array(source["matrix"], dtype=float))
        return
    jitter = float(source.get("jitter", 1e-6))
    for i in range(int(source["count"])):
        yield i, random_correlation(
            spec.total, RngStream(config.seed, _SIGMA_STREAM_BASE + i), jitter=jitter
        )


def _splits(config: ExperimentConfig, spec: BlockSpec):
    if config.inequality_id in ("bernstein", "elliptical"):
        return [None]
    top = spec.total if config.inequality_id == "eigen" else config.d
    if config.split == "all":
        return list(range(2, top + 1))
    return [int(config.split)]


def _row_plan(config: ExperimentConfig, row_index: int) -> StreamPlan:
    return StreamPlan(config.seed, base=row_index * ROLE_STRIDE)


def _detail_scrub(obj):
    if isinstance(obj, dict):
        return {k: _detail_scrub(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_detail_scrub(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (obj == inf or obj == -inf):
        return repr(obj)
    return obj


def run(
    config: ExperimentConfig,
    workers: int | None = None,
    override_finiteness: bool = False,
) -> list[ReportRow]:
    """Execute one sweep: one row per (scale instance x split).

    The sandwich emits one row per configured bound side ('both' gives
    two). Row r draws from streams (seed, r*ROLE_STRIDE + j), so outputs
    are a function of (config, seed) only, independent of worker count.
    """
    spec = BlockSpec(config.block_sizes)
    eff_workers = workers if workers is not None else config.workers
    if eff_workers is None:
        eff_workers = os.cpu_count() or 1
    exps = None
    if config.exponents is not None:
        exps = ExponentVector(tuple(config.exponents["values"]), tuple(config.exponents["signs"]))

    rows: list[ReportRow] = []
    row_index = 0
    for sigma_idx, sigma in _sigma_instances(config, spec):
        digest = sigma_digest(sigma)
        sigma_list = sigma.tolist()
        for split in _splits(config, spec):
            plan = _row_plan(config, row_index)
            row_index += 1
            started = time.perf_counter()
            verdicts = _dispatch(
                config, spec, sigma, exps, split, plan, eff_workers, override_finiteness
            )
            elapsed_ms = (time.perf_counter() - started) * 1e3
            for suffix, verdict in verdicts:
                tag = f"{config.inequality_id}-s{sigma_idx:02d}"
                if split is not None:
                    tag += f"-k{split}"
                if suffix:
                    tag += f"-{suffix}"
                if verdict.statement != STATEMENTS[config.inequality_id]:
                    raise RuntimeError(
                        f"statement mismatch for {config.inequality_id}: {verdict.statement!r}"
                    )
                rows.append(
                    ReportRow(
                        experiment_id=tag,
                        inequality_id=config.inequality_id,
                        statement=verdict.statement,
                        d=config.d,
                        alpha=config.alpha,
                        block_sizes=config.block_sizes,
                        sigma_digest=digest,
                        exponents=_exponent_column(config, exps),
                        lhs=verdict.lhs,
                        lhs_se=verdict.lhs_se,
                        rhs=verdict.rhs,
                        rhs_se=verdict.rhs_se,
                        z=verdict.z,
                        verdict=verdict.verdict,
                        n=verdict.n,
                        seed=config.seed,
                        status=verdict.status,
                        wall_time_ms=elapsed_ms,
                        sigma=sigma_list,
                        detail=_detail_scrub(verdict.detail),
                    )
                )
    return rows


def _exponent_column(config: ExperimentConfig, exps: ExponentVector | None) -> str:
    if exps is not None:
        return "|".join(_fmt(v) for v in exps.signed)
    if config.inequality_id == "elliptical":
        return "|".join(_fmt(a) for a in config.elliptical["alphas"])
    return ""


def _dispatch(
    config: ExperimentConfig,
    spec: BlockSpec,
    sigma: np.ndarray,
    exps: ExponentVector | None,
    split,
    plan: StreamPlan,
    workers: int,
    override_finiteness: bool,
) -> list[tuple[str, InequalityVerdict]]:
    ineq = config.inequality_id
    n = config.n_samples
    zt = config.z_threshold
    if ineq in ("sandwich", "conj11", "conj36", "opp_lower", "opp_upper", "eigen", "lt_order"):
        model = WishartModel(config.alpha, sigma, spec)
    if ineq == "sandwich":
        sides = ("lower", "upper") if config.bound == "both" else (config.bound,)
        out = gpi_sandwich(model, exps, split, n, plan, workers=workers, z_threshold=zt, bounds=sides)
        return [(side, out[side]) for side in sides]
    if ineq == "conj11":
        v = product_moment_conjecture_check(model, exps, split, n, plan, workers=workers, z_threshold=zt)
        return [("", v)]
    if ineq == "conj36":
        v = tail_probability_conjecture_check(
            model, config.thresholds, split, n, plan, workers=workers, z_threshold=zt
        )
        return [("", v)]
    if ineq == "opp_lower":
        v = opposite_gpi_lower(
            model, exps.values, n, plan, workers=workers, z_threshold=zt,
            override_finiteness=override_finiteness,
        )
        return [("", v)]
    if ineq == "opp_upper":
        v = opposite_gpi_upper(
            model, exps.values, n, plan, workers=workers, z_threshold=zt,
            override_finiteness=override_finiteness,
        )
        return [("", v)]
    if ineq == "eigen":
        v = eigen_gpi_check(model, exps.values, split, n, plan, workers=workers, z_threshold=zt)
        return [("", v)]
    if ineq == "lt_order":
        t_blocks = [np.array(t, dtype=float) for t in config.t_blocks]
        gap = lt_order_gap(model, split, t_blocks)
        T = direct_sum(*t_blocks)
        lhs = laplace_transform(model, T)
        v = verdict_from(
            lhs, lhs - gap, ">=", zt,
            statement=STATEMENTS["lt_order"], status="proved",
            detail={"gap": gap, "split": split},
        )
        return [("", v)]
    if ineq == "bernstein":
        model = WishartModel(config.alpha, sigma, spec)
        braw = config.bernstein
        f = _parse_bernstein_spec(braw["f"], spec.sizes[0], "f")
        g = _parse_bernstein_spec(braw["g"], spec.sizes[1], "g")
        v = bernstein_pair_check(model, f, g, n, plan, workers=workers, z_threshold=zt)
        return [("", v)]
    if ineq == "elliptical":
        A = np.linalg.cholesky(sigma)
        alphas = tuple(float(a) for a in config.elliptical["alphas"])
        radial = RadialSpec(**config.elliptical.get("radial", {"kind": "chisq"}))
        v = elliptical_gpi_check(A, alphas, radial, n, plan, workers=workers, z_threshold=zt)
        return [("", v)]
    raise ConfigError(f"unknown inequality_id {ineq!r}")


def render_csv(rows: list[ReportRow]) -> str:
    """Fixed-column CSV, UTF-8, LF endings, header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def report_paths(config: ExperimentConfig) -> tuple[str, str]:
    base = config.output_path or f"{config.inequality_id}-{config.seed}"
    for suffix in (".csv", ".json"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    if not os.path.isabs(base):
        base = os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), base)
    return base + ".csv", base + ".json"


def write_reports(config: ExperimentConfig, rows: list[ReportRow]) -> tuple[str, str]:
    """Write the CSV sheet and the self-contained JSON report."""
    csv_path, json_path = report_paths(config)
    os.makedirs(os.path.dirname(csv_path) or ".", exist_ok=True)
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows))
    document = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "rows": [r.to_json_dict() for r in rows],
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, default=_json_default)
        fh.write("\n")
    return csv_path, json_path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (obj == inf or obj == -inf):
        return repr(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def exit_code_for(rows: list[ReportRow]) -> int:
    """0 normally, 2 when a proved inequality came back Violated."""
    bad = any(r.verdict == "Violated" and r.status == "proved" for r in rows)
    return 2 if bad else 0


# --- verification suites ----------------------------------------------------


def _suite_oracles(log) -> list[tuple[str, bool, str]]:
    from math import exp, log as ln
    from .bounds import (
        bound_integral_beta_1d,
        integral_quadrature_1d,
        lyapunov_operator_determinant,
        matrix_square_jacobian,
        minor_bound_integral,
    )
    from .special import partitions_of, zonal_polynomial

    results = []
    gen = RngStream(20240915).generator()

    worst = 0.0
    for _ in range(50):
        alpha = float(gen.uniform(2.5, 14.0))
        nu = float(gen.uniform(0.05, 0.45)) * alpha  # inside (0, alpha/2)
        m = float(gen.uniform(0.3, 3.0))
        closed = bound_integral_beta_1d(m, alpha, nu)
        series = minor_bound_integral(np.array([[m]]), alpha, nu)
        quad = integral_quadrature_1d(m, alpha, nu)
        worst = max(
            worst,
            abs(series - closed) / closed,
            abs(quad - closed) / closed,
        )
    ok = worst < 1e-6
    results.append(("scalar bound integral: series == Beta == quadrature", ok, f"worst rel {worst:.2e}"))

    worst = 0.0
    for p in (1, 2, 3, 4):
        for _ in range(100):
            G = gen.standard_normal((p, p + 2))
            X = G @ G.T + 0.1 * np.eye(p)
            a = matrix_square_jacobian(X)
            b = lyapunov_operator_determinant(X)
            worst = max(worst, abs(a - b) / abs(b))
    ok = worst < 1e-8
    results.append(("matrix-square Jacobian == Lyapunov determinant", ok, f"worst rel {worst:.2e}"))

    worst = 0.0
    for p in (2, 3, 4):
        for k in range(1, 7):
            lam = gen.uniform(0.5, 2.0, size=p)
            total = sum(zonal_polynomial(kappa, lam) for kappa in partitions_of(k, p))
            target = lam.sum() ** k
            worst = max(worst, abs(total - target) / target)
    ok = worst < 1e-8
    results.append(("zonal normalization sum == (trace)^k", ok, f"worst rel {worst:.2e}"))

    for name, ok_flag, detail in results:
        log(f"{'PASS' if ok_flag else 'FAIL'}  {name}  [{detail}]")
    return results


def _mini_run(ineq: str, seed: int, **overrides) -> list[ReportRow]:
    base = {
        "schema_version": SCHEMA_VERSION,
        "inequality_id": ineq,
        "seed": seed,
        "n_samples": 20000,
        "z_threshold": 3.0,
        "split": "all",
    }
    base.update(overrides)
    return run(parse_config(base), workers=1)


def _suite_proved(log) -> list[tuple[str, bool, str]]:
    cases = [
        (
            "Laplace-transform split ordering",
            dict(
                ineq="lt_order", d=2, block_sizes=[1, 1], alpha=3.0,
                sigma_source={"kind": "explicit", "matrix": [[1.0, 0.6], [0.6, 1.0]]},
                t_blocks=[[[0.5]], [[0.5]]],
            ),
        ),
        (
            "inverse-minor sandwich, both sides",
            dict(
                ineq="sandwich", d=3, block_sizes=[1, 1, 1], alpha=5.0,
                sigma_source={"kind": "random", "count": 4},
                exponents={"values": [0.4, 0.4, 0.4], "signs": [-1, -1, -1]},
                bound="both",
            ),
        ),
        (
            "product-moment split at d=2",
            dict(
                ineq="conj11", d=2, block_sizes=[2, 2], alpha=6.0,
                sigma_source={"kind": "random", "count": 4},
                exponents={"values": [0.7, 1.3], "signs": [1, 1]},
            ),
        ),
        (
            "tail-probability split with scalar blocks",
            dict(
                ineq="conj36", d=2, block_sizes=[1, 1], alpha=4.0,
                sigma_source={"kind": "random", "count": 4},
            ),
        ),
        (
            "one-inverted-minor lower bound at d=2",
            dict(
                ineq="opp_lower", d=2, block_sizes=[2, 2], alpha=6.0,
                sigma_source={"kind": "random", "count": 4},
                exponents={"values": [0.7, 1.3], "signs": [-1, 1]},
            ),
        ),
        (
            "inverted-vs-upright upper bound",
            dict(
                ineq="opp_upper", d=2, block_sizes=[1, 1], alpha=5.0,
                sigma_source={"kind": "random", "count": 4},
                exponents={"values": [0.4, 1.0], "signs": [-1, 1]},
            ),
        ),
        (
            "Bernstein functional pairs",
            dict(
                ineq="bernstein", d=2, block_sizes=[1, 1], alpha=3.0,
                sigma_source={"kind": "explicit", "matrix": [[1.0, 0.6], [0.6, 1.0]]},
                bernstein={
                    "f": {"trace_offset": [[0.0]], "atoms": [[1.0, [[1.0]]]]},
                    "g": {"trace_offset": [[0.0]], "atoms": [[1.0, [[1.0]]]]},
                },
            ),
        ),
        (
            "ordered-eigenvalue split",
            dict(
                ineq="eigen", d=1, block_sizes=[2], alpha=4.0,
                sigma_source={"kind": "random", "count": 4},
                exponents={"values": [1.0, 1.0], "signs": [1, 1]},
            ),
        ),
        (
            "sphere-product ratio, Gaussian radial d=2",
            dict(
                ineq="elliptical", d=2, block_sizes=[1, 1], alpha=3.0,
                sigma_source={"kind": "explicit", "matrix": [[1.0, 0.5], [0.5, 1.0]]},
                elliptical={"alphas": [1.0, 1.0], "radial": {"kind": "chisq"}},
            ),
        ),
    ]
    results = []
    for idx, (name, kw) in enumerate(cases):
        ineq = kw.pop("ineq")
        rows = _mini_run(ineq, 90000 + idx, **kw)
        violated = [r for r in rows if r.verdict == "Violated"]
        ok = not violated
        detail = f"{len(rows)} rows"
        if violated:
            detail += f"; violated: {violated[0].experiment_id} z={violated[0].z:.2f}"
        results.append((name, ok, detail))
        log(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]")
    return results


def _suite_conjectures(log) -> tuple[list[tuple[str, bool, str]], bool]:
    cases = [
        (
            "product-moment split, three blocks (open)",
            dict(
                ineq="conj11", d=3, block_sizes=[1, 2, 1], alpha=6.0,
                sigma_source={"kind": "random", "count": 3},
                exponents={"values": [0.7, 1.1, 0.5], "signs": [1, 1, 1]},
            ),
        ),
        (
            "tail-probability split, matrix blocks (open)",
            dict(
                ineq="conj36", d=2, block_sizes=[2, 2], alpha=6.0,
                sigma_source={"kind": "random", "count": 3},
            ),
        ),
        (
            "one-inverted-minor lower bound, three blocks (conditional)",
            dict(
                ineq="opp_lower", d=3, block_sizes=[1, 1, 1], alpha=5.0,
                sigma_source={"kind": "random", "count": 3},
                exponents={"values": [0.4, 0.8, 0.8], "signs": [-1, 1, 1]},
            ),
        ),
        (
            "sphere-product ratio, Gaussian radial d=3 (open)",
            dict(
                ineq="elliptical", d=3, block_sizes=[1, 1, 1], alpha=4.0,
                sigma_source={"kind": "random", "count": 3},
                elliptical={"alphas": [1.0, 1.0, 1.0], "radial": {"kind": "chisq"}},
            ),
        ),
        (
            "sphere-product ratio, spread lognormal radial (open)",
            dict(
                ineq="elliptical", d=3, block_sizes=[1, 1, 1], alpha=4.0,
                sigma_source={"kind": "random", "count": 3},
                elliptical={
                    "alphas": [0.5, 0.5, 0.5],
                    "radial": {"kind": "lognormal", "mu": 0.0, "sigma": 1.2},
                },
            ),
        ),
    ]
    results = []
    confirmed = False
    for idx, (name, kw) in enumerate(cases):
        ineq = kw.pop("ineq")
        rows = _mini_run(ineq, 77000 + idx, **kw)
        counts = {}
        for r in rows:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        confirmed_here = [
            r for r in rows if r.verdict == "Violated" and "candidate_rerun" in r.detail
        ]
        confirmed = confirmed or bool(confirmed_here)
        detail = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        results.append((name, True, detail))
        log(f"INFO  {name}  [{detail}]")
        for r in confirmed_here:
            log(f"      confirmed violation: {r.experiment_id} z={r.z:.2f}")
    return results, confirmed


def verify_suite(suite_name: str, log=print) -> int:
    """Run a named bundle and return the process exit code.

    'proved' re-checks inequalities with known proofs and fails on any
    Violated row; 'conjectures' explores open statements and only exits
    nonzero (2) on a violation confirmed by the 10x re-run; 'oracles'
    cross-validates the closed forms against independent numerics.
    """
    if suite_name == "oracles":
        results = _suite_oracles(log)
        return 0 if all(ok for _, ok, _ in results) else 1
    if suite_name == "proved":
        results = _suite_proved(log)
        return 0 if all(ok for _, ok, _ in results) else 1
    if suite_name == "conjectures":
        _, confirmed = _suite_conjectures(log)
        return 2 if confirmed else 0
    raise ConfigError(f"unknown suite {suite_name!r}; valid: proved, conjectures, oracles")
