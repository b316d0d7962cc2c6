import json
import os

import numpy as np
import pytest

from wishartgpi.cli import build_parser, main
from wishartgpi.errors import ConfigError
from wishartgpi.harness import (
    CSV_COLUMNS,
    INEQUALITY_IDS,
    SCHEMA_VERSION,
    ExperimentConfig,
    ReportRow,
    exit_code_for,
    parse_config,
    render_csv,
    report_paths,
    run,
    sigma_digest,
    verify_suite,
    write_reports,
)
from wishartgpi.checks import STATEMENTS


def sandwich_raw(**over):
    raw = {
        "schema_version": 1,
        "inequality_id": "sandwich",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 6.0,
        "sigma_source": {"kind": "explicit", "matrix": [[1.0, 0.5], [0.5, 1.0]]},
        "exponents": {"values": [0.4, 0.4], "signs": [-1, -1]},
        "n_samples": 4000,
        "seed": 99,
        "bound": "both",
    }
    raw.update(over)
    return raw


# ---------------------------------------------------------------- parsing


def test_parse_config_roundtrip():
    cfg = parse_config(sandwich_raw())
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg
    assert cfg.inequality_id == "sandwich"
    assert cfg.block_sizes == (1, 1)
    assert cfg.schema_version == SCHEMA_VERSION


@pytest.mark.parametrize(
    "mutate,phrase",
    [
        ({"schema_version": 2}, "schema_version"),
        ({"inequality_id": "banana"}, "unknown inequality_id"),
        ({"d": 3}, "blocks"),
        ({"alpha": 0.5}, "alpha"),
        ({"n_samples": 1}, "n_samples"),
        ({"seed": -4}, "seed"),
        ({"z_threshold": 0.0}, "z_threshold"),
        ({"sigma_source": {"kind": "explicit", "matrix": [[1.0, 2.0], [2.0, 1.0]]}}, "positive definite"),
        ({"sigma_source": {"kind": "random"}}, "count"),
        ({"sigma_source": {"kind": "file"}}, "kind"),
        ({"split": 5}, "split"),
        ({"split": True}, "split"),
        ({"exponents": {"values": [0.4, 0.4], "signs": [1, -1]}}, "sign -1"),
        ({"exponents": {"values": [0.4], "signs": [-1]}}, "entries"),
        ({"exponents": [0.4, 0.4]}, "exponents"),
        ({"bound": "sideways"}, "bound"),
        ({"exponents": {"values": [3.0, 0.4], "signs": [-1, -1]}}, "infinite"),
        ({"workers": 0}, "workers"),
        ({"output_path": 7}, "output_path"),
    ],
)
def test_parse_config_rejects(mutate, phrase):
    with pytest.raises(ConfigError, match=phrase):
        parse_config(sandwich_raw(**mutate))


def test_parse_config_missing_field():
    raw = sandwich_raw()
    del raw["alpha"]
    with pytest.raises(ConfigError, match="missing field 'alpha'"):
        parse_config(raw)
    with pytest.raises(ConfigError, match="JSON object"):
        parse_config([1, 2])


def test_parse_config_upper_window_check():
    # alpha 8, size-2 blocks: conservative window is (0.5, 2.5); nu=3.0
    # is still finite but the upper bound integral diverges
    raw = sandwich_raw(
        d=2,
        block_sizes=[2, 2],
        alpha=8.0,
        sigma_source={"kind": "random", "count": 1},
        exponents={"values": [3.0, 1.0], "signs": [-1, -1]},
    )
    with pytest.raises(ConfigError, match="strictly inside"):
        parse_config(raw)
    # same exponents are fine for the lower bound alone
    raw["bound"] = "lower"
    assert parse_config(raw).bound == "lower"


def test_parse_config_finiteness_override():
    # scalar blocks, alpha 6: nu = 0.4 <= 1/2 leaves the guaranteed window
    raw = sandwich_raw(
        exponents={"values": [0.3, 0.3], "signs": [-1, -1]}, bound="lower"
    )
    cfg = parse_config(raw)  # scalar blocks have lo = 0, so 0.3 is safe
    assert cfg.exponents["values"] == [0.3, 0.3]
    raw2 = sandwich_raw(
        d=2,
        block_sizes=[2, 1],
        alpha=8.0,
        sigma_source={"kind": "random", "count": 1},
        exponents={"values": [0.4, 0.6], "signs": [-1, -1]},
        bound="lower",
    )
    with pytest.raises(ConfigError, match="override_finiteness"):
        parse_config(raw2)
    assert parse_config(raw2, override_finiteness=True).d == 2
    raw2["override_finiteness"] = True
    assert parse_config(raw2).d == 2


def test_parse_config_eigen_split_range():
    raw = {
        "inequality_id": "eigen",
        "d": 1,
        "block_sizes": [3],
        "alpha": 6.0,
        "sigma_source": {"kind": "random", "count": 1},
        "exponents": {"values": [1.0, 1.0, 1.0], "signs": [1, 1, 1]},
        "n_samples": 1000,
        "seed": 1,
        "split": 3,
    }
    assert parse_config(raw).split == 3
    raw["split"] = 4
    with pytest.raises(ConfigError, match="split"):
        parse_config(raw)


def test_parse_config_conj36_and_elliptical_and_lt():
    base = {
        "inequality_id": "conj36",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 5.0,
        "sigma_source": {"kind": "random", "count": 1},
        "n_samples": 1000,
        "seed": 3,
    }
    assert parse_config(base).thresholds is None
    with pytest.raises(ConfigError, match="thresholds"):
        parse_config({**base, "thresholds": [1.0]})
    with pytest.raises(ConfigError, match="positive"):
        parse_config({**base, "thresholds": [1.0, -2.0]})

    ell = {
        "inequality_id": "elliptical",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 5.0,
        "sigma_source": {"kind": "explicit", "matrix": [[1.0, 0.4], [0.4, 1.0]]},
        "elliptical": {"alphas": [1.0, 1.0], "radial": {"kind": "chisq"}},
        "n_samples": 1000,
        "seed": 3,
    }
    assert parse_config(ell).elliptical["alphas"] == [1.0, 1.0]
    with pytest.raises(ConfigError, match="alphas"):
        parse_config({**ell, "elliptical": {"alphas": [1.0]}})
    with pytest.raises(ConfigError, match="radial"):
        parse_config({**ell, "elliptical": {"alphas": [1.0, 1.0], "radial": {"kind": "cauchy"}}})

    lt = {
        "inequality_id": "lt_order",
        "d": 2,
        "block_sizes": [1, 2],
        "alpha": 6.0,
        "sigma_source": {"kind": "random", "count": 1},
        "t_blocks": [[[0.5]], [[0.4, 0.0], [0.0, 0.2]]],
        "n_samples": 2,
        "seed": 3,
    }
    assert parse_config(lt).t_blocks is not None
    with pytest.raises(ConfigError, match="t_blocks"):
        parse_config({**lt, "t_blocks": [[[0.5]]]})
    with pytest.raises(ConfigError, match="t_blocks"):
        parse_config({**lt, "t_blocks": [[[0.5]], [[0.4]]]})
    with pytest.raises(ConfigError, match="nonnegative definite"):
        parse_config({**lt, "t_blocks": [[[-0.5]], [[0.4, 0.0], [0.0, 0.2]]]})


def test_parse_config_bernstein():
    raw = {
        "inequality_id": "bernstein",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 5.0,
        "sigma_source": {"kind": "random", "count": 1},
        "bernstein": {
            "f": {"atoms": [[1.0, [[0.7]]]]},
            "g": {"atoms": [[1.0, [[0.3]]]]},
        },
        "n_samples": 1000,
        "seed": 3,
    }
    assert parse_config(raw).bernstein is not None
    with pytest.raises(ConfigError, match="two blocks"):
        parse_config({**raw, "d": 3, "block_sizes": [1, 1, 1]})
    with pytest.raises(ConfigError, match="bernstein"):
        parse_config({**raw, "bernstein": {"f": {}}})


# ---------------------------------------------------------------- running


def test_run_row_cardinality_and_columns():
    raw = {
        "inequality_id": "conj11",
        "d": 3,
        "block_sizes": [1, 1, 1],
        "alpha": 5.0,
        "sigma_source": {"kind": "random", "count": 2},
        "exponents": {"values": [0.5, 0.5, 0.5], "signs": [1, 1, 1]},
        "n_samples": 3000,
        "seed": 714,
    }
    rows = run(parse_config(raw), workers=1)
    # 2 scale draws x splits {2, 3}
    assert len(rows) == 4
    ids = [r.experiment_id for r in rows]
    assert ids == ["conj11-s00-k2", "conj11-s00-k3", "conj11-s01-k2", "conj11-s01-k3"]
    for r in rows:
        assert r.statement == STATEMENTS["conj11"]
        assert r.status == "open"
        assert r.seed == 714
        assert r.exponents == "|".join(["0.5"] * 3)
        assert len(r.sigma_digest) == 12
        assert r.wall_time_ms > 0
        assert len(r.sigma) == 3


def test_run_sandwich_both_bounds_two_rows():
    rows = run(parse_config(sandwich_raw()), workers=1)
    assert [r.experiment_id for r in rows] == [
        "sandwich-s00-k2-lower",
        "sandwich-s00-k2-upper",
    ]
    assert rows[0].detail["side"] == "lower"
    assert rows[1].detail["side"] == "upper"
    assert all(r.verdict != "Violated" for r in rows)


def test_run_is_deterministic_and_worker_independent():
    raw = sandwich_raw(
        sigma_source={"kind": "random", "count": 2},
        d=3,
        block_sizes=[1, 1, 1],
        exponents={"values": [0.4, 0.4, 0.4], "signs": [-1, -1, -1]},
        alpha=5.0,
        n_samples=5000,
    )
    sheets = []
    for w in (1, 2, 8):
        rows = run(parse_config(raw), workers=w)
        assert len(rows) == 2 * 2 * 2  # sigmas x splits x bound sides
        sheets.append(render_csv(rows))
    assert sheets[0] == sheets[1] == sheets[2]


def test_run_lt_order_rows_are_exact():
    raw = {
        "inequality_id": "lt_order",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 4.0,
        "sigma_source": {"kind": "explicit", "matrix": [[1.0, 0.6], [0.6, 1.0]]},
        "t_blocks": [[[0.5]], [[0.5]]],
        "n_samples": 2,
        "seed": 0,
    }
    rows = run(parse_config(raw), workers=1)
    assert len(rows) == 1
    r = rows[0]
    assert r.verdict == "Holds"
    assert r.lhs_se == 0.0 and r.rhs_se == 0.0
    assert r.lhs > r.rhs  # transform with coupling dominates the split one
    assert r.detail["gap"] == pytest.approx(r.lhs - r.rhs, rel=1e-12)


# ---------------------------------------------------------------- reports


def fake_row(verdict, status):
    return ReportRow(
        experiment_id="x",
        inequality_id="sandwich",
        statement=STATEMENTS["sandwich"],
        d=2,
        alpha=5.0,
        block_sizes=(1, 1),
        sigma_digest="0" * 12,
        exponents="",
        lhs=1.0,
        lhs_se=0.1,
        rhs=2.0,
        rhs_se=0.0,
        z=-10.0,
        verdict=verdict,
        n=10,
        seed=0,
        status=status,
    )


def test_exit_code_semantics():
    assert exit_code_for([]) == 0
    assert exit_code_for([fake_row("Holds", "proved")]) == 0
    assert exit_code_for([fake_row("Violated", "open")]) == 0
    assert exit_code_for([fake_row("Violated", "conditional")]) == 0
    assert exit_code_for([fake_row("Violated", "proved")]) == 2


def test_render_csv_shape():
    sheet = render_csv([fake_row("Holds", "proved")])
    lines = sheet.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert sheet.endswith("\n") and "\r" not in sheet
    assert len(lines) == 3  # header + row + trailing newline


def test_sigma_digest_properties():
    a = np.array([[1.0, 0.2], [0.2, 1.0]])
    d1 = sigma_digest(a)
    assert len(d1) == 12 and all(c in "0123456789abcdef" for c in d1)
    assert sigma_digest(a) == d1
    assert sigma_digest(a + 1e-12 * np.eye(2)) != d1


def test_report_paths_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("WISHARTGPI_OUTPUT_DIR", str(tmp_path))
    cfg = parse_config(sandwich_raw(output_path="sweep.csv"))
    csv_path, json_path = report_paths(cfg)
    assert csv_path == str(tmp_path / "sweep.csv")
    assert json_path == str(tmp_path / "sweep.json")
    absolute = parse_config(sandwich_raw(output_path=str(tmp_path / "abs.json")))
    assert report_paths(absolute)[0] == str(tmp_path / "abs.csv")


def test_write_reports_json_document(tmp_path):
    raw = {
        "inequality_id": "lt_order",
        "d": 2,
        "block_sizes": [1, 1],
        "alpha": 4.0,
        "sigma_source": {"kind": "explicit", "matrix": [[1.0, 0.6], [0.6, 1.0]]},
        "t_blocks": [[[0.5]], [[0.5]]],
        "n_samples": 2,
        "seed": 0,
        "output_path": str(tmp_path / "lt"),
    }
    cfg = parse_config(raw)
    rows = run(cfg, workers=1)
    csv_path, json_path = write_reports(cfg, rows)
    assert os.path.exists(csv_path) and os.path.exists(json_path)
    with open(json_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["config"]["inequality_id"] == "lt_order"
    assert len(doc["rows"]) == 1
    row = doc["rows"][0]
    assert row["z"] == "inf"  # exact comparisons stay strict-JSON safe
    assert "wall_time_ms" in row and "sigma" in row
    with open(csv_path, encoding="utf-8") as fh:
        assert fh.readline().rstrip("\n") == ",".join(CSV_COLUMNS)


def test_statement_registry_covers_all_ids():
    assert set(INEQUALITY_IDS) == set(STATEMENTS)
    for text in STATEMENTS.values():
        assert text and "," not in text  # stays a single CSV cell unquoted


# ---------------------------------------------------------------- suites


def test_verify_suites_pass():
    silent = lambda *parts: None
    assert verify_suite("oracles", log=silent) == 0
    assert verify_suite("proved", log=silent) == 0
    assert verify_suite("conjectures", log=silent) == 0
    with pytest.raises(ConfigError):
        verify_suite("everything", log=silent)


# ---------------------------------------------------------------- CLI


def test_cli_parser_subcommands():
    parser = build_parser()
    args = parser.parse_args(["run", "--config", "x.json", "--workers", "4"])
    assert args.config == "x.json" and args.workers == 4
    args = parser.parse_args(["verify", "--suite", "proved"])
    assert args.suite == "proved"


def test_cli_moments_exact(capsys):
    # E|X| for a 2x2 identity-scale model at alpha 6 is alpha(alpha-1) = 30
    code = main(["moments", "--alpha", "6", "--p", "2", "--nu", "1"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["moment"] == pytest.approx(30.0, rel=1e-12)


def test_cli_run_and_errors(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    raw = sandwich_raw(n_samples=3000, output_path=str(tmp_path / "out"))
    cfg_path.write_text(json.dumps(raw), encoding="utf-8")
    code = main(["run", "--config", str(cfg_path)])
    assert code == 0
    assert (tmp_path / "out.csv").exists()
    out = capsys.readouterr().out
    assert "2 rows" in out

    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    assert "config error" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()


def test_cli_sample_shape(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(sandwich_raw()), encoding="utf-8")
    code = main(["sample", "--config", str(cfg_path), "--count", "3"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["draws"]) == 3
    assert np.array(doc["draws"][0]).shape == (2, 2)
