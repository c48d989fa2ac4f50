"""Experiment harness: counting conventions, sweeps, serialization."""

import json
import math

import pytest

from psml.metrics import (
    FLAG_LOW_CONFIDENCE,
    FLAG_NO_CUTS,
    FLAG_UNDEFINED,
    PRESETS,
    clustered_ztest,
    config_with,
    convergence_series,
    default_warmup,
    fpr_experiment,
    fpr_row,
    hlc_recall_curve,
    partial_predicate_experiment,
    pr_diagram,
    pr_experiment,
    render_csv,
    render_structured,
    sweep,
    two_proportion_ztest,
    write_rows,
)
from psml.analytic import hlc_recall, precision, recall
from psml.monitors import cut_length, detect_async, detect_partialsync, is_eps_consistent
from psml.simkernel import FixedLength, GeometricLength, PointLength, SimConfig, generate

import io


CFG = SimConfig(n=3, epsilon_app=5, delta=10, alpha=0.05, beta=0.15, horizon=600, seed=31)


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def test_config_with_shorthands():
    assert config_with(CFG, ell=1).interval == PointLength()
    assert config_with(CFG, ell=6).interval == FixedLength(6)
    assert config_with(CFG, geom_p=0.3).interval == GeometricLength(0.3)
    assert config_with(CFG, seed=9).seed == 9
    assert config_with(CFG).beta == CFG.beta
    with pytest.raises(ValueError):
        config_with(CFG, ell=3, geom_p=0.5)
    with pytest.raises(TypeError):
        config_with(CFG, bogus=1)


def test_default_warmup_is_five_percent():
    assert default_warmup(CFG) == 30
    assert default_warmup(config_with(CFG, horizon=100_000)) == 5000


# ---------------------------------------------------------------------------
# single-trace experiments
# ---------------------------------------------------------------------------


def test_fpr_experiment_counts_match_direct_enumeration():
    res = fpr_experiment(CFG, eps_check=5)
    warm = default_warmup(CFG)
    cuts = [
        c
        for c in detect_async(generate(CFG))
        if min(cand.start for cand in c.candidates) >= warm
    ]
    assert res.warmup == warm
    assert res.y == len(cuts)
    assert res.y_f == sum(is_eps_consistent(c, 5) for c in cuts)
    assert res.fpr == pytest.approx(1 - res.y_f / res.y)
    assert res.config == CFG


def test_fpr_experiment_flags_sparse_counts():
    tiny = config_with(CFG, horizon=40, beta=0.05, seed=2)
    res = fpr_experiment(tiny, eps_check=5)
    if res.y == 0:
        assert FLAG_NO_CUTS in res.flags
        assert FLAG_UNDEFINED in res.flags
        assert math.isnan(res.fpr)
    else:
        assert res.y < 30
        assert FLAG_LOW_CONFIDENCE in res.flags


def test_fpr_experiment_rejects_bad_window():
    with pytest.raises(ValueError):
        fpr_experiment(CFG, eps_check=-1)


def test_convergence_series_final_sample_equals_experiment():
    for sample_every in (7, 50, 600, 1000):
        series = convergence_series(CFG, sample_every)
        res = fpr_experiment(CFG, eps_check=CFG.epsilon_app)
        assert series[-1][0] == CFG.horizon
        assert series[-1][1] == res.fpr  # exact, not approximate
        ticks = [t for t, _ in series]
        assert ticks == sorted(ticks)
        assert all(t % sample_every == 0 or t == CFG.horizon for t in ticks)


def test_convergence_series_rejects_bad_stride():
    with pytest.raises(ValueError):
        convergence_series(CFG, 0)


def test_pr_experiment_matches_two_direct_runs():
    eps_mon = 9
    res = pr_experiment(CFG, eps_mon)
    warm = default_warmup(CFG)
    trace = generate(CFG)

    def past(c):
        return min(cand.start for cand in c.candidates) >= warm

    got = [c for c in detect_partialsync(trace, eps_mon) if past(c)]
    real = [c for c in detect_partialsync(trace, CFG.epsilon_app) if past(c)]
    hits = [c for c in got if cut_length(c) <= CFG.epsilon_app]
    assert res.detected == len(got)
    assert res.true_set == len(real)
    assert res.hits == len(hits)
    assert res.precision_est == pytest.approx(len(hits) / len(got))
    assert res.recall_est == pytest.approx(len(hits) / len(real))


def test_pr_experiment_symmetric_window_is_exact():
    res = pr_experiment(CFG, CFG.epsilon_app)
    assert res.precision_est == 1.0
    assert res.recall_est == 1.0
    assert res.detected == res.true_set == res.hits


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def test_fpr_row_flattens_experiment():
    row = fpr_row(CFG)
    res = fpr_experiment(CFG, CFG.epsilon_app)
    assert (row.y, row.y_f, row.fpr) == (res.y, res.y_f, res.fpr)
    assert row.eps_check == CFG.epsilon_app
    assert row.ell == 1 and row.geom_p is None
    grow = fpr_row(config_with(CFG, geom_p=0.5))
    assert grow.ell is None and grow.geom_p == 0.5


def test_sweep_rows_in_grid_order_with_seeds_innermost():
    rows = sweep(CFG, {"beta": [0.1, 0.2], "epsilon_app": [3, 6]}, seeds=[0, 1])
    assert len(rows) == 8
    key = [(r.beta, r.eps_app, r.seed) for r in rows]
    assert key == [
        (0.1, 3, 0),
        (0.1, 3, 1),
        (0.1, 6, 0),
        (0.1, 6, 1),
        (0.2, 3, 0),
        (0.2, 3, 1),
        (0.2, 6, 0),
        (0.2, 6, 1),
    ]
    # eps_check follows the per-row application window by default
    assert [r.eps_check for r in rows] == [3, 3, 6, 6, 3, 3, 6, 6]


def test_sweep_parallel_rows_identical():
    grid = {"beta": [0.1, 0.2]}
    assert sweep(CFG, grid, [0, 1], jobs=2) == sweep(CFG, grid, [0, 1], jobs=1)


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep(CFG, {}, [0])
    with pytest.raises(ValueError):
        sweep(CFG, {"beta": [0.1]}, [])
    with pytest.raises(ValueError):
        sweep(CFG, {"beta": []}, [0])


def test_sweep_is_repeatable():
    grid = {"beta": [0.1, 0.2]}
    assert sweep(CFG, grid, [0, 1]) == sweep(CFG, grid, [0, 1])


# ---------------------------------------------------------------------------
# derived experiments
# ---------------------------------------------------------------------------


def test_pr_diagram_analytic_matches_closed_forms():
    rows = pr_diagram(config_with(CFG, ell=1), [3, 6], [3, 6], mode="analytic")
    assert [(r["eps_mon"], r["eps_app"]) for r in rows] == [
        (3, 3),
        (6, 3),
        (3, 6),
        (6, 6),
    ]
    for row in rows:
        assert row["precision"] == precision(row["eps_mon"], row["eps_app"], CFG.n, CFG.beta, 1)
        assert row["recall"] == recall(row["eps_mon"], row["eps_app"], CFG.n, CFG.beta, 1)


def test_pr_diagram_simulated_shape():
    rows = pr_diagram(config_with(CFG, ell=2), [3, 6], [3], mode="simulated", replicates=2)
    assert len(rows) == 2
    for row in rows:
        assert 0.0 <= row["precision"] <= 1.0
        assert 0.0 <= row["recall"] <= 1.0
    # the monitor window equal to the system window is exact
    exact = [r for r in rows if r["eps_mon"] == 3]
    assert exact[0]["recall"] == 1.0


def test_pr_diagram_rejects_bad_mode_and_interval():
    with pytest.raises(ValueError):
        pr_diagram(CFG, [3], [3], mode="wrong")
    with pytest.raises(ValueError):
        pr_diagram(config_with(CFG, geom_p=0.5), [3], [3])


def test_partial_predicate_experiment_bounds():
    cfg = config_with(CFG, n=4, ell=8, beta=0.05, horizon=2000)
    value = partial_predicate_experiment(cfg, p=2, replicates=2)
    assert 0.0 <= value <= 1.5  # a ratio of counts, near or below 1
    with pytest.raises(ValueError):
        partial_predicate_experiment(cfg, p=0)
    with pytest.raises(ValueError):
        partial_predicate_experiment(cfg, p=9)


def test_hlc_recall_curve_pools_counts():
    from psml.monitors import detect_partialsync as dps, detect_quasi as dq

    cfg = config_with(CFG, n=3, beta=0.05, horizon=2500)
    rows = hlc_recall_curve(cfg, [4, 9], replicates=2)
    assert [r[0] for r in rows] == [4, 9]
    for ell, sim, closed in rows:
        assert closed == hlc_recall(cfg.epsilon_app, cfg.n, cfg.beta, ell)
        num = denom = 0
        for i in range(2):
            t = generate(config_with(cfg, ell=ell, seed=cfg.seed + i))
            num += len(dq(t))
            denom += len(dps(t, cfg.epsilon_app))
        assert sim == pytest.approx(num / denom)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def test_two_proportion_ztest_known_value():
    z, p = two_proportion_ztest(30, 100, 10, 100)
    assert z == pytest.approx(3.5355, abs=1e-3)
    assert p == pytest.approx(0.000407, rel=1e-2)
    z0, p0 = two_proportion_ztest(5, 50, 5, 50)
    assert z0 == 0.0 and p0 == 1.0
    with pytest.raises(ValueError):
        two_proportion_ztest(1, 0, 1, 10)


def test_clustered_ztest_identical_arms():
    counts = [(10, 100), (20, 150), (12, 110)]
    diff, z, p = clustered_ztest(counts, counts)
    assert diff == 0.0 and z == 0.0 and p == 1.0


def test_clustered_ztest_detects_separated_arms():
    arm1 = [(90, 100), (88, 100), (91, 100), (89, 100)]
    arm2 = [(10, 100), (12, 100), (9, 100), (11, 100)]
    diff, z, p = clustered_ztest(arm1, arm2)
    assert diff == pytest.approx(0.79, abs=1e-9)
    assert z > 10
    assert p < 1e-6


def test_clustered_ztest_validation():
    with pytest.raises(ValueError):
        clustered_ztest([(1, 10)], [(1, 10), (2, 10)])
    with pytest.raises(ValueError):
        clustered_ztest([(0, 0), (0, 0)], [(1, 10), (2, 10)])


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_render_csv_formatting():
    rows = [
        {"a": 1, "b": 0.123456789, "c": float("nan"), "d": ("x", "y"), "e": None},
    ]
    text = render_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "a,b,c,d,e"
    assert lines[1] == "1,0.123457,,x;y,"


def test_render_csv_fixed_columns_for_metrics_rows():
    row = fpr_row(config_with(CFG, horizon=200))
    text = render_csv([row])
    header = text.splitlines()[0].split(",")
    assert header[:5] == ["n", "eps_app", "delta", "alpha", "beta"]
    assert header[-1] == "flags"


def test_render_structured_nan_becomes_null():
    rows = [{"x": float("nan"), "y": (1, 2)}]
    data = json.loads(render_structured(rows))
    assert data == [{"x": None, "y": [1, 2]}]


def test_write_rows_dispatch():
    row = {"a": 1}
    buf = io.StringIO()
    write_rows([row], buf, "csv")
    assert buf.getvalue().startswith("a\n")
    buf = io.StringIO()
    write_rows([row], buf, "structured")
    assert json.loads(buf.getvalue()) == [{"a": 1}]
    with pytest.raises(ValueError):
        write_rows([row], io.StringIO(), "yaml")


def test_presets_shape():
    assert set(PRESETS) == {
        "fig-fpr-n20",
        "fig-ad-independence",
        "fig-pr-diagram",
        "table-partial",
        "fig-hlc",
    }
    kinds = {spec["kind"] for spec in PRESETS.values()}
    assert kinds == {"sweep", "prdiagram", "partial", "hlc"}
    for spec in PRESETS.values():
        assert "base" in spec
