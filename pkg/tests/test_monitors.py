"""Detection monitors against the naive full-compare reference."""

import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from psml.clocks import HLCTimestamp, Ordering, VectorClock
from psml.monitors import (
    Candidate,
    Cut,
    candidate_queues,
    cut_length,
    cut_records,
    detect_async,
    detect_partial_p,
    detect_partialsync,
    detect_quasi,
    is_eps_consistent,
    is_hb_consistent,
    write_cuts,
)
from psml.simkernel import SimConfig, generate

from helpers import brute_async, brute_partialsync, brute_quasi, random_small_config


def _cand(proc, start, end, entries, n=None, l=None):
    vc = VectorClock(tuple(entries), proc)
    return Candidate(proc, start, end, vc, HLCTimestamp(l if l is not None else start, 0))


# ---------------------------------------------------------------------------
# cut primitives
# ---------------------------------------------------------------------------


def test_cut_length_cases():
    a = _cand(0, 5, 7, (1, 0))
    b = _cand(1, 9, 12, (0, 1))
    assert cut_length(Cut((a, b))) == 2  # gap between end 7 and start 9
    c = _cand(1, 6, 6, (0, 1))
    assert cut_length(Cut((a, c))) == 0  # overlap clamps to zero
    assert cut_length(Cut((a,))) == 0


def test_cut_rejects_duplicate_processes():
    a = _cand(0, 1, 1, (1, 0))
    b = _cand(0, 3, 3, (2, 0))
    with pytest.raises(ValueError):
        Cut((a, b))


def test_candidate_rejects_reversed_interval():
    with pytest.raises(ValueError):
        _cand(0, 5, 4, (1, 0))


def test_is_eps_consistent_boundary():
    a = _cand(0, 0, 0, (1, 0))
    b = _cand(1, 4, 4, (0, 1))
    cut = Cut((a, b))
    assert cut_length(cut) == 4
    assert is_eps_consistent(cut, 4)
    assert not is_eps_consistent(cut, 3.999)


@given(
    st.lists(
        st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)),
        min_size=4,
        max_size=6,
        unique=True,
    )
)
@settings(max_examples=200)
def test_hb_consistency_vector_path_matches_pairwise(tuples):
    """The batched stamp comparison must agree with pairwise compare()
    on cuts large enough to take the vectorized path."""
    cands = tuple(
        Candidate(i, i, i, VectorClock(entries, i), HLCTimestamp(i, 0))
        for i, entries in enumerate(tuples[:4])
    )
    cut = Cut(cands)
    expected = all(
        cands[i].vc.compare(cands[j].vc) is Ordering.CONCURRENT
        for i in range(4)
        for j in range(i + 1, 4)
    )
    assert is_hb_consistent(cut) == expected


# ---------------------------------------------------------------------------
# queue construction
# ---------------------------------------------------------------------------


def test_candidate_queues_subset_and_errors():
    trace = generate(SimConfig(n=4, epsilon_app=5, beta=0.2, horizon=100, seed=21))
    full = candidate_queues(trace)
    assert len(full) == 4
    sub = candidate_queues(trace, [2, 0])
    assert [q[0].proc for q in sub if q] == [0, 2]  # sorted process order
    with pytest.raises(ValueError):
        candidate_queues(trace, [])
    with pytest.raises(ValueError):
        candidate_queues(trace, [4])


# ---------------------------------------------------------------------------
# the engine against the reference
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("index", range(40))
def test_async_monitor_matches_reference(index):
    cfg = random_small_config(index)
    trace = generate(cfg)
    assert detect_async(trace) == brute_async(trace)


@pytest.mark.parametrize("index", range(40, 60))
def test_partialsync_monitor_matches_reference(index):
    cfg = random_small_config(index)
    trace = generate(cfg)
    for eps in (0, cfg.epsilon_app, cfg.epsilon_app + 3):
        assert detect_partialsync(trace, eps) == brute_partialsync(trace, eps)


@pytest.mark.parametrize("index", range(60, 80))
def test_quasi_monitor_matches_reference(index):
    cfg = random_small_config(index)
    trace = generate(cfg)
    assert detect_quasi(trace) == brute_quasi(trace)


@pytest.mark.parametrize("index", range(80, 100))
def test_partialsync_is_length_filtered_async(index):
    """Window acceptance must not disturb the enumeration trajectory."""
    cfg = random_small_config(index)
    trace = generate(cfg)
    full = detect_async(trace)
    for eps in (0, 2, cfg.epsilon_app, math.inf):
        filtered = [c for c in full if cut_length(c) <= eps]
        assert detect_partialsync(trace, eps) == filtered


@pytest.mark.parametrize("index", range(100, 115))
def test_quasi_is_overlap_filtered_async_without_messages(index):
    """With no messages the scalar clocks equal the physical clocks, so
    quasi acceptance reduces to a shared tick."""
    cfg = random_small_config(index)
    cfg = SimConfig(
        n=cfg.n,
        epsilon_app=cfg.epsilon_app,
        delta=cfg.delta,
        alpha=0.0,
        beta=cfg.beta,
        interval=cfg.interval,
        horizon=cfg.horizon,
        seed=cfg.seed,
        advance_prob=cfg.advance_prob,
    )
    trace = generate(cfg)
    full = detect_async(trace)
    overlap = [c for c in full if cut_length(c) == 0]
    assert detect_quasi(trace) == overlap


def test_quasi_cuts_all_have_zero_length_without_messages():
    cfg = SimConfig(n=3, epsilon_app=4, alpha=0.0, beta=0.3, horizon=400, seed=22)
    trace = generate(cfg)
    cuts = detect_quasi(trace)
    assert cuts
    assert all(cut_length(c) == 0 for c in cuts)


def test_monitors_on_empty_queue():
    # a predicate that never fires on some process yields no cuts
    cfg = SimConfig(n=2, epsilon_app=5, beta=0.01, horizon=30, seed=4)
    trace = generate(cfg)
    if all(trace.intervals):
        pytest.skip("seed produced candidates everywhere")
    assert detect_async(trace) == []


def test_detect_partial_p_prefix_counts():
    cfg = SimConfig(n=4, epsilon_app=5, alpha=0.05, beta=0.2, horizon=400, seed=23)
    trace = generate(cfg)
    for p in range(1, 5):
        assert detect_partial_p(trace, p, "quasi") == len(
            detect_quasi(trace, range(p))
        )
        assert detect_partial_p(trace, p, "partialsync", eps_mon=5) == len(
            detect_partialsync(trace, 5, range(p))
        )
    with pytest.raises(ValueError):
        detect_partial_p(trace, 0)
    with pytest.raises(ValueError):
        detect_partial_p(trace, 5)
    with pytest.raises(ValueError):
        detect_partial_p(trace, 2, "partialsync")
    with pytest.raises(ValueError):
        detect_partial_p(trace, 2, "bogus")


def test_partialsync_rejects_bad_window():
    trace = generate(SimConfig(n=2, epsilon_app=5, beta=0.2, horizon=50, seed=3))
    with pytest.raises(ValueError):
        detect_partialsync(trace, -1)
    with pytest.raises(ValueError):
        detect_partialsync(trace, float("nan"))


# ---------------------------------------------------------------------------
# export format
# ---------------------------------------------------------------------------


def test_cut_records_flags():
    a = _cand(0, 5, 7, (1, 0))
    b = _cand(1, 9, 12, (0, 1))
    (line,) = cut_records([Cut((a, b))], eps=2)
    assert line == "kind=cut cands=0:5:7,1:9:12 length=2 hb=1 eps=1 overlap=0"
    (tight,) = cut_records([Cut((a, b))], eps=1)
    assert "eps=0" in tight


def test_write_cuts_lines():
    trace = generate(SimConfig(n=3, epsilon_app=4, beta=0.2, horizon=120, seed=24))
    cuts = detect_async(trace)
    buf = io.StringIO()
    write_cuts(cuts, 4, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == len(cuts)
    assert all(line.startswith("kind=cut ") for line in lines)
