"""Seeded generator of partially synchronous executions.

The system model: ``n`` processes hold integer clocks starting at 0.
Generation proceeds in scheduler steps; in each step every process
advances its clock by one with probability ``advance_prob`` unless it
sits at the drift cap (its clock equals the minimum clock plus
``epsilon_app``), so the clock spread never exceeds ``epsilon_app``.
If no process advances, the minimum-clock process is forced forward
(all of them when ``epsilon_app`` is 0, which keeps lockstep the only
legal schedule).  A run ends when every clock reaches ``horizon``.

On each clock advance a process, in this order: receives any message
whose delivery point has arrived, opens a predicate interval if the
truth model fires at the new clock value, and sends a message to a
uniformly random other process with probability ``alpha``.  Messages
are delivered at the receiver's first tick with clock at least
``send_pt + delta``; with drift a receiver may already be past that
value, in which case delivery lands on its next tick.  Messages still
undelivered when the receiver stops are dropped.

Every receive, interval start, and send is a causal event: it ticks
the process's vector clock and hybrid logical clock, and the stamps
are recorded in the trace.  An interval's end stamp is a snapshot of
the process's vector clock after its final tick (ends are not events).

Randomness is split into independent per-process streams keyed by
purpose, and every decision is indexed by clock value rather than by
scheduler step.  Predicate placement therefore depends only on
(seed, beta, interval, correlation), never on scheduling, and adding
processes does not perturb the streams of existing ones.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from .clocks import HLCTimestamp, VectorClock

__all__ = [
    "PointLength",
    "GeometricLength",
    "FixedLength",
    "Independent",
    "PMA",
    "HNMA",
    "PMAJ",
    "SimConfig",
    "PredicateInterval",
    "MessageRecord",
    "Trace",
    "step_schedule",
    "truthify",
    "correlated_decisions",
    "predicate_intervals",
    "generate",
    "trace_records",
    "write_trace",
]


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PointLength:
    """Point predicates: every true interval lasts a single tick."""


@dataclass(frozen=True, slots=True)
class GeometricLength:
    """Lengths drawn geometrically: P(k) = (1-p)**(k-1) * p for k >= 1."""

    p: float


@dataclass(frozen=True, slots=True)
class FixedLength:
    """Every interval lasts exactly ``length`` ticks."""

    length: int


IntervalSpec = PointLength | GeometricLength | FixedLength


@dataclass(frozen=True, slots=True)
class Independent:
    """Each process truthifies independently at rate beta."""


@dataclass(frozen=True, slots=True)
class PMA:
    """Partial majority adoption.

    The first ``group1`` processes truthify independently; each
    remaining process adopts the majority truth value of that group
    with probability ``p_dep`` and otherwise draws independently.
    """

    group1: int
    p_dep: float = 0.5


@dataclass(frozen=True, slots=True)
class HNMA:
    """Half-follow-the-minority.

    The first n//2 processes truthify independently; each remaining
    process adopts the MINORITY truth value of that group with
    probability 0.5 and otherwise draws independently.
    """


@dataclass(frozen=True, slots=True)
class PMAJ:
    """Prefix-majority chain.

    Process 0 truthifies independently; every process j adopts the
    majority truth value of processes 0..j-1 with probability 0.5 and
    otherwise draws independently.
    """


CorrelationSpec = Independent | PMA | HNMA | PMAJ


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Full description of one execution; two equal configs generate
    bit-identical traces."""

    n: int
    epsilon_app: int
    delta: int = 100
    alpha: float = 0.01
    beta: float = 0.01
    interval: IntervalSpec = PointLength()
    horizon: int = 100_000
    correlation: CorrelationSpec = Independent()
    seed: int = 0
    advance_prob: float = 0.5

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.epsilon_app < 0:
            raise ValueError("epsilon_app must be non-negative")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 0.0 < self.advance_prob <= 1.0:
            raise ValueError("advance_prob must be in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        iv = self.interval
        if isinstance(iv, GeometricLength):
            if not 0.0 < iv.p <= 1.0:
                raise ValueError("geometric length parameter must be in (0, 1]")
        elif isinstance(iv, FixedLength):
            if iv.length < 1:
                raise ValueError("fixed interval length must be at least 1")
        elif not isinstance(iv, PointLength):
            raise ValueError(f"unknown interval spec: {iv!r}")
        corr = self.correlation
        if isinstance(corr, PMA):
            if not 1 <= corr.group1 <= self.n - 1:
                raise ValueError("PMA group1 must leave at least one follower (1 <= group1 < n)")
            if not 0.0 <= corr.p_dep <= 1.0:
                raise ValueError("p_dep must be in [0, 1]")
        elif not isinstance(corr, (Independent, HNMA, PMAJ)):
            raise ValueError(f"unknown correlation spec: {corr!r}")


# ---------------------------------------------------------------------------
# trace records
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PredicateInterval:
    """One maximal span [start, end] of local-predicate truth.

    ``vc_start``/``hlc_start`` stamp the truthification event;
    ``vc_end`` snapshots the process's vector clock after the tick at
    ``end``.  Point predicates have end == start.
    """

    proc: int
    start: int
    end: int
    vc_start: VectorClock
    vc_end: VectorClock
    hlc_start: HLCTimestamp


@dataclass(frozen=True, slots=True)
class MessageRecord:
    """A delivered message with the clock stamps of both endpoints."""

    sender: int
    send_pt: int
    receiver: int
    receive_pt: int
    vc_send: VectorClock
    hlc_send: HLCTimestamp
    vc_receive: VectorClock
    hlc_receive: HLCTimestamp


@dataclass(frozen=True, slots=True)
class Trace:
    """A complete generated execution.

    ``intervals[p]`` lists process p's predicate intervals in time
    order; ``messages`` lists delivered messages in send order.
    ``schedule_log`` (debugging aid, populated on request for small
    runs) holds one (clocks_before, advancing) pair per scheduler step.
    """

    config: SimConfig
    intervals: tuple[tuple[PredicateInterval, ...], ...]
    messages: tuple[MessageRecord, ...]
    final_clocks: tuple[int, ...]
    schedule_log: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] | None = field(
        default=None, compare=False
    )


# ---------------------------------------------------------------------------
# randomness: per-purpose, per-process streams indexed by clock value
# ---------------------------------------------------------------------------

_S_PRED = 0  # predicate truth coins
_S_LEN = 1  # interval length draws
_S_SEND = 2  # send coins
_S_RECV = 3  # receiver choices
_S_DEP = 4  # correlation dependence coins
_S_SCHED = 5  # scheduler advance coins


def _stream(seed: int, purpose: int, proc: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(purpose, proc)))


def _truth_coins(config: SimConfig, proc: int) -> np.ndarray:
    """Independent per-tick truth coins for one process (index = clock value)."""
    coins = _stream(config.seed, _S_PRED, proc).random(config.horizon + 1) < config.beta
    coins[0] = False
    return coins


def _length_iter(config: SimConfig, proc: int) -> Iterator[int]:
    iv = config.interval
    if isinstance(iv, PointLength):
        return itertools.repeat(1)
    if isinstance(iv, FixedLength):
        return itertools.repeat(iv.length)
    rng = _stream(config.seed, _S_LEN, proc)

    def draw() -> Iterator[int]:
        while True:
            for k in rng.geometric(iv.p, size=256):
                yield int(k)

    return draw()


# ---------------------------------------------------------------------------
# predicate truthification
# ---------------------------------------------------------------------------


def truthify(decisions: np.ndarray, lengths: Iterator[int], horizon: int) -> list[tuple[int, int]]:
    """Turn per-tick truth decisions into disjoint intervals.

    A decision at tick v opens an interval [v, v + k - 1] with k drawn
    from ``lengths``; decisions falling inside an open interval are
    ignored (no re-truthification), and eligibility resumes the tick
    after the interval closes.  Ends are clamped to the horizon.
    """
    out: list[tuple[int, int]] = []
    next_free = 1
    for v in np.flatnonzero(decisions):
        if v < next_free:
            continue
        end = min(int(v) + next(lengths) - 1, horizon)
        out.append((int(v), end))
        next_free = end + 1
    return out


def _coverage(intervals: list[tuple[int, int]], horizon: int) -> np.ndarray:
    cov = np.zeros(horizon + 1, dtype=bool)
    for a, b in intervals:
        cov[a : b + 1] = True
    return cov


def _build_predicates(config: SimConfig) -> tuple[np.ndarray, list[list[tuple[int, int]]]]:
    """Per-tick truth decisions and the intervals they open, per process.

    Follower processes consult the predicate COVERAGE of their
    reference group (an interval keeps a predicate true past its
    opening tick), with strict majority/minority and ties read as
    false.
    """
    n, horizon = config.n, config.horizon
    base = [_truth_coins(config, p) for p in range(n)]
    corr = config.correlation

    decisions: list[np.ndarray | None] = [None] * n
    intervals: list[list[tuple[int, int]] | None] = [None] * n
    cov_sum = np.zeros(horizon + 1, dtype=np.int32)

    def settle(p: int, dec: np.ndarray) -> None:
        decisions[p] = dec
        intervals[p] = truthify(dec, _length_iter(config, p), horizon)

    def settle_follower(p: int, followed: np.ndarray, p_dep: float) -> None:
        dep = _stream(config.seed, _S_DEP, p).random(horizon + 1) < p_dep
        dep[0] = False
        settle(p, np.where(dep, followed, base[p]))

    if isinstance(corr, Independent):
        for p in range(n):
            settle(p, base[p])
    elif isinstance(corr, (PMA, HNMA)):
        g1 = corr.group1 if isinstance(corr, PMA) else n // 2
        p_dep = corr.p_dep if isinstance(corr, PMA) else 0.5
        for p in range(g1):
            settle(p, base[p])
            cov_sum += _coverage(intervals[p], horizon)
        if isinstance(corr, PMA):
            followed = 2 * cov_sum > g1  # strict majority, ties false
        else:
            followed = 2 * cov_sum < g1  # strict minority, ties false
        for p in range(g1, n):
            settle_follower(p, followed, p_dep)
    elif isinstance(corr, PMAJ):
        settle(0, base[0])
        cov_sum += _coverage(intervals[0], horizon)
        for p in range(1, n):
            settle_follower(p, 2 * cov_sum > p, 0.5)
            cov_sum += _coverage(intervals[p], horizon)
    else:  # pragma: no cover - validate() rejects this earlier
        raise ValueError(f"unknown correlation spec: {corr!r}")

    return np.vstack(decisions), [iv for iv in intervals if iv is not None]


def correlated_decisions(config: SimConfig) -> np.ndarray:
    """The (n, horizon+1) boolean matrix of per-tick truth decisions."""
    config.validate()
    return _build_predicates(config)[0]


def predicate_intervals(config: SimConfig) -> list[list[tuple[int, int]]]:
    """Interval placement for every process, independent of scheduling."""
    config.validate()
    return _build_predicates(config)[1]


# ---------------------------------------------------------------------------
# scheduling
# ---------------------------------------------------------------------------


def step_schedule(
    clocks: list[int],
    epsilon_app: int,
    advance_prob: float,
    horizon: int,
    rng: np.random.Generator,
) -> list[int]:
    """One scheduler step: the (ascending) list of advancing processes.

    Each unfinished process is selected with probability
    ``advance_prob`` unless blocked at the drift cap (clock equal to
    min + epsilon_app).  An empty selection falls back to the
    minimum-clock unfinished process so the run always makes progress.
    With epsilon_app == 0 every step advances all unfinished processes
    (lockstep is the only schedule that keeps spread at zero).

    Always consumes exactly one uniform draw per process.
    """
    coins = rng.random(len(clocks))
    live = [p for p, c in enumerate(clocks) if c < horizon]
    if epsilon_app == 0:
        return live
    cap = min(clocks) + epsilon_app
    picked = [p for p in live if clocks[p] < cap and coins[p] < advance_prob]
    if picked:
        return picked
    lo = min(clocks[p] for p in live)
    return [next(p for p in live if clocks[p] == lo)]


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def generate(config: SimConfig, *, record_schedule: bool = False) -> Trace:
    """Generate a complete trace; a pure function of ``config``.

    ``record_schedule`` additionally captures (clocks, advancing) per
    scheduler step, which costs memory linear in steps and is meant
    for small-horizon verification runs.
    """
    config.validate()
    n, horizon, delta = config.n, config.horizon, config.delta

    plans = predicate_intervals(config)
    send_ticks: list[list[int]] = []
    send_to: list[list[int]] = []
    for p in range(n):
        coins = _stream(config.seed, _S_SEND, p).random(horizon + 1) < config.alpha
        coins[0] = False
        ticks = np.flatnonzero(coins)
        raw = _stream(config.seed, _S_RECV, p).integers(0, n - 1, size=ticks.size)
        send_ticks.append([int(t) for t in ticks])
        send_to.append([int(r) + 1 if r >= p else int(r) for r in raw])

    sched_rng = _stream(config.seed, _S_SCHED)

    clocks = [0] * n
    vcs = [VectorClock.zero(n, p) for p in range(n)]
    hlcs = [HLCTimestamp.zero()] * n
    # in flight: per-receiver heap of (delivery threshold, send seq, sender,
    # send_pt, vc_send, hlc_send)
    pending: list[list[tuple[int, int, int, int, VectorClock, HLCTimestamp]]] = [
        [] for _ in range(n)
    ]
    open_iv: list[tuple[int, int, VectorClock, HLCTimestamp] | None] = [None] * n
    iptr = [0] * n
    sptr = [0] * n
    done: list[list[PredicateInterval]] = [[] for _ in range(n)]
    delivered: list[tuple[int, MessageRecord]] = []
    seq = 0
    log: list[tuple[tuple[int, ...], tuple[int, ...]]] | None = [] if record_schedule else None

    while min(clocks) < horizon:
        advancing = step_schedule(clocks, config.epsilon_app, config.advance_prob, horizon, sched_rng)
        if log is not None:
            log.append((tuple(clocks), tuple(advancing)))
        for p in advancing:
            v = clocks[p] + 1
            clocks[p] = v

            inbox = pending[p]
            while inbox and inbox[0][0] <= v:
                _, mseq, sender, send_pt, vc_s, hlc_s = heapq.heappop(inbox)
                vcs[p] = vcs[p].receive(vc_s)
                hlcs[p] = hlcs[p].receive(hlc_s, v)
                delivered.append(
                    (mseq, MessageRecord(sender, send_pt, p, v, vc_s, hlc_s, vcs[p], hlcs[p]))
                )

            plan = plans[p]
            k = iptr[p]
            if k < len(plan) and plan[k][0] == v:
                iptr[p] = k + 1
                vcs[p] = vcs[p].local_event()
                hlcs[p] = hlcs[p].advance(v)
                open_iv[p] = (plan[k][0], plan[k][1], vcs[p], hlcs[p])

            sp = sptr[p]
            if sp < len(send_ticks[p]) and send_ticks[p][sp] == v:
                sptr[p] = sp + 1
                vcs[p] = vcs[p].local_event()
                hlcs[p] = hlcs[p].advance(v)
                heapq.heappush(pending[send_to[p][sp]], (v + delta, seq, p, v, vcs[p], hlcs[p]))
                seq += 1

            iv = open_iv[p]
            if iv is not None and iv[1] == v:
                done[p].append(PredicateInterval(p, iv[0], iv[1], iv[2], vcs[p], iv[3]))
                open_iv[p] = None

    # point intervals that open and close on the same tick are finalized in
    # the loop above because the end check runs after the start check
    assert all(iv is None for iv in open_iv)
    delivered.sort(key=lambda t: t[0])
    return Trace(
        config=config,
        intervals=tuple(tuple(ivs) for ivs in done),
        messages=tuple(m for _, m in delivered),
        final_clocks=tuple(clocks),
        schedule_log=tuple(log) if log is not None else None,
    )


# ---------------------------------------------------------------------------
# line-record export
# ---------------------------------------------------------------------------


def _fmt_vc(vc: VectorClock) -> str:
    return ",".join(str(e) for e in vc.entries)


def _fmt_hlc(ts: HLCTimestamp) -> str:
    return f"{ts.l},{ts.c}"


def trace_records(trace: Trace) -> Iterator[str]:
    """Flat key-value line records: intervals (by process), then messages
    (in send order).  Stamps are those of the opening/send event."""
    for ivs in trace.intervals:
        for iv in ivs:
            yield (
                f"kind=interval proc={iv.proc} start={iv.start} end={iv.end} "
                f"vc={_fmt_vc(iv.vc_start)} hlc={_fmt_hlc(iv.hlc_start)}"
            )
    for m in trace.messages:
        yield (
            f"kind=message sender={m.sender} send_pt={m.send_pt} "
            f"receiver={m.receiver} receive_pt={m.receive_pt} "
            f"vc={_fmt_vc(m.vc_send)} hlc={_fmt_hlc(m.hlc_send)}"
        )


def write_trace(trace: Trace, out: IO[str]) -> None:
    for line in trace_records(trace):
        out.write(line + "\n")
