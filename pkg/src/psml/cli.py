"""Command line front end: closed forms, window tuning, and trace
experiments.

Commands fall into two families.  The analytic family (``analytic``,
``tune``) evaluates closed forms and prints ``name = value`` lines or a
bare number.  The data family (``simulate``, ``sweep``, ``prdiagram``,
``partial``, ``hlc-curve``) runs seeded experiments and emits rows as
CSV (default) or a structured JSON document via ``--format``; both
forms carry the full effective configuration, as ``# key = value``
header lines in CSV and as a ``config`` object in JSON.

Settings resolve as flag > config file (``--config``, flat
``key = value`` lines) > built-in default; the ``PSML_SEED``
environment variable supplies the seed when neither flag nor file
does.  ``--out`` writes through a temporary file and renames, so an
interrupted run never leaves a partial file.  Exit codes: 0 success,
2 invalid parameters or config, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import Any, Callable, Mapping, Sequence

from .analytic import (
    admissible_eps_mon,
    hlc_min_len_half_recall,
    hlc_recall,
    inflection_points,
    phase_transition,
    phi_interval,
    phi_point,
    pma_fpr_estimate,
    precision,
    recall,
    uncertainty_ratio,
)
from .metrics import (
    PRESETS,
    default_warmup,
    fpr_row,
    hlc_recall_curve,
    partial_predicate_experiment,
    pr_diagram,
    render_csv,
    sweep,
)
from .simkernel import (
    FixedLength,
    GeometricLength,
    PointLength,
    SimConfig,
    generate,
    trace_records,
)


# ---------------------------------------------------------------------------
# settings resolution
# ---------------------------------------------------------------------------


def _parse_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' comments and blanks ignored."""
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(
                        f"{path}:{lineno}: expected 'key = value', got {line!r}"
                    )
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    return values


def _conv_bare_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not a valid setting")
    return value


_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "n": int,
    "eps": _conv_bare_float,
    "eps_app": int,
    "eps_mon": _conv_bare_float,
    "eps_check": _conv_bare_float,
    "delta": int,
    "alpha": float,
    "beta": float,
    "ell": int,
    "geom_p": float,
    "horizon": int,
    "seed": int,
    "replicates": int,
    "warmup": int,
    "eta": float,
    "p": str,
    "g2": int,
    "p_ind": float,
    "p_dep": float,
    "jobs": int,
    "format": str,
    "mode": str,
}


class _Settings:
    """Flag > file > default lookup for one parsed invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = (
            _parse_config_file(args.config) if getattr(args, "config", None) else {}
        )
        unknown = set(self.file) - set(_CONVERTERS)
        if unknown:
            raise ValueError(
                "unknown config file keys: " + ", ".join(sorted(unknown))
            )

    def get(self, key: str, default: Any = None) -> Any:
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.file:
            return _CONVERTERS[key](self.file[key])
        return default

    def given(self, key: str) -> bool:
        return getattr(self.args, key, None) is not None or key in self.file

    def require(self, key: str, default: Any = None) -> Any:
        value = self.get(key, default)
        if value is None:
            flag = "--" + key.replace("_", "-")
            raise ValueError(f"missing required parameter {flag}")
        return value

    def seed(self) -> int:
        if self.given("seed"):
            return self.get("seed")
        env = os.environ.get("PSML_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise ValueError(f"PSML_SEED must be an integer, got {env!r}") from exc
        return 0


def _build_sim(settings: _Settings, defaults: Mapping[str, Any] | None = None) -> SimConfig:
    """Materialize a SimConfig from preset defaults plus flag/file values."""
    merged: dict[str, Any] = dict(defaults or {})
    for key in ("n", "eps_app", "delta", "alpha", "beta", "ell", "geom_p", "horizon"):
        if settings.given(key):
            merged[key] = settings.get(key)
    if "eps_app" in merged:
        merged["epsilon_app"] = merged.pop("eps_app")
    merged["seed"] = settings.seed()
    # an explicit interval choice replaces the preset's, never joins it
    if settings.given("ell"):
        merged.pop("geom_p", None)
    elif settings.given("geom_p"):
        merged.pop("ell", None)
    if "n" not in merged:
        raise ValueError("missing required parameter --n")
    if "epsilon_app" not in merged:
        raise ValueError("missing required parameter --eps-app")
    kwargs = dict(merged)
    n = kwargs.pop("n")
    epsilon_app = kwargs.pop("epsilon_app")
    ell = kwargs.pop("ell", None)
    geom_p = kwargs.pop("geom_p", None)
    if ell is not None and geom_p is not None:
        raise ValueError("give either --ell or --interval-geom, not both")
    if ell is not None:
        interval = PointLength() if ell == 1 else FixedLength(ell)
    elif geom_p is not None:
        interval = GeometricLength(geom_p)
    else:
        interval = PointLength()
    cfg = SimConfig(n=n, epsilon_app=epsilon_app, interval=interval, **kwargs)
    cfg.validate()
    return cfg


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        # scalar results print at full precision; tables round (render_csv)
        return repr(value)
    return str(value)


def _echo_config(cfg: SimConfig, **extra: Any) -> dict[str, Any]:
    interval = cfg.interval
    if isinstance(interval, GeometricLength):
        ell, geom_p = None, interval.p
    elif isinstance(interval, FixedLength):
        ell, geom_p = interval.length, None
    else:
        ell, geom_p = 1, None
    echo: dict[str, Any] = {
        "n": cfg.n,
        "eps_app": cfg.epsilon_app,
        "delta": cfg.delta,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "ell": ell,
        "geom_p": geom_p,
        "horizon": cfg.horizon,
        "seed": cfg.seed,
    }
    echo.update(extra)
    return echo


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return None
    if isinstance(value, tuple):
        return list(value)
    return value


def _render_rows(
    fmt: str,
    rows: Sequence[Mapping[str, Any]],
    columns: Sequence[str],
    config: Mapping[str, Any],
) -> str:
    if fmt == "csv":
        header = "".join(f"# {k} = {_fmt(v)}\n" for k, v in config.items())
        return header + render_csv(rows, columns)
    if fmt == "structured":
        payload = {
            "config": {k: _json_safe(v) for k, v in config.items()},
            "rows": [
                {k: _json_safe(row.get(k)) for k in columns} for row in rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError("format must be 'csv' or 'structured'")


def _deliver(text: str, out: str | None) -> None:
    """Print, or atomically replace ``out`` (write temp file, rename)."""
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".psml-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit_lines(pairs: Sequence[tuple[str, Any]], out: str | None) -> None:
    _deliver("".join(f"{k} = {_fmt(v)}\n" for k, v in pairs), out)


# ---------------------------------------------------------------------------
# analytic commands
# ---------------------------------------------------------------------------


def _cmd_analytic_phi(args: argparse.Namespace) -> int:
    s = _Settings(args)
    eps = s.require("eps")
    n = s.require("n")
    beta = s.require("beta")
    ell = s.get("ell", 1)
    value = phi_interval(eps, n, beta, ell) if ell != 1 else phi_point(eps, n, beta)
    _deliver(_fmt(value) + "\n", args.out)
    return 0


def _cmd_analytic_inflection(args: argparse.Namespace) -> int:
    s = _Settings(args)
    n = s.require("n")
    p1, p2 = inflection_points(n, s.require("beta"))
    pairs: list[tuple[str, Any]] = [("eps_p1", p1), ("eps_p2", p2)]
    if n > 2:
        # both points collapse to 0 at n = 2, so the ratio is undefined
        pairs.append(("uncertainty_ratio", uncertainty_ratio(n, s.require("beta"))))
    _emit_lines(pairs, args.out)
    return 0


def _cmd_analytic_pr(args: argparse.Namespace) -> int:
    s = _Settings(args)
    eps_mon = s.require("eps_mon")
    eps_app = s.require("eps_app")
    n, beta, ell = s.require("n"), s.require("beta"), s.get("ell", 1)
    _emit_lines(
        [
            ("precision", precision(eps_mon, eps_app, n, beta, ell)),
            ("recall", recall(eps_mon, eps_app, n, beta, ell)),
        ],
        args.out,
    )
    return 0


def _cmd_analytic_bound(args: argparse.Namespace) -> int:
    s = _Settings(args)
    interval = admissible_eps_mon(
        s.require("eps_app"), s.require("n"), s.require("beta"),
        s.get("ell", 1), s.require("eta"),
    )
    _emit_lines(
        [
            ("lo", interval.lo),
            ("hi", interval.hi),
            ("empty", interval.empty),
            ("unbounded_hi", interval.unbounded_hi),
        ],
        args.out,
    )
    return 0


def _cmd_analytic_phase(args: argparse.Namespace) -> int:
    s = _Settings(args)
    value = phase_transition(
        s.require("n"), s.require("beta"), s.get("ell", 1), s.require("eta")
    )
    _deliver(_fmt(value) + "\n", args.out)
    return 0


def _cmd_analytic_hlc_recall(args: argparse.Namespace) -> int:
    s = _Settings(args)
    value = hlc_recall(
        s.require("eps_app"), s.require("n"), s.require("beta"), s.get("ell", 1)
    )
    _deliver(_fmt(value) + "\n", args.out)
    return 0


def _cmd_analytic_hlc_minlen(args: argparse.Namespace) -> int:
    s = _Settings(args)
    value = hlc_min_len_half_recall(s.require("eps_app"), s.require("n"), s.require("beta"))
    _deliver(_fmt(value) + "\n", args.out)
    return 0


def _cmd_analytic_pma_est(args: argparse.Namespace) -> int:
    s = _Settings(args)
    value = pma_fpr_estimate(
        s.require("eps"), s.require("g2"), s.require("beta"), s.require("p_ind")
    )
    _deliver(_fmt(value) + "\n", args.out)
    return 0


def _cmd_tune(args: argparse.Namespace) -> int:
    s = _Settings(args)
    eps_app = s.require("eps_app")
    n, beta = s.require("n"), s.require("beta")
    ell, eta = s.get("ell", 1), s.require("eta")
    interval = admissible_eps_mon(eps_app, n, beta, ell, eta)
    pairs: list[tuple[str, Any]] = [
        ("eps_app", eps_app),
        ("n", n),
        ("beta", beta),
        ("ell", ell),
        ("eta", eta),
    ]
    if eta < 1.0:
        # the threshold is only defined for targets strictly below 1; at
        # eta = 1 the interval below is the single point eps_app anyway
        threshold = phase_transition(n, beta, ell, eta)
        pairs += [
            ("phase_transition", threshold),
            ("hypersensitive", eps_app <= threshold),
        ]
    if interval.empty:
        # no window satisfies both targets; offer the one-sided picks
        pairs += [
            ("admissible", "empty"),
            ("recall_first_eps_mon", interval.lo),
            ("recall_first_precision", precision(interval.lo, eps_app, n, beta, ell)),
            ("precision_first_eps_mon", interval.hi),
            ("precision_first_recall", recall(interval.hi, eps_app, n, beta, ell)),
        ]
    else:
        hi = "inf" if interval.unbounded_hi else _fmt(interval.hi)
        closer = ")" if interval.unbounded_hi else "]"
        pairs.append(("admissible", f"[{_fmt(interval.lo)}, {hi}{closer}"))
    _emit_lines(pairs, args.out)
    return 0


# ---------------------------------------------------------------------------
# data commands
# ---------------------------------------------------------------------------


def _preset_spec(name: str | None, kind: str, default: str | None = None) -> dict[str, Any] | None:
    if name is None:
        name = default
    if name is None:
        return None
    spec = PRESETS.get(name)
    if spec is None:
        raise ValueError(f"unknown preset {name!r}; choices: {', '.join(sorted(PRESETS))}")
    if spec["kind"] != kind:
        raise ValueError(f"preset {name!r} does not apply to this command")
    return spec


def _cmd_simulate(args: argparse.Namespace) -> int:
    s = _Settings(args)
    cfg = _build_sim(s)
    eps_check = s.get("eps_check", float(cfg.epsilon_app))
    warmup = s.get("warmup")
    row = fpr_row(cfg, eps_check, warmup)
    if args.trace_out is not None:
        # regenerating is cheap and the seed makes it the same trace
        lines = "".join(line + "\n" for line in trace_records(generate(cfg)))
        _deliver(lines, args.trace_out)
    echo = _echo_config(
        cfg, command="simulate", eps_check=eps_check, warmup=row.warmup
    )
    text = _render_rows(s.get("format", "csv"), [row.as_dict()], list(row.as_dict()), echo)
    _deliver(text, args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    s = _Settings(args)
    spec = _preset_spec(args.preset, "sweep")
    if spec is None:
        raise ValueError("sweep requires --preset (fig-fpr-n20 or fig-ad-independence)")
    defaults = dict(spec["base"])
    grid: dict[str, list[Any]] = {}
    for axis, values in spec["grid"].items():
        # axes swept by the grid override per row, so the base value is
        # only a placeholder; an explicit flag pins the axis instead
        defaults.setdefault(axis, values[0])
        key = "eps_app" if axis == "epsilon_app" else axis
        grid[axis] = [s.get(key)] if s.given(key) else list(values)
    base = _build_sim(s, defaults)
    seed0 = s.seed()
    if s.given("replicates"):
        seeds = [seed0 + i for i in range(s.get("replicates"))]
    else:
        seeds = [seed0 + i for i in spec["seeds"]]
    warmup = s.get("warmup", spec.get("warmup"))
    jobs = s.get("jobs", 1)
    rows = sweep(base, grid, seeds, warmup=warmup, jobs=jobs)
    echo = _echo_config(
        base,
        command="sweep",
        preset=args.preset,
        seeds=tuple(seeds),
        warmup=warmup if warmup is not None else default_warmup(base),
        jobs=jobs,
    )
    for axis, values in grid.items():
        echo[f"grid_{axis}"] = tuple(values)
    dicts = [r.as_dict() for r in rows]
    text = _render_rows(s.get("format", "csv"), dicts, list(dicts[0]), echo)
    _deliver(text, args.out)
    return 0


def _cmd_prdiagram(args: argparse.Namespace) -> int:
    s = _Settings(args)
    spec = _preset_spec(args.preset, "prdiagram", default="fig-pr-diagram")
    eps_mon_values = args.eps_mon_list if args.eps_mon_list is not None else spec["eps_mon"]
    eps_apps = args.eps_app_list if args.eps_app_list is not None else spec["eps_app"]
    defaults = dict(spec["base"])
    defaults.setdefault("epsilon_app", eps_apps[0])
    base = _build_sim(s, defaults)
    mode = s.get("mode", "analytic")
    replicates = s.get("replicates", spec["replicates"])
    warmup = s.get("warmup")
    rows = pr_diagram(base, eps_mon_values, eps_apps, mode, replicates, warmup)
    echo = _echo_config(
        base,
        command="prdiagram",
        mode=mode,
        replicates=replicates,
        eps_mon_values=tuple(eps_mon_values),
        eps_app_values=tuple(eps_apps),
    )
    columns = ["eps_mon", "eps_app", "precision", "recall", "flags"]
    text = _render_rows(s.get("format", "csv"), rows, columns, echo)
    _deliver(text, args.out)
    return 0


def _cmd_partial(args: argparse.Namespace) -> int:
    s = _Settings(args)
    spec = _preset_spec(args.preset, "partial", default="table-partial")
    base = _build_sim(s, spec["base"])
    if s.given("p"):
        raw = s.get("p")
        p_values = raw if isinstance(raw, list) else _int_list(raw)
    else:
        p_values = spec["p"]
    replicates = s.get("replicates", spec["replicates"])
    rows = []
    for p in p_values:
        frac = partial_predicate_experiment(base, p, replicates)
        flags = ("undefined",) if math.isnan(frac) else ()
        rows.append({"p": p, "fraction": frac, "flags": flags})
    echo = _echo_config(
        base, command="partial", replicates=replicates, p_values=tuple(p_values)
    )
    text = _render_rows(s.get("format", "csv"), rows, ["p", "fraction", "flags"], echo)
    _deliver(text, args.out)
    return 0


def _cmd_hlc_curve(args: argparse.Namespace) -> int:
    s = _Settings(args)
    spec = _preset_spec(args.preset, "hlc", default="fig-hlc")
    base = _build_sim(s, spec["base"])
    ell_values = args.ell_list if args.ell_list is not None else spec["ell"]
    replicates = s.get("replicates", spec["replicates"])
    curve = hlc_recall_curve(base, ell_values, replicates)
    rows = []
    for ell, sim, closed in curve:
        flags = ("undefined",) if math.isnan(sim) else ()
        rows.append(
            {"ell": ell, "recall_sim": sim, "recall_analytic": closed, "flags": flags}
        )
    echo = _echo_config(
        base, command="hlc-curve", replicates=replicates, ell_values=tuple(ell_values)
    )
    columns = ["ell", "recall_sim", "recall_analytic", "flags"]
    text = _render_rows(s.get("format", "csv"), rows, columns, echo)
    _deliver(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


_FLAG_SPECS: dict[str, tuple[tuple[str, ...], dict[str, Any]]] = {
    "n": (("--n",), {"type": int, "help": "number of processes (count)"}),
    "eps": (("--eps",), {"type": float, "help": "clock window (ticks)"}),
    "eps_app": (
        ("--eps-app",),
        {"type": int, "dest": "eps_app", "help": "application clock window (ticks)"},
    ),
    "eps_mon": (
        ("--eps-mon",),
        {"type": float, "dest": "eps_mon", "help": "monitor clock window (ticks)"},
    ),
    "eps_check": (
        ("--eps-check",),
        {"type": float, "dest": "eps_check", "help": "window classifying cuts (ticks, default: eps-app)"},
    ),
    "delta": (("--delta",), {"type": int, "help": "message delivery delay (ticks)"}),
    "alpha": (("--alpha",), {"type": float, "help": "per-tick message probability (0..1)"}),
    "beta": (("--beta",), {"type": float, "help": "per-tick predicate probability (0..1)"}),
    "ell": (("--ell",), {"type": int, "help": "fixed predicate interval length (ticks)"}),
    "geom_p": (
        ("--interval-geom",),
        {"type": float, "dest": "geom_p", "metavar": "P", "help": "geometric interval length parameter (probability 0..1)"},
    ),
    "horizon": (("--horizon",), {"type": int, "help": "trace length (ticks)"}),
    "seed": (("--seed",), {"type": int, "help": "base RNG seed (integer, default: $PSML_SEED or 0)"}),
    "replicates": (("--replicates",), {"type": int, "help": "seeded repetitions (count)"}),
    "warmup": (("--warmup",), {"type": int, "help": "discarded trace prefix (ticks, default: horizon/20)"}),
    "eta": (("--eta",), {"type": float, "help": "accuracy target (probability in (0, 1])"}),
    "g2": (("--g2",), {"type": int, "help": "follower group size (count)"}),
    "p_ind": (
        ("--p-ind",),
        {"type": float, "dest": "p_ind", "help": "independent-firing probability (0..1)"},
    ),
    "jobs": (("--jobs",), {"type": int, "help": "worker processes (count, default 1)"}),
    "config": (("--config",), {"help": "flat key = value settings file"}),
    "out": (("--out",), {"help": "write output to this file atomically"}),
    "format": (
        ("--format",),
        {"choices": ("csv", "structured"), "help": "output format (default csv)"},
    ),
}


def _add_flags(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        flags, kwargs = _FLAG_SPECS[name]
        parser.add_argument(*flags, default=None, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psml",
        description="Accuracy laboratory for conjunctive-predicate monitors "
        "under partial synchrony.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    analytic = sub.add_parser(
        "analytic", help="evaluate closed forms", description="Closed-form values."
    )
    asub = analytic.add_subparsers(dest="form", required=True, metavar="form")

    phi = asub.add_parser("phi", help="detection-window consistency probability")
    _add_flags(phi, "eps", "n", "beta", "ell", "config", "out")
    phi.set_defaults(func=_cmd_analytic_phi)

    infl = asub.add_parser("inflection", help="transition-band endpoints")
    _add_flags(infl, "n", "beta", "config", "out")
    infl.set_defaults(func=_cmd_analytic_inflection)

    pr = asub.add_parser("pr", help="precision and recall of a monitor window")
    _add_flags(pr, "eps_mon", "eps_app", "n", "beta", "ell", "config", "out")
    pr.set_defaults(func=_cmd_analytic_pr)

    bound = asub.add_parser("bound", help="admissible monitor-window interval")
    _add_flags(bound, "eps_app", "n", "beta", "ell", "eta", "config", "out")
    bound.set_defaults(func=_cmd_analytic_bound)

    phase = asub.add_parser("phase", help="hypersensitivity threshold on eps-app")
    _add_flags(phase, "n", "beta", "ell", "eta", "config", "out")
    phase.set_defaults(func=_cmd_analytic_phase)

    hrec = asub.add_parser("hlc-recall", help="scalar-clock monitor recall")
    _add_flags(hrec, "eps_app", "n", "beta", "ell", "config", "out")
    hrec.set_defaults(func=_cmd_analytic_hlc_recall)

    hmin = asub.add_parser("hlc-minlen", help="interval length for recall 1/2")
    _add_flags(hmin, "eps_app", "n", "beta", "config", "out")
    hmin.set_defaults(func=_cmd_analytic_hlc_minlen)

    pma = asub.add_parser("pma-est", help="false-positive estimate under correlation")
    _add_flags(pma, "eps", "g2", "beta", "p_ind", "config", "out")
    pma.set_defaults(func=_cmd_analytic_pma_est)

    tune = sub.add_parser(
        "tune",
        help="pick a monitor window for an accuracy target",
        description="Report the admissible window interval, the "
        "hypersensitivity verdict, and one-sided fallbacks when no window "
        "meets both targets.",
    )
    _add_flags(tune, "eps_app", "n", "beta", "ell", "eta", "config", "out")
    tune.set_defaults(func=_cmd_tune)

    sim = sub.add_parser("simulate", help="one seeded false-positive experiment")
    _add_flags(
        sim, "n", "eps_app", "eps_check", "delta", "alpha", "beta", "ell",
        "geom_p", "horizon", "seed", "warmup", "config", "out", "format",
    )
    sim.add_argument("--eps", type=int, dest="eps_app", help=argparse.SUPPRESS)
    sim.add_argument(
        "--trace-out",
        dest="trace_out",
        metavar="FILE",
        help="also write the generated trace as line records to FILE",
    )
    sim.set_defaults(func=_cmd_simulate)

    sw = sub.add_parser("sweep", help="preset-driven false-positive sweeps")
    sw.add_argument("--preset", choices=[k for k, v in PRESETS.items() if v["kind"] == "sweep"])
    _add_flags(
        sw, "n", "eps_app", "delta", "alpha", "beta", "ell", "geom_p",
        "horizon", "seed", "replicates", "warmup", "jobs", "config", "out", "format",
    )
    sw.set_defaults(func=_cmd_sweep)

    prd = sub.add_parser("prdiagram", help="precision/recall over a window grid")
    prd.add_argument("--preset", choices=[k for k, v in PRESETS.items() if v["kind"] == "prdiagram"])
    prd.add_argument("--mode", choices=("analytic", "simulated"), default=None)
    prd.add_argument("--eps-mon", type=_int_list, dest="eps_mon_list", metavar="LIST",
                     default=None, help="comma-separated monitor windows (ticks)")
    prd.add_argument("--eps-app", type=_int_list, dest="eps_app_list", metavar="LIST",
                     default=None, help="comma-separated application windows (ticks)")
    _add_flags(
        prd, "n", "delta", "alpha", "beta", "ell", "horizon", "seed",
        "replicates", "warmup", "config", "out", "format",
    )
    prd.set_defaults(func=_cmd_prdiagram)

    part = sub.add_parser("partial", help="p-of-n detection fractions, quasi vs partial sync")
    part.add_argument("--preset", choices=[k for k, v in PRESETS.items() if v["kind"] == "partial"])
    part.add_argument("--p", dest="p", metavar="LIST", default=None,
                      help="comma-separated conjunct counts p (each in 1..n)")
    _add_flags(
        part, "n", "eps_app", "delta", "alpha", "beta", "ell", "geom_p",
        "horizon", "seed", "replicates", "config", "out", "format",
    )
    part.set_defaults(func=_cmd_partial)

    hlc = sub.add_parser("hlc-curve", help="quasi-monitor recall vs interval length")
    hlc.add_argument("--preset", choices=[k for k, v in PRESETS.items() if v["kind"] == "hlc"])
    hlc.add_argument("--ell", type=_int_list, dest="ell_list", metavar="LIST",
                     default=None, help="comma-separated interval lengths (ticks)")
    _add_flags(
        hlc, "n", "eps_app", "delta", "alpha", "beta", "horizon", "seed",
        "replicates", "config", "out", "format",
    )
    hlc.set_defaults(func=_cmd_hlc_curve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"psml: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        print(f"psml: runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
