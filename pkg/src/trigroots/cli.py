"""Command-line front end: ``trigroots <subcommand> [options]``.

Settings are resolved as defaults < config file < environment < flags.  The
config file holds ``key = value`` lines (``#`` starts a comment) or a JSON
object; environment variables are the keys uppercased with the prefix
``TRIGROOTS_`` (e.g. ``TRIGROOTS_SEED=3``).  Every output carries a header
with the effective configuration, the package version and any overridden
values, so that replaying the header reproduces the data.

Exit status: 0 success, 1 bad input / failed precondition / failed
verification, 2 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .ensembles import EnsembleSpec, SeedSpec, sample_poly, validate
from .geometry import (
    VERDICT_NAMES,
    ParameterSchedule,
    classify,
    condition_t,
    is_exceptional,
    unstable_root_mass,
)
from .repulsion import ConditionWarning, empirical_smallball, gaussian_smallball, in_regime
from .rootcount import CertifiedCount, count_certified, count_screened, parse_domain
from .stats import (
    DEFAULT_EPS,
    AuditError,
    SweepIOError,
    persistence_counter,
    read_jsonl,
    run_sweep,
    summarize,
    tail_curve,
)
from .suites import SUITES, run_suite

ENV_PREFIX = "TRIGROOTS_"


class UsageError(Exception):
    pass


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(" ", "").split(",") if v]


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _domain(text):
    if text in (None, "torus", "half", "negative"):
        return text or "torus"
    lo, hi = _float_list(text)
    return (lo, hi)


# key -> (parser, default, help).  This is the documented config key list.
KEYS = {
    "n": (int, None, "degree"),
    "n_list": (_int_list, None, "comma separated degrees"),
    "ensemble": (str, "gaussian", "coefficient law, name or name(param)"),
    "seed": (int, 0, "master seed"),
    "trial": (int, 0, "trial index within the seed"),
    "trials": (int, 1000, "number of Monte Carlo trials"),
    "domain": (_domain, "torus", "torus, half ([0,pi]), negative, or lo,hi"),
    "path": (str, "fast", "sweep counter: fast or certified"),
    "threads": (int, 0, "worker threads (0: available CPUs)"),
    "certified": (_bool, False, "use the subdivision counter"),
    "format": (str, "json", "json or csv"),
    "out": (str, None, "output path ('-' for stdout)"),
    "eps": (float, 0.2, "target deviation eps"),
    "eps_list": (_float_list, list(DEFAULT_EPS), "comma separated tail levels"),
    "c0": (float, 1.0, "schedule constant"),
    "R": (float, None, "window constant (default from the schedule)"),
    "alpha": (float, 0.1, "small-ball level for |P(t)|"),
    "beta": (float, 0.1, "small-ball level for |P'(t)|/n"),
    "t": (float, 1.0, "evaluation angle in radians"),
    "tau": (float, 1.0 / 64.0, "Diophantine exponent"),
    "c0prime": (int, 16, "largest k in the Diophantine condition"),
    "suite": (str, "bernstein", f"one of {', '.join(SUITES)}"),
    "timed": (_bool, False, "store per-trial wall time in sweep records"),
    "unstable_only": (_bool, False, "geometry: emit only non-stable windows"),
    "inputs": (lambda v: v if isinstance(v, list) else [v], [], "JSONL files for report"),
    "plot_data": (str, None, "report: gnuplot tail table path"),
}

COMMANDS = {
    "sample": ["n", "ensemble", "seed", "trial", "format", "out"],
    "count": ["n", "ensemble", "seed", "trial", "certified", "domain", "out"],
    "sweep": ["n", "n_list", "ensemble", "seed", "trials", "domain", "path", "threads", "out", "timed"],
    "tails": ["n_list", "ensemble", "seed", "trials", "eps_list", "threads", "out"],
    "repulsion": ["n", "t", "alpha", "beta", "ensemble", "trials", "seed", "tau", "c0prime", "out"],
    "geometry": ["n", "ensemble", "seed", "trial", "eps", "c0", "R", "out", "unstable_only"],
    "verify": ["suite", "trials", "seed", "out"],
    "report": ["inputs", "eps_list", "out", "plot_data"],
}

REQUIRED = {"sample": ["n"], "count": ["n"], "repulsion": ["n"], "geometry": ["n"]}


def _flag(key):
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trigroots", description="Random trigonometric polynomial laboratory")
    parser.add_argument("--version", action="version", version=f"trigroots {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, keys in COMMANDS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None, help="config file (key = value lines or JSON)")
        for key in keys:
            _, default, help_ = KEYS[key]
            if key == "inputs":
                sp.add_argument("inputs", nargs="*", default=argparse.SUPPRESS, help=help_)
                continue
            if KEYS[key][0] is _bool:
                sp.add_argument(_flag(key), dest=key, nargs="?", const="true",
                                default=argparse.SUPPRESS, help=help_)
            else:
                sp.add_argument(_flag(key), dest=key, default=argparse.SUPPRESS,
                                help=f"{help_} (default: {default})")
    return parser


def read_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return dict(json.loads(text))
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def resolve(command: str, flags: dict, env=None) -> tuple[dict, dict]:
    """Effective settings for ``command`` and a record of overridden values."""
    env = os.environ if env is None else env
    allowed = COMMANDS[command]
    layers = []
    cfg_path = flags.pop("config", None)
    if cfg_path:
        cfg = read_config(cfg_path)
        unknown = sorted(set(cfg) - set(KEYS))
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        layers.append(("config", cfg))
    env_layer = {}
    for key in KEYS:
        name = ENV_PREFIX + key.upper()
        if name in env:
            env_layer[key] = env[name]
    layers.append(("env", env_layer))
    layers.append(("flag", flags))

    settings = {k: KEYS[k][1] for k in allowed}
    origin: dict = {}
    overrides: dict = {}
    for source, layer in layers:
        for key, raw in layer.items():
            if key not in allowed:
                continue
            try:
                value = KEYS[key][0](raw) if raw is not None else None
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key} ({source}): {raw!r}: {exc}") from exc
            if key in origin and value != settings[key]:
                overrides.setdefault(key, {origin[key]: _jsonable(settings[key])})
                overrides[key][source] = _jsonable(value)
            settings[key] = value
            origin[key] = source
    for key in REQUIRED.get(command, []):
        if settings.get(key) is None:
            raise UsageError(f"{command} needs {_flag(key)}")
    return settings, overrides


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def make_header(command: str, settings: dict, overrides: dict) -> dict:
    return {
        "artifact": "trigroots",
        "version": __version__,
        "command": command,
        "config": {k: _jsonable(v) for k, v in sorted(settings.items())},
        "overrides": overrides,
    }


class Output:
    """Text sink for '-'/None (stdout) or a file path."""

    def __init__(self, target):
        self.target = target
        self.fh = None

    def __enter__(self):
        if self.target in (None, "-"):
            self.fh = sys.stdout
        else:
            self.fh = open(self.target, "w", encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()
        else:
            self.fh.flush()
        return False


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _threads(k: int) -> int:
    return k if k and k > 0 else (os.cpu_count() or 1)


def _ensemble(text) -> EnsembleSpec:
    spec = EnsembleSpec.parse(text)
    validate(spec, 10**5)
    return spec


# -- subcommands --------------------------------------------------------------

def cmd_sample(s, header):
    p = sample_poly(_ensemble(s["ensemble"]), s["n"], SeedSpec(s["seed"], s["trial"]))
    with Output(s["out"]) as fh:
        if s["format"] == "csv":
            fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
            fh.write(p.to_csv_row() + "\n")
        elif s["format"] == "json":
            fh.write(_dump({"header": header, "result": p.to_dict()}))
        else:
            raise UsageError("format must be json or csv")


def cmd_count(s, header):
    p = sample_poly(_ensemble(s["ensemble"]), s["n"], SeedSpec(s["seed"], s["trial"]))
    dom = s["domain"]
    parse_domain(dom)
    if s["certified"] or isinstance(dom, tuple):
        res = count_certified(p, dom).to_dict()
        res["count_path"] = "certified"
    else:
        c, ok = count_screened(p, domain=None if dom == "torus" else dom)
        if not ok:
            res = count_certified(p, None if dom == "torus" else dom).to_dict()
            res["count_path"] = "certified"
        else:
            res = CertifiedCount(c, ok).to_dict()
            res["count_path"] = "fast"
    with Output(s["out"]) as fh:
        fh.write(_dump({"header": header, "result": res}))


def cmd_sweep(s, header):
    spec = _ensemble(s["ensemble"])
    ns = s["n_list"] or ([s["n"]] if s["n"] is not None else None)
    if not ns:
        raise UsageError("sweep needs --n or --n-list")
    dom = s["domain"]
    if dom not in ("torus", "half", "negative"):
        raise UsageError("sweep domain must be torus, half or negative")
    out = s["out"]
    summaries = []
    for n in ns:
        if out in (None, "-"):
            sys.stdout.write(json.dumps({"header": header}, sort_keys=True) + "\n")
            recs = []
            for r in run_sweep(spec, n, s["trials"], dom, s["path"], s["seed"],
                               _threads(s["threads"]), timed=s["timed"]):
                sys.stdout.write(r.to_json() + "\n")
                recs.append(r)
        else:
            target = out if len(ns) == 1 else _suffixed(out, n)
            recs = list(run_sweep(spec, n, s["trials"], dom, s["path"], s["seed"],
                                  _threads(s["threads"]), sink=target, header=header,
                                  timed=s["timed"]))
        if len(recs) >= 30:
            summaries.append({k: v for k, v in summarize(recs).to_dict().items() if k != "tails"})
    for sm in summaries:
        sys.stderr.write(json.dumps(sm, sort_keys=True) + "\n")


def _suffixed(path, n):
    root, ext = os.path.splitext(path)
    return f"{root}_n{n}{ext or '.jsonl'}"


def cmd_tails(s, header):
    spec = _ensemble(s["ensemble"])
    ns = s["n_list"]
    if not ns:
        raise UsageError("tails needs --n-list")
    rows = []
    for n in ns:
        recs = list(run_sweep(spec, n, s["trials"], "torus", "fast", s["seed"], _threads(s["threads"])))
        for e, (p, se, ub) in tail_curve(recs, s["eps_list"]).items():
            rate = -math.log(p) / n if p > 0 else None
            rows.append([n, e, p, se, ub, rate, int(round(p * len(recs)))])
    with Output(s["out"]) as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "eps", "tail", "stderr", "upper95", "neglog_tail_over_n", "events"])
        w.writerows(rows)


def cmd_repulsion(s, header):
    spec = _ensemble(s["ensemble"])
    n, t, a, b = s["n"], s["t"], s["alpha"], s["beta"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditionWarning)
        est, se = empirical_smallball(spec, t, n, a, b, s["trials"], s["seed"], s["tau"], s["c0prime"])
    res = {
        "estimate": est,
        "stderr": se,
        "oracle": gaussian_smallball(t, n, a, b) if spec.name == "gaussian" else None,
        "ratio_to_alphabeta": est / (a * b),
        "condition_t": condition_t(t, n, s["tau"], s["c0prime"]),
        "in_regime": in_regime(n, a, b),
    }
    with Output(s["out"]) as fh:
        fh.write(_dump({"header": header, "result": res}))


def cmd_geometry(s, header):
    spec = _ensemble(s["ensemble"])
    n = s["n"]
    sched = ParameterSchedule(s["eps"], s["c0"], s["R"])
    p = sample_poly(spec, n, SeedSpec(s["seed"], s["trial"]))
    part = sched.partition(n)
    cls = classify(p, part, sched.alpha, sched.beta)
    exc = is_exceptional(cls, sched.delta)
    mass = unstable_root_mass(p, cls) if cls.decided else None
    out = s["out"] or f"geometry_n{n}_seed{s['seed']}_trial{s['trial']}.csv"
    try:
        with Output(out) as fh:
            _write_verdicts(fh, cls, header, s["unstable_only"])
    except OSError as exc_:
        raise SweepIOError(str(exc_), None) from exc_
    summary = {
        "header": header,
        "result": {
            "windows": part.size,
            "window_width": part.width,
            "unstable": cls.n_unstable,
            "undecided": cls.n_undecided,
            "unstable_fraction": cls.unstable_fraction,
            "exceptional": exc,
            "threshold_delta_n": sched.delta * n,
            "roots_unstable": None if mass is None else mass[0],
            "roots_stable": None if mass is None else mass[1],
            "schedule": {k: getattr(sched, k) for k in ("eps", "c0", "R", "delta", "alpha", "beta", "gamma", "tau")},
            "verdicts_csv": out,
        },
    }
    sys.stdout.write(_dump(summary))


def _write_verdicts(fh, cls, header, unstable_only):
    fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
    fh.write("index,lo,hi,verdict\n")
    e = cls.partition.edges.tolist()
    idx = np.arange(cls.verdicts.size)
    if unstable_only:
        idx = idx[cls.verdicts != 0]
    step = 1 << 16
    for s0 in range(0, idx.size, step):
        block = idx[s0 : s0 + step]
        fh.write("".join(
            f"{i},{e[i]!r},{e[i + 1]!r},{VERDICT_NAMES[v]}\n"
            for i, v in zip(block.tolist(), cls.verdicts[block].tolist())
        ))


def cmd_verify(s, header):
    res = run_suite(s["suite"], s["trials"], s["seed"])
    row = res.row()
    with Output(s["out"]) as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
    return 0 if res.passed else 1


def cmd_report(s, header):
    if not s["inputs"]:
        raise UsageError("report needs at least one JSONL file")
    groups: dict = {}
    for path in s["inputs"]:
        _, recs = read_jsonl(path)
        for r in recs:
            groups.setdefault(r.group, []).append(r)
    rows, plot = [], []
    for (n, ens, dom), recs in sorted(groups.items()):
        if len(recs) < 30:
            continue
        sm = summarize(recs, s["eps_list"])
        zeros, ub = persistence_counter(recs)
        rows.append([n, ens, dom, sm.trials, sm.mean, sm.mean_se, sm.mean / n, sm.variance,
                     sm.variance_se, sm.variance / n, sm.skew, sm.excess_kurtosis, sm.ks, zeros, ub])
        for e, (p, se, u) in tail_curve(recs, s["eps_list"]).items():
            plot.append((n, ens, dom, e, p, se, u))
    with Output(s["out"]) as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "ensemble", "domain", "trials", "mean", "mean_se", "mean_over_n", "variance",
                    "variance_se", "variance_over_n", "skew", "excess_kurtosis", "ks", "zero_root_trials",
                    "persistence_upper95"])
        w.writerows(rows)
    if s["plot_data"]:
        with Output(s["plot_data"]) as fh:
            fh.write("# n eps tail stderr upper95   (ensemble, domain in the block comment)\n")
            last = None
            for n, ens, dom, e, p, se, u in plot:
                if (n, ens, dom) != last:
                    if last is not None:
                        fh.write("\n\n")
                    fh.write(f"# n={n} ensemble={ens} domain={dom}\n")
                    last = (n, ens, dom)
                fh.write(f"{n} {e:g} {p:.10g} {se:.10g} {u:.10g}\n")


HANDLERS = {
    "sample": cmd_sample,
    "count": cmd_count,
    "sweep": cmd_sweep,
    "tails": cmd_tails,
    "repulsion": cmd_repulsion,
    "geometry": cmd_geometry,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv=None, env=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    flags = vars(args)
    command = flags.pop("command")
    try:
        settings, overrides = resolve(command, flags, env)
        header = make_header(command, settings, overrides)
        status = HANDLERS[command](settings, header)
        return int(status or 0)
    except (SweepIOError, OSError) as exc:
        last = getattr(exc, "last_durable", None)
        sys.stderr.write(f"trigroots: I/O error: {exc}" + (f" (last durable trial {last})" if last is not None else "") + "\n")
        return 2
    except (UsageError, ValueError, AuditError, ArithmeticError) as exc:
        sys.stderr.write(f"trigroots: {exc}\n")
        parser.print_usage(sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
