"""Command-line driver: ``entropy-lab <command> --config job.json``.

Commands: exact, asym, spectrum, duality-check, complement-check,
oracle-check, scan, fit, maximize, constants.

Exit status: 0 success, 1 invalid input, 2 numerical failure or a check
whose tolerance was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import analysis, asymptotics, oracle
from .blocks import BlockError, Configuration, canonicalize, complement, random_configuration
from .entropy import entanglement_spectrum, renyi

COMMANDS = (
    "exact",
    "asym",
    "spectrum",
    "duality-check",
    "complement-check",
    "oracle-check",
    "scan",
    "fit",
    "maximize",
    "constants",
)
HEADER = ("n", "alpha", "command", "value", "prediction", "error", "regime", "seconds")


class JobSpecError(ValueError):
    """Malformed job file; the message starts with the offending field path."""


class CheckFailed(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# job specification
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "n", "n_list", "sites", "modes", "r", "s", "gamma_x", "gamma_p", "site_fractions",
    "mode_fractions", "alpha_list", "path", "regime", "grid_resolution", "kmax",
    "nu_candidates", "seed", "max_count", "samples", "n_min", "n_max", "tol",
    "exponent_hint", "scan_file", "timing",
}


def _number(value, where):
    if isinstance(value, bool):
        raise JobSpecError(f"{where}: expected a number, got {value!r}")
    try:
        return Fraction(value) if isinstance(value, str) else value
    except (ValueError, ZeroDivisionError):
        raise JobSpecError(f"{where}: cannot parse {value!r} as a number") from None


def _positive_int(value, where, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise JobSpecError(f"{where}: expected an integer >= {minimum}, got {value!r}")
    return value


def _intervals(value, where):
    if not isinstance(value, list):
        raise JobSpecError(f"{where}: expected a list of [start, end) pairs")
    out = []
    for i, item in enumerate(value):
        if (
            not isinstance(item, list) or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise JobSpecError(f"{where}[{i}]: expected an integer pair [start, end), got {item!r}")
        out.append(tuple(item))
    return out


@dataclass
class JobSpec:
    n_list: list[int] = field(default_factory=list)
    sites: list | None = None
    modes: list | None = None
    family: analysis.BlockFamily | None = None
    alpha_list: list[float] = field(default_factory=lambda: [1.0])
    options: dict[str, Any] = field(default_factory=dict)

    def option(self, key, default=None):
        return self.options.get(key, default)

    def configurations(self):
        """``(n, Configuration)`` for every requested chain length."""
        if not self.n_list:
            raise JobSpecError("jobspec.n: required for this command")
        out = []
        for i, n in enumerate(self.n_list):
            where = "jobspec.n" if len(self.n_list) == 1 else f"jobspec.n_list[{i}]"
            try:
                if self.sites is not None:
                    c = Configuration(
                        n, _canon(self.sites, n, "jobspec.sites"), _canon(self.modes, n, "jobspec.modes")
                    )
                elif self.family is not None:
                    c = self.family.configuration(n)
                else:
                    raise JobSpecError("jobspec.sites: give sites/modes intervals or r, s, gamma_x, gamma_p")
            except BlockError as exc:
                raise JobSpecError(f"{where}: {exc}") from None
            out.append((n, c))
        return out

    def require_family(self) -> analysis.BlockFamily:
        if self.family is None:
            raise JobSpecError("jobspec.r: this command needs r, s, gamma_x, gamma_p (or *_fractions)")
        return self.family


def _canon(raw, n, where):
    try:
        return canonicalize(raw, n)
    except BlockError as exc:
        raise JobSpecError(f"{where}: {exc}") from None


def parse_jobspec(doc: dict) -> JobSpec:
    if not isinstance(doc, dict):
        raise JobSpecError("jobspec: top level must be a JSON object")
    unknown = sorted(set(doc) - _KNOWN_KEYS)
    if unknown:
        raise JobSpecError(f"jobspec.{unknown[0]}: unknown key")
    spec = JobSpec()
    if "n" in doc and "n_list" in doc:
        raise JobSpecError("jobspec.n_list: give either n or n_list, not both")
    if "n" in doc:
        spec.n_list = [_positive_int(doc["n"], "jobspec.n")]
    elif "n_list" in doc:
        if not isinstance(doc["n_list"], list) or not doc["n_list"]:
            raise JobSpecError("jobspec.n_list: expected a nonempty list of integers")
        spec.n_list = [_positive_int(v, f"jobspec.n_list[{i}]") for i, v in enumerate(doc["n_list"])]

    if ("sites" in doc) != ("modes" in doc):
        missing = "modes" if "sites" in doc else "sites"
        raise JobSpecError(f"jobspec.{missing}: sites and modes must be given together")
    if "sites" in doc:
        spec.sites = _intervals(doc["sites"], "jobspec.sites")
        spec.modes = _intervals(doc["modes"], "jobspec.modes")

    fam_keys = {"r", "s", "gamma_x", "gamma_p"}
    if fam_keys & set(doc):
        missing = sorted(fam_keys - set(doc))
        if missing:
            raise JobSpecError(f"jobspec.{missing[0]}: required with the other family parameters")
        r = _positive_int(doc["r"], "jobspec.r")
        s = _positive_int(doc["s"], "jobspec.s")
        gx = _number(doc["gamma_x"], "jobspec.gamma_x")
        gp = _number(doc["gamma_p"], "jobspec.gamma_p")
        try:
            spec.family = analysis.BlockFamily.symmetric(r, s, Fraction(gx), Fraction(gp))
        except (BlockError, TypeError) as exc:
            raise JobSpecError(f"jobspec.gamma_x: {exc}") from None
    elif "site_fractions" in doc or "mode_fractions" in doc:
        try:
            spec.family = analysis.BlockFamily(
                tuple(tuple(Fraction(x) for x in p) for p in doc.get("site_fractions", [])),
                tuple(tuple(Fraction(x) for x in p) for p in doc.get("mode_fractions", [])),
            )
        except (BlockError, TypeError, ValueError) as exc:
            raise JobSpecError(f"jobspec.site_fractions: {exc}") from None

    if "alpha_list" in doc:
        spec.alpha_list = _alphas(doc["alpha_list"], "jobspec.alpha_list")
    for key in ("grid_resolution", "kmax", "max_count", "samples", "n_min", "n_max"):
        if key in doc:
            spec.options[key] = _positive_int(doc[key], f"jobspec.{key}", minimum=0)
    if "seed" in doc:
        spec.options["seed"] = _positive_int(doc["seed"], "jobspec.seed", minimum=0)
    for key in ("tol", "exponent_hint"):
        if key in doc:
            spec.options[key] = float(_number(doc[key], f"jobspec.{key}"))
    if "nu_candidates" in doc:
        if not isinstance(doc["nu_candidates"], list):
            raise JobSpecError("jobspec.nu_candidates: expected a list of numbers")
        spec.options["nu_candidates"] = [
            float(_number(v, f"jobspec.nu_candidates[{i}]")) for i, v in enumerate(doc["nu_candidates"])
        ]
    if "path" in doc:
        if doc["path"] not in ("direct", "dual", "auto"):
            raise JobSpecError(f"jobspec.path: expected direct|dual|auto, got {doc['path']!r}")
        spec.options["path"] = doc["path"]
    if "regime" in doc:
        try:
            spec.options["regime"] = asymptotics.Regime(doc["regime"]).value
        except ValueError:
            names = "|".join(r.value for r in asymptotics.Regime)
            raise JobSpecError(f"jobspec.regime: expected {names}, got {doc['regime']!r}") from None
    if "scan_file" in doc:
        spec.options["scan_file"] = str(doc["scan_file"])
    if "timing" in doc:
        spec.options["timing"] = bool(doc["timing"])
    return spec


def _alphas(values, where):
    if not isinstance(values, list) or not values:
        raise JobSpecError(f"{where}: expected a nonempty list")
    out = []
    for i, v in enumerate(values):
        a = float(_number(v, f"{where}[{i}]"))
        if not a > 0:
            raise JobSpecError(f"{where}[{i}]: Rényi order must be positive, got {v!r}")
        out.append(a)
    return out


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def write_records(records, sink, fmt="csv"):
    if fmt == "csv":
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(HEADER)
        for rec in records:
            w.writerow([_fmt(rec.get(k)) for k in HEADER])
    else:
        rows = []
        for rec in records:
            rows.append({k: (float(_fmt(v)) if isinstance(v, (float, np.floating)) else v)
                         for k, v in ((k, rec.get(k)) for k in HEADER)})
        json.dump(rows, sink, indent=1)
        sink.write("\n")


def read_records(path):
    """Load records written by :func:`write_records` (CSV or JSON)."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return json.loads(text)
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        rec = {}
        for k in HEADER:
            v = row.get(k, "")
            if v == "":
                rec[k] = None
            elif k == "n":
                rec[k] = int(v)
            elif k in ("command", "regime"):
                rec[k] = v
            else:
                rec[k] = float(v)
        out.append(rec)
    return out


def _rec(command, n=None, alpha=None, value=None, prediction=None, error=None, regime=None, seconds=None):
    return dict(
        n=n, alpha=alpha, command=command, value=value, prediction=prediction,
        error=error, regime=regime, seconds=seconds,
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_exact(spec, ctx):
    path = spec.option("path", "auto")
    out = []
    for n, c in spec.configurations():
        for a in spec.alpha_list:
            t0 = time.perf_counter()
            val = renyi(c, a, path)
            out.append(_rec("exact", n, a, val, regime=path, seconds=ctx.clock(t0)))
    return out


def _cmd_asym(spec, ctx):
    regime = spec.option("regime", "general")
    out = []
    for n, c in spec.configurations():
        for a in spec.alpha_list:
            try:
                pred = asymptotics.predict(c, a, regime)
            except ValueError as exc:
                raise JobSpecError(f"jobspec.regime: {exc}") from None
            out.append(_rec("asym", n, a, pred.value, prediction=pred.value, regime=pred.regime.value))
    return out


def _cmd_spectrum(spec, ctx):
    k = spec.option("max_count", 16)
    if k < 1:
        raise JobSpecError("jobspec.max_count: must be at least 1")
    out = []
    for n, c in spec.configurations():
        for i, lam in enumerate(entanglement_spectrum(c, k)):
            out.append(_rec("spectrum", n, value=float(lam), regime=f"rank={i}"))
    return out


def _check_population(spec, ctx, n_max_default, n_min_default=2):
    if spec.sites is not None or spec.family is not None:
        return [c for _, c in spec.configurations()]
    rng = np.random.default_rng(ctx.seed)
    lo = spec.option("n_min", n_min_default)
    hi = spec.option("n_max", n_max_default)
    if lo < 2 or hi < lo:
        raise JobSpecError(f"jobspec.n_min: need 2 <= n_min <= n_max, got {lo}, {hi}")
    samples = spec.option("samples", 20)
    return [random_configuration(rng, int(rng.integers(lo, hi + 1))) for _ in range(samples)]


def _tolerance_check(records, tol, name):
    worst = max((abs(r["error"]) for r in records), default=0.0)
    if worst >= tol:
        raise CheckFailed(f"{name}: max deviation {worst:.3e} exceeds tolerance {tol:.1e}")


def _cmd_duality(spec, ctx):
    tol = spec.option("tol", 1e-8)
    out = []
    for c in _check_population(spec, ctx, 64):
        for a in spec.alpha_list:
            s1, s2 = renyi(c, a, "direct"), renyi(c, a, "dual")
            out.append(_rec("duality-check", c.n, a, s1, s2, s1 - s2, ctx.seed_tag))
    ctx.pending = (out, tol, "duality-check")
    return out


def _cmd_complement(spec, ctx):
    tol = spec.option("tol", 1e-8)
    out = []
    for c in _check_population(spec, ctx, 64):
        for a in spec.alpha_list:
            s0 = renyi(c, a)
            if c.trivial:
                continue
            sa = renyi(c.with_sites(complement(c.sites)), a)
            sk = renyi(c.with_modes(complement(c.modes)), a)
            out.append(_rec("complement-check", c.n, a, s0, sa, s0 - sa, ctx.seed_tag + ";sites"))
            out.append(_rec("complement-check", c.n, a, s0, sk, s0 - sk, ctx.seed_tag + ";modes"))
    ctx.pending = (out, tol, "complement-check")
    return out


def _cmd_oracle(spec, ctx):
    tol = spec.option("tol", 1e-9)
    out = []
    for c in _check_population(spec, ctx, 12, 6):
        if c.n > oracle.MAX_SITES:
            raise JobSpecError(f"jobspec.n: oracle supports n <= {oracle.MAX_SITES}, got {c.n}")
        v = oracle.fock_state(c.n, c.modes)
        for a in spec.alpha_list:
            s1, s2 = renyi(c, a), oracle.renyi_oracle(v, c.sites, a)
            out.append(_rec("oracle-check", c.n, a, s1, s2, s1 - s2, ctx.seed_tag))
    ctx.pending = (out, tol, "oracle-check")
    return out


def _scan(spec, ctx):
    fam = spec.require_family()
    if not spec.n_list:
        raise JobSpecError("jobspec.n_list: required for scans")
    try:
        return analysis.error_scan(fam, spec.n_list, spec.alpha_list, threads=ctx.threads)
    except BlockError as exc:
        raise JobSpecError(f"jobspec.n_list: {exc}") from None


def _cmd_scan(spec, ctx):
    series = _scan(spec, ctx)
    return [
        _rec("scan", r.n, r.alpha, r.exact, r.prediction, r.error, "general",
             r.wall_time if ctx.timing else None)
        for r in series.records
    ]


def _series_from_file(path, family):
    try:
        rows = read_records(path)
    except (OSError, ValueError) as exc:
        raise JobSpecError(f"jobspec.scan_file: {exc}") from None
    recs = [
        analysis.ScanRecord(int(r["n"]), float(r["alpha"]), r["value"], r["prediction"], r["error"], 0.0)
        for r in rows if r.get("command") == "scan"
    ]
    if not recs:
        raise JobSpecError("jobspec.scan_file: no scan records found")
    return analysis.ScanSeries(sorted(recs, key=lambda r: (r.alpha, r.n)), family)


def _cmd_fit(spec, ctx):
    if "scan_file" in spec.options:
        series = _series_from_file(spec.option("scan_file"), spec.family)
    else:
        series = _scan(spec, ctx)
    kmax = spec.option("kmax", 2)
    out = []
    for a in series.alphas():
        sub = series.for_alpha(a)
        hint = spec.option("exponent_hint", min(2.0, 2.0 / a))
        fit = analysis.fit_error_law(sub, hint, spec.option("nu_candidates"), kmax)
        rows = [("nu", fit.nu), ("exponent", fit.exponent), ("residual_rms", fit.residual_rms)]
        if series.family is not None:
            rows.insert(1, ("nu0", analysis.nu0(series.family)))
        rows += [(f"a{k}", v) for k, v in enumerate(fit.coefficients)]
        out += [_rec("fit", alpha=a, value=float(v), regime=label) for label, v in rows]
    return out


def _cmd_maximize(spec, ctx):
    fam = spec.require_family()
    res = analysis.maximize_geometric_factor(
        fam.r, fam.s, fam.gamma_x, fam.gamma_p, spec.option("grid_resolution", 32), ctx.seed
    )
    out = [
        _rec("maximize", value=res.g, regime="g"),
        _rec("maximize", value=res.g_sites, regime="g_sites"),
        _rec("maximize", value=res.g_modes, regime="g_modes"),
    ]
    for label, vals in (
        ("site_length", res.site_lengths), ("site_gap", res.site_gaps),
        ("mode_length", res.mode_lengths), ("mode_gap", res.mode_gaps),
    ):
        out += [_rec("maximize", value=float(v), regime=f"{label}_{i}") for i, v in enumerate(vals)]
    for n in spec.n_list:
        c = res.to_configuration(n)
        for a in spec.alpha_list:
            b = asymptotics.b_alpha(a)
            value = fam.r * fam.s * (b * math.log(2 * n / math.pi) + asymptotics.c_alpha(a)) + b * res.g
            pred = asymptotics.general_asymptotic(c, a).value
            out.append(_rec("maximize", n, a, value, pred, value - pred, "entropy"))
    return out


def _cmd_constants(spec, ctx):
    out = []
    for a in spec.alpha_list:
        out.append(_rec("constants", alpha=a, value=asymptotics.b_alpha(a), regime="b_alpha"))
        out.append(_rec("constants", alpha=a, value=asymptotics.c_alpha(a), regime="c_alpha"))
    return out


_DISPATCH = {
    "exact": _cmd_exact,
    "asym": _cmd_asym,
    "spectrum": _cmd_spectrum,
    "duality-check": _cmd_duality,
    "complement-check": _cmd_complement,
    "oracle-check": _cmd_oracle,
    "scan": _cmd_scan,
    "fit": _cmd_fit,
    "maximize": _cmd_maximize,
    "constants": _cmd_constants,
}


@dataclass
class _Context:
    seed: int = 0
    threads: int = 1
    timing: bool = False
    pending: tuple | None = None

    @property
    def seed_tag(self):
        return f"seed={self.seed}"

    def clock(self, t0):
        return time.perf_counter() - t0 if self.timing else None


def run(command: str, jobspec: JobSpec, output_sink, fmt="csv", threads=1, timing=False) -> int:
    """Execute ``command`` and write its records to ``output_sink``; returns the exit code."""
    if command not in _DISPATCH:
        print(f"error: unknown command {command!r}", file=sys.stderr)
        return 1
    ctx = _Context(jobspec.option("seed", 0), threads, timing or jobspec.option("timing", False))
    try:
        records = _DISPATCH[command](jobspec, ctx)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # JobSpecError, BlockError, FitError and argument checks
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_records(records, output_sink, fmt)
    if ctx.pending is not None:
        try:
            _tolerance_check(*ctx.pending)
        except CheckFailed as exc:
            print(f"check failed: {exc}", file=sys.stderr)
            return 2
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser():
    p = _Parser(prog="entropy-lab", description="Rényi entropies of free-fermion block configurations")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON job file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--alpha", help="comma-separated Rényi orders, e.g. 1/2,1,2 (overrides alpha_list)")
    p.add_argument("--seed", type=int, help="seed for random check populations (overrides the job file)")
    p.add_argument("--threads", type=int, help="worker threads for scans (default: $ENTROPY_LAB_THREADS or 1)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--timing", action="store_true", help="fill the seconds column (breaks byte-identical output)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        except json.JSONDecodeError as exc:
            print(f"error: jobspec: invalid JSON ({exc})", file=sys.stderr)
            return 1
    try:
        spec = parse_jobspec(doc)
        if args.alpha:
            spec.alpha_list = _alphas(args.alpha.split(","), "--alpha")
        if args.seed is not None:
            if args.seed < 0:
                raise JobSpecError("--seed: must be nonnegative")
            spec.options["seed"] = args.seed
    except JobSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    threads = args.threads or analysis.default_threads()
    if args.out:
        buf = io.StringIO()
        code = run(args.command, spec, buf, args.format, threads, args.timing)
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
        return code
    return run(args.command, spec, sys.stdout, args.format, threads, args.timing)


if __name__ == "__main__":
    sys.exit(main())
