"""Batch front end: ``jointzeta <command> --config run.cfg [--out report.json]``.

Config files are flat ``key = value`` text.  ``#`` starts a comment, lists
are comma separated and complex numbers may be written ``0.2+0.1i`` or
``0.2+0.1j``.  Every key is validated when the file is parsed, and errors
name the offending line.

Reports are JSON documents with four blocks: ``command``, ``config`` (the
parsed values), ``results`` and ``provenance``.  Only ``provenance``
carries run-dependent data (timestamp, version, source hash, seed), so two
runs with the same config produce the same report outside that block,
whatever ``--workers`` is.  ``--format csv`` writes one row per interval,
hit or term instead.

Exit codes: 0 success, 1 usage or config error, 2 non-convergence,
3 numeric or resolution failure, 4 budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis as A
from . import kronecker as K
from . import targeting as G
from . import zeta as Z
from .dirichlet import ShiftVector
from .errors import JointZetaError, NonConvergenceError


class ConfigError(Exception):
    def __init__(self, msg, exit_code: int = 1):
        super().__init__(msg)
        self.exit_code = exit_code


class UsageError(Exception):
    exit_code = 1


# --- config parsing -------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    value: str
    line: int


def read_config(text: str, source: str = "<config>") -> dict:
    """Raw ``key -> Entry`` map; duplicate keys and malformed lines are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigError(f"{source}:{lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} "
                              f"(first set on line {out[key].line})")
        out[key] = Entry(value, lineno)
    return out


def _complex(text: str) -> complex:
    t = text.replace(" ", "")
    t = re.sub(r"(?<![A-Za-z])i$", "j", t)
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    return complex(t)


def _list(conv):
    def parse(text):
        items = [x.strip() for x in text.split(",")]
        if not items or any(not x for x in items):
            raise ValueError("empty list item")
        return tuple(conv(x) for x in items)
    return parse


def _positive(conv):
    def parse(text):
        v = conv(text)
        if not v > 0:
            raise ValueError("must be positive")
        return v
    return parse


def _sigma(text):
    v = float(text)
    if not 0.5 < v <= 1:
        raise ValueError("sigma must lie in (1/2, 1]")
    return v


def _shifts(text):
    return ShiftVector.of(*_list(float)(text))


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return parse


REQUIRED = object()


class Schema:
    """Key table for one command: name -> (converter, default, help)."""

    def __init__(self, *fields):
        self.fields = {name: (conv, default, doc) for name, conv, default, doc in fields}

    def parse(self, raw: dict, source: str) -> tuple[dict, dict]:
        values, lines = {}, {}
        for key, entry in raw.items():
            if key not in self.fields:
                raise ConfigError(f"{source}:{entry.line}: unknown key {key!r}")
        for key, (conv, default, _) in self.fields.items():
            if key in raw:
                e = raw[key]
                try:
                    values[key] = conv(e.value)
                except (ValueError, TypeError, JointZetaError) as exc:
                    raise ConfigError(f"{source}:{e.line}: {key}: {exc}") from None
                lines[key] = e.line
            elif default is REQUIRED:
                raise ConfigError(f"{source}: missing required key {key!r}")
            else:
                values[key] = default
        return values, lines

    def help(self) -> str:
        rows = []
        for key, (_, default, doc) in self.fields.items():
            if default is REQUIRED:
                d = "required"
            elif default is None:
                d = "optional"
            else:
                d = f"default {_shown(default)}"
            rows.append(f"  {key:<16} {doc} ({d})")
        return "\n".join(rows)


def _shown(value) -> str:
    """A default as it would be written in a config file."""
    if isinstance(value, ShiftVector):
        value = value.shifts
    if isinstance(value, (tuple, list)):
        return ", ".join(_shown(v) for v in value)
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _check(cond: bool, lines: dict, key: str, source: str, msg: str, code: int = 1):
    if not cond:
        where = f"{source}:{lines[key]}" if key in lines else source
        raise ConfigError(f"{where}: {key}: {msg}", code)


SCAN_FIELDS = (
    ("sigma", _sigma, 0.75, "real part of s"),
    ("t", _positive(float), 2.0, "imaginary part of s"),
    ("shifts", _shifts, REQUIRED, "shift vector d_1 < ... < d_n"),
    ("T", _positive(float), REQUIRED, "scan range is [T, 2T]"),
    ("grid_step", _positive(float), REQUIRED, "tau grid spacing"),
    ("epsilon", _positive(float), 0.1, "approximation radius"),
    ("cutoff_X", float, 100.0, "prime-sum cutoff X"),
    ("floor", _positive(float), 1e-6, "|zeta| below this is excluded"),
    ("zeta_tol", _positive(float), 1e-10, "zeta evaluation tolerance"),
    ("seed", int, 0, "seed for spot checks"),
)


def _scan_config(v: dict, lines: dict, source: str, workers: int) -> A.ScanConfig:
    limit = math.pi / (8 * v["shifts"][-1] * max(1.0, math.log(max(v["cutoff_X"], 1.0))))
    _check(v["grid_step"] <= limit * (1 + 1e-12), lines, "grid_step", source,
           f"{v['grid_step']} exceeds pi/(8 d_n max(1, log X)) = {limit:.6g}", code=3)
    return A.ScanConfig(complex(v["sigma"], v["t"]), v["shifts"], v["T"], v["grid_step"],
                        epsilon=v["epsilon"], cutoff_X=v["cutoff_X"], seed=v["seed"],
                        floor=v["floor"], zeta_tol=v["zeta_tol"], workers=workers)


# --- JSON helpers ---------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, ShiftVector):
        return list(x.shifts)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(y) for k, y in x.items()}
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _source_hash() -> str:
    h = hashlib.sha256()
    for f in sorted(Path(__file__).parent.glob("*.py")):
        h.update(f.name.encode())
        h.update(f.read_bytes())
    return h.hexdigest()[:16]


def provenance(seed: int) -> dict:
    return {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "version": __version__, "source_sha256": _source_hash(), "seed": seed}


def assignment_from_dict(doc: dict) -> G.PhaseAssignment:
    return G.PhaseAssignment.from_json(json.dumps(doc))


def assignment_to_dict(a: G.PhaseAssignment) -> dict:
    return json.loads(a.to_json())


def load_report(text: str) -> dict:
    """Parse a JSON report, rebuilding DensityReport and PhaseAssignment results."""
    doc = json.loads(text)
    res = doc["results"]
    if "report" in res:
        res["report"] = A.DensityReport.from_dict(res["report"])
    if "assignment" in res:
        res["assignment"] = assignment_from_dict(res["assignment"])
    return doc


# --- commands -------------------------------------------------------------------
# Each returns (config echo, results, csv header, csv rows, exit code).

def _spot_checks(config: A.ScanConfig, intervals, n: int, value) -> list:
    """Evaluate ``value`` at ``n`` seeded random points of the hit set."""
    if n <= 0 or not intervals:
        return []
    iv = np.asarray(intervals, dtype=float)
    cum = np.cumsum(iv[:, 1] - iv[:, 0])
    u = np.sort(np.random.default_rng(config.seed).uniform(0, cum[-1], n))
    k = np.searchsorted(cum, u, side="right").clip(max=len(iv) - 1)
    taus = iv[k, 1] - (cum[k] - u)
    return [{"tau": float(x), "value": float(value(float(x)))} for x in taus]


def _max_distance(config: A.ScanConfig, z) -> callable:
    s = config.s

    def f(tau):
        vals = [Z.log_zeta(complex(s.sigma, s.t + d * tau), config.zeta_tol).value
                for d in config.shifts]
        return np.abs(np.array(vals) - np.asarray(z)).max()
    return f


PHASE_SCHEMA = Schema(
    ("targets", _list(_complex), REQUIRED, "target values z_k, one per shift"),
    ("shifts", _shifts, REQUIRED, "shift vector"),
    ("sigma", _sigma, 0.75, "real part of s"),
    ("t", float, 0.0, "imaginary part of s (>= 0)"),
    ("epsilon", _positive(float), REQUIRED, "required residual"),
    ("prime_floor", _positive(float), 2.0, "primes below y are always used"),
    ("mode", _choice("free", "lattice"), "free", "phase set"),
    ("budget", _positive(int), 10000, "number of primes available"),
    ("seed", int, 0, "unused; recorded for provenance"),
)


def cmd_build_phases(v, lines, source, workers):
    _check(len(v["targets"]) == len(v["shifts"]), lines, "targets", source,
           "need one target per shift")
    _check(v["t"] >= 0, lines, "t", source, "must be >= 0")
    spec = G.TargetSpec(v["targets"], v["epsilon"], complex(v["sigma"], v["t"]), v["shifts"],
                        v["prime_floor"])
    code = 0
    try:
        a = G.build_phase_assignment(spec, v["mode"], v["budget"])
        res = G.residual(a, spec)
        converged = True
    except NonConvergenceError as exc:
        a, res, converged, code = exc.best, exc.residual, False, exc.exit_code
    results = {"converged": converged, "residual": res, "epsilon": spec.epsilon,
               "size": len(a), "assignment": assignment_to_dict(a)}
    rows = [(p, a.phases[p]) for p in a.support]
    print(f"residual {res:.6g} ({'<' if converged else '>='} epsilon {spec.epsilon})",
          file=sys.stderr)
    return results, ("p", "theta"), rows, code


FIND_SCHEMA = Schema(*SCAN_FIELDS,
                     ("targets", _list(_complex), REQUIRED, "target values z_k"),
                     ("max_hits", _positive(int), 10, "number of witnesses"),
                     ("prefilter_slack", float, None, "prime-sum prefilter slack (inf disables)"))


def cmd_find_tau(v, lines, source, workers):
    cfg = _scan_config(v, lines, source, workers)
    _check(len(v["targets"]) == len(cfg.shifts), lines, "targets", source,
           "need one target per shift")
    hits = A.find_tau(cfg, v["targets"], v["max_hits"], v["prefilter_slack"])
    results = {"hits": [{"tau": t, "distance": d} for t, d in hits]}
    return results, ("tau", "distance"), hits, 0


DENSITY_SCHEMA = Schema(*SCAN_FIELDS,
                        ("kind", _choice("theorem", "good_set"), "theorem",
                         "theorem: |log zeta - z_k| < eps; good_set: |log zeta - P_X| < eps"),
                        ("targets", _list(_complex), None, "target values (kind = theorem)"),
                        ("prefilter_slack", float, None, "prime-sum prefilter slack"),
                        ("spot_checks", int, 0, "seeded random re-checks of hit points"))


def cmd_density(v, lines, source, workers):
    cfg = _scan_config(v, lines, source, workers)
    if v["kind"] == "theorem":
        _check(v["targets"] is not None and len(v["targets"]) == len(cfg.shifts),
               lines, "targets", source, "need one target per shift")
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = A.theorem_scan(cfg, v["targets"], v["prefilter_slack"])
        value = _max_distance(cfg, v["targets"])
    else:
        report = A.good_set_measure(cfg)
        value = None
    results = {"report": report.to_dict()}
    if value is not None:
        results["spot_checks"] = _spot_checks(cfg, report.hit_intervals, v["spot_checks"], value)
    return results, ("tau_lo", "tau_hi"), report.hit_intervals, 0


TSANG_SCHEMA = Schema(
    ("sigma", _list(_sigma), REQUIRED, "one or more real parts"),
    ("T", _positive(float), REQUIRED, "range [T, 2T]"),
    ("cutoff_X", _list(float), (100.0,), "one or more prime cutoffs"),
    ("grid_step", _positive(float), 0.05, "quadrature cell width"),
    ("floor", _positive(float), 1e-6, "|zeta| below this is excluded"),
    ("zeta_tol", _positive(float), 1e-10, "zeta evaluation tolerance"),
    ("seed", int, 0, "unused; recorded for provenance"),
)


def cmd_tsang(v, lines, source, workers):
    rows = []
    for sig in v["sigma"]:
        for X in v["cutoff_X"]:
            m = A.tsang_meansquare(sig, v["T"], X, v["grid_step"], v["floor"], v["zeta_tol"],
                                   workers)
            rows.append((sig, X, m))
    results = {"meansquare": [{"sigma": s, "cutoff_X": X, "value": m} for s, X, m in rows]}
    return results, ("sigma", "cutoff_X", "meansquare"), rows, 0


KRONECKER_SCHEMA = Schema(
    ("kind", _choice("chen", "window"), "chen", "chen: exact window search; window: corollary"),
    ("lambdas", _list(float), None, "frequencies (kind = chen)"),
    ("alphas", _list(float), None, "offsets, default 0"),
    ("weights", _list(float), None, "weights, default 1"),
    ("coeff_bound", _positive(int), 2, "M in Lambda(M)"),
    ("T1", int, 0, "window start"),
    ("T2", int, 1000, "window end"),
    ("shifts", _shifts, None, "shift vector (kind = window)"),
    ("omega", float, 10.0, "target n/omega (kind = window)"),
    ("a", int, 0, "window start (kind = window)"),
    ("seed", int, 0, "unused; recorded for provenance"),
)


def cmd_kronecker(v, lines, source, workers):
    if v["kind"] == "chen":
        _check(v["lambdas"] is not None, lines, "lambdas", source, "required for kind = chen")
        n = len(v["lambdas"])
        alphas = v["alphas"] or (0.0,) * n
        weights = v["weights"] or (1.0,) * n
        _check(len(alphas) == n, lines, "alphas", source, "length must match lambdas")
        _check(len(weights) == n, lines, "weights", source, "length must match lambdas")
        _check(v["T1"] < v["T2"], lines, "T2", source, "need T1 < T2")
        inst = K.KroneckerInstance(v["lambdas"], alphas, weights, v["coeff_bound"],
                                   (v["T1"], v["T2"]))
        sol = K.chen_search(inst)
        res = {"t_star": sol.t_star, "objective": sol.objective, "bound": sol.bound,
               "Delta": sol.Delta, "Lambda": sol.Lambda, "certified": sol.certified}
    else:
        _check(v["shifts"] is not None, lines, "shifts", source, "required for kind = window")
        _check(v["omega"] >= 1, lines, "omega", source, "must be >= 1")
        d = list(v["shifts"])
        h, T = K.homogeneous_window(d, v["omega"], v["a"])
        obj = float(K.objective_values(np.array([h]), d, [0.0] * len(d), [1.0] * len(d))[0])
        res = {"h": h, "T_used": T, "objective": obj, "target": len(d) / v["omega"]}
    return res, tuple(res), [tuple(res.values())], 0


ZEROS_SCHEMA = Schema(
    ("kind", _choice("exp_poly", "wilder", "proximity"), "exp_poly",
     "exp_poly: zeros of sum c_k e(d_k x); wilder: rectangle count; proximity: |zeta| windows"),
    ("coeffs", _list(_complex), None, "coefficients c_k (exp_poly)"),
    ("shifts", _shifts, None, "frequencies d_k (exp_poly, proximity)"),
    ("amplitudes", _list(_complex), None, "A_k (wilder)"),
    ("frequencies", _list(float), None, "increasing real omega_k (wilder)"),
    ("K", float, None, "rectangle half-width |Re z| <= K (wilder)"),
    ("alpha", float, None, "rectangle bottom (wilder)"),
    ("beta", float, None, "rectangle top (wilder)"),
    ("resolution", _positive(int), 1, "contour refinement multiplier"),
    ("sigma", _sigma, 0.75, "real part of s (proximity)"),
    ("t", _positive(float), 2.0, "imaginary part of s (proximity)"),
    ("tau_lo", float, None, "scan start (proximity)"),
    ("tau_hi", float, None, "scan end (proximity)"),
    ("grid_step", _positive(float), 0.01, "grid spacing (proximity)"),
    ("floor", _positive(float), 1e-3, "|zeta| threshold (proximity)"),
    ("seed", int, 0, "unused; recorded for provenance"),
)


def cmd_zeros(v, lines, source, workers):
    kind = v["kind"]
    if kind == "exp_poly":
        for key in ("coeffs", "shifts"):
            _check(v[key] is not None, lines, key, source, "required for kind = exp_poly")
        _check(len(v["coeffs"]) == len(v["shifts"]), lines, "coeffs", source,
               "need one coefficient per shift")
        c = G.exp_poly_zero_count(v["coeffs"], v["shifts"], resolution=v["resolution"])
        res = {"count": c, "bound": v["shifts"].spread}
        return res, tuple(res), [tuple(res.values())], 0
    if kind == "wilder":
        for key in ("amplitudes", "frequencies", "K", "alpha", "beta"):
            _check(v[key] is not None, lines, key, source, "required for kind = wilder")
        _check(len(v["amplitudes"]) == len(v["frequencies"]), lines, "amplitudes", source,
               "length must match frequencies")
        c = G.wilder_count(v["amplitudes"], v["frequencies"], (v["K"], v["alpha"], v["beta"]),
                           v["resolution"])
        res = {"count": c}
        return res, ("count",), [(c,)], 0
    for key in ("shifts", "tau_lo", "tau_hi"):
        _check(v[key] is not None, lines, key, source, "required for kind = proximity")
    rep = Z.zero_proximity_scan(complex(v["sigma"], v["t"]), v["shifts"],
                                (v["tau_lo"], v["tau_hi"]), v["grid_step"], v["floor"])
    res = {"floor": rep.threshold, "measure": rep.measure, "windows": rep.tau_windows}
    return res, ("tau_lo", "tau_hi"), rep.tau_windows, 0


AD_FIELDS = (
    ("primes", _list(int), None, "the prime set M (or use assignment)"),
    ("thetas", _list(float), None, "phases theta_p, default 0"),
    ("assignment", str, None, "path to a build-phases report or assignment JSON"),
    ("d", float, REQUIRED, "half-width d in (0, 1/2)"),
    ("T", _positive(float), REQUIRED, "range [T, 2T]"),
    ("grid_step", _positive(float), REQUIRED, "tau grid spacing"),
    ("sigma", _sigma, 0.75, "real part of s"),
    ("t", _positive(float), 2.0, "imaginary part of s"),
    ("shifts", _shifts, ShiftVector.of(1.0), "shift vector"),
    ("seed", int, 0, "unused; recorded for provenance"),
)


def _assignment(v, lines, source, base: Path) -> G.PhaseAssignment:
    if v["assignment"] is not None:
        _check(v["primes"] is None, lines, "primes", source, "give primes or assignment, not both")
        path = (base / v["assignment"]) if not Path(v["assignment"]).is_absolute() \
            else Path(v["assignment"])
        try:
            doc = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"{source}:{lines['assignment']}: assignment: {exc}") from None
        if "results" in doc:
            doc = doc["results"]["assignment"]
        return assignment_from_dict(doc)
    ps = v["primes"] or ()
    _check(all(p >= 2 for p in ps) and len(set(ps)) == len(ps), lines, "primes", source,
           "need distinct primes")
    thetas = v["thetas"] or (0.0,) * len(ps)
    _check(len(thetas) == len(ps), lines, "thetas", source, "one phase per prime")
    return G.PhaseAssignment(tuple(ps), dict(zip(ps, thetas)))


def _ad_config(v, lines, source, workers, a, cutoff):
    _check(0 < v["d"] < 0.5, lines, "d", source, "must lie in (0, 1/2)")
    vv = dict(v, cutoff_X=cutoff, epsilon=0.1, floor=1e-6, zeta_tol=1e-10)
    return _scan_config(vv, lines, source, workers)


ADSCAN_SCHEMA = Schema(*AD_FIELDS)


def cmd_adscan(v, lines, source, workers, base=Path(".")):
    a = _assignment(v, lines, source, base)
    cfg = _ad_config(v, lines, source, workers, a, float(max(a.support, default=2)))
    ws, frac = A.scan_A_d(a, v["d"], cfg)
    res = {"measure": ws.measure, "fraction": frac,
           "expected": (2 * v["d"]) ** len(a.support), "intervals": ws.intervals}
    return res, ("tau_lo", "tau_hi"), ws.intervals, 0


TAIL_SCHEMA = Schema(*AD_FIELDS,
                     ("cutoff_X", float, REQUIRED, "prime-sum cutoff X"),
                     ("k", int, 0, "index of the shift used"))


def cmd_tail_energy(v, lines, source, workers, base=Path(".")):
    a = _assignment(v, lines, source, base)
    _check(0 <= v["k"] < len(v["shifts"]), lines, "k", source, "shift index out of range")
    cfg = _ad_config(v, lines, source, workers, a, v["cutoff_X"])
    integral, reference = A.tail_energy(a, v["d"], cfg, v["k"])
    res = {"integral": integral, "reference": reference, "ratio": integral / reference}
    return res, tuple(res), [tuple(res.values())], 0


COMMANDS = {
    "build-phases": (cmd_build_phases, PHASE_SCHEMA, "greedy prime-phase assignment"),
    "find-tau": (cmd_find_tau, FIND_SCHEMA, "explicit shifts tau approximating targets"),
    "density": (cmd_density, DENSITY_SCHEMA, "measure of the approximation set in [T, 2T]"),
    "tsang": (cmd_tsang, TSANG_SCHEMA, "mean square of log zeta minus its prime sum"),
    "kronecker": (cmd_kronecker, KRONECKER_SCHEMA, "simultaneous approximation searches"),
    "zeros": (cmd_zeros, ZEROS_SCHEMA, "zero counts and zeta zero-proximity windows"),
    "adscan": (cmd_adscan, ADSCAN_SCHEMA, "measure of A_d(T)"),
    "tail-energy": (cmd_tail_energy, TAIL_SCHEMA, "prime-sum energy over A_d(T)"),
}

CSV_COLUMNS = {
    "build-phases": "p,theta", "find-tau": "tau,distance", "density": "tau_lo,tau_hi",
    "tsang": "sigma,cutoff_X,meansquare", "adscan": "tau_lo,tau_hi",
    "kronecker": "one row of the result fields", "zeros": "count[,bound] or tau_lo,tau_hi",
    "tail-energy": "integral,reference,ratio",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jointzeta", description=__doc__.split("\n\n")[0],
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, schema, doc) in COMMANDS.items():
        sp = sub.add_parser(name, help=doc, description=doc,
                            formatter_class=argparse.RawDescriptionHelpFormatter,
                            epilog=f"config keys:\n{schema.help()}\n\n"
                                   f"csv columns: {CSV_COLUMNS[name]}")
        sp.add_argument("--config", required=True, type=Path, help="key = value file")
        sp.add_argument("--out", type=Path, help="output file (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--workers", type=int, default=1, help="scan partitions")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
    return p


def render(command, echo, results, header, rows, fmt, seed) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                        for x in _jsonable(list(r))])
        return buf.getvalue()
    doc = {"command": command, "config": _jsonable(echo), "results": _jsonable(results),
           "provenance": provenance(seed)}
    return json.dumps(doc, indent=2) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, schema, _ = COMMANDS[args.command]
    source = str(args.config)
    try:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{source}: {exc.strerror}") from None
        raw = read_config(text, source)
        if args.seed is not None:
            raw["seed"] = Entry(str(args.seed), raw["seed"].line if "seed" in raw else 0)
        values, lines = schema.parse(raw, source)
        extra = {"base": args.config.parent} if args.command in ("adscan", "tail-energy") else {}
        results, header, rows, code = fn(values, lines, source, args.workers, **extra)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except JointZetaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = render(args.command, values, results, header, rows, args.format, values["seed"])
    if args.out:
        args.out.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
