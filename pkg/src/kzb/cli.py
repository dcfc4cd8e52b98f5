"""Command-line front end over the verification drivers.

Each subcommand wraps one module-level driver and wraps its findings in
a schema-versioned report.  Report bytes depend only on the resolved
configuration (including the seed), never on wall-clock state, so two
runs with the same flags diff cleanly; timings are opt-in for exactly
that reason.

Configuration comes from an optional TOML file (--config) whose keys
mirror the flag names; flags override the file.  A [tolerances] table
in the file overrides the built-in pass thresholds by name.

Exit codes: 0 every check passed, 1 some residual at or above its
tolerance, 2 unusable configuration, 3 a driver aborted internally.
"""

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np
import tomli

from . import __version__
from .cherednik import degeneration_check, verify_sl2, verify_xi, verify_xi_tilde
from .connection import flatness_scan, trig_degeneration_check
from .dunkl import build_rep, connection_scan, verify_rep
from .elliptic import ModularPoint, identity_suite
from .liealg import build_quotient
from .monodromy import hecke_check, leading_term_check
from .rootsys import build_root_system

SCHEMA = "kzb-report/1"

DEFAULT_TOLERANCES = {
    "elliptic_algebraic": 1e-8,
    "elliptic_fd": 1e-6,
    "flatness_fixed_tau": 1e-8,
    "flatness_moduli": 1e-6,
    "degeneration_connection": 1e-10,
    "degeneration_relations": 1e-8,
    "degeneration_specialized": 1e-8,
    "dunkl_routes": 1e-10,
    "dunkl_curvature": 1e-8,
    "monodromy_quadratic": 1e-6,
    "monodromy_braid": 1e-6,
    "monodromy_leading": 1e-4,
}

COMMAND_DEFAULTS = {
    "dims": {"degree": 5},
    "elliptic-suite": {"tau": 0.2 + 1.3j, "samples": 10, "order": 4, "seed": 0},
    "flatness": {"tau": 0.2 + 1.3j, "degree": 5, "samples": 20, "seed": 0,
                 "moduli": False},
    "degenerate": {"tau": 0.1 + 30.0j, "degree": 5, "seed": 7},
    "cherednik-verify": {},
    "dunkl": {"tau": 0.2 + 1.3j, "c": (0.7,), "samples": 10, "seed": 101},
    "monodromy": {"tau": 0.2 + 1.3j, "c": (0.3,), "check": "hecke",
                  "degree": 4, "tol": 1e-8},
}

ALL_SECTIONS = ["dims", "elliptic-suite", "flatness", "degenerate",
                "cherednik-verify", "dunkl", "monodromy"]

_CONFIG_KEYS = {"root_system", "tau", "degree", "samples", "order", "seed",
                "c", "tol", "check", "moduli", "timings", "json", "output",
                "tolerances"}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _parse_tau(v):
    if isinstance(v, complex):
        re, im = v.real, v.imag
    elif isinstance(v, str):
        parts = v.split(",")
        if len(parts) != 2:
            raise ConfigError("tau must be given as re,im")
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError("tau must be given as re,im")
    elif isinstance(v, (list, tuple)) and len(v) == 2:
        re, im = float(v[0]), float(v[1])
    else:
        raise ConfigError("tau must be given as re,im")
    if im <= 0:
        raise ConfigError("Im tau must be positive")
    return complex(re, im)


def _parse_c(v):
    if isinstance(v, str):
        parts = v.split(",")
    elif isinstance(v, (int, float)):
        parts = [v]
    elif isinstance(v, (list, tuple)):
        parts = list(v)
    else:
        raise ConfigError("c must be a number or a comma list")
    try:
        return tuple(float(x) for x in parts)
    except (TypeError, ValueError):
        raise ConfigError("c must be a number or a comma list")


def _load_config_file(path):
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as e:
        raise ConfigError("cannot read config file: %s" % e)
    except tomli.TOMLDecodeError as e:
        raise ConfigError("config file is not valid TOML: %s" % e)
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(unknown))
    return data


def _resolve_tolerances(file_cfg):
    tol = dict(DEFAULT_TOLERANCES)
    for name, value in file_cfg.get("tolerances", {}).items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError("unknown tolerance name %r" % name)
        if not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError("tolerance %s must be positive" % name)
        tol[name] = float(value)
    return tol


def _resolve_threads():
    raw = os.environ.get("KZB_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("KZB_THREADS must be an integer, got %r" % raw)
    if n < 1:
        raise ConfigError("KZB_THREADS must be at least 1")
    return n


def _gather_given(args, file_cfg):
    """Explicitly provided keys: flags first, then the config file."""
    given = {}
    for key in ("root_system", "tau", "degree", "samples", "order", "seed",
                "c", "tol", "check", "moduli"):
        v = getattr(args, key, None)
        if v is None:
            v = file_cfg.get(key)
        if v is not None:
            given[key] = v
    return given


def _section_config(command, given, tolerances, threads):
    cfg = dict(COMMAND_DEFAULTS.get(command, {}))
    cfg.update(given)
    if "tau" in cfg:
        cfg["tau"] = _parse_tau(cfg["tau"])
    if "c" in cfg:
        cfg["c"] = _parse_c(cfg["c"])
    for key, low in (("degree", 2), ("samples", 1), ("order", 1)):
        if key in cfg:
            try:
                cfg[key] = int(cfg[key])
            except (TypeError, ValueError):
                raise ConfigError("%s must be an integer" % key)
            if cfg[key] < low:
                raise ConfigError("%s must be at least %d" % (key, low))
    if "tol" in cfg and (not isinstance(cfg["tol"], (int, float)) or cfg["tol"] <= 0):
        raise ConfigError("tol must be positive")
    if "seed" in cfg:
        try:
            cfg["seed"] = int(cfg["seed"])
        except (TypeError, ValueError):
            raise ConfigError("seed must be an integer")
    if cfg.get("check") not in (None, "hecke", "leading"):
        raise ConfigError("check must be hecke or leading")
    needs_rs = command != "elliptic-suite"
    if needs_rs:
        label = cfg.get("root_system")
        if not label:
            raise ConfigError("%s requires --root-system" % command)
        try:
            cfg["_rs"] = build_root_system(label)
        except (ValueError, KeyError) as e:
            raise ConfigError("bad root system %r: %s" % (label, e))
    cfg["_tolerances"] = tolerances
    cfg["_threads"] = threads
    return cfg


def _c_by_orbit(rs, cvals):
    orbits = len(rs.orbit_keys())
    if len(cvals) == 1:
        return {i: cvals[0] for i in range(orbits)}
    if len(cvals) == orbits:
        return {i: cvals[i] for i in range(orbits)}
    raise ConfigError(
        "c needs 1 value or %d (one per root length orbit)" % orbits)


# ---------------------------------------------------------------------------
# check entries


def _entry(name, residual, tol, **extra):
    e = {"name": name, "residual": float(residual), "tolerance": float(tol),
         "status": "pass" if residual < tol else "fail"}
    e.update(extra)
    return e


def _exact_entry(name, report):
    return {
        "name": name,
        "checked": len(report["checked"]),
        "failures": list(report["failures"]),
        "status": "pass" if not report["failures"] else "fail",
    }


# ---------------------------------------------------------------------------
# sections


def _run_dims(cfg):
    rs = cfg["_rs"]
    qa = build_quotient(rs, cfg["degree"])
    table = {"%d,%d" % bid: qa.dims[bid] for bid in qa.bidegrees}
    got = qa.dims.get((1, 1), 0)
    want = rs.num_positive()
    bound = rs.rank * (rs.rank + 1) // 2
    checks = [{
        "name": "dim_1_1_equals_positive_roots",
        "value": got,
        "expected": want,
        "status": "pass" if got == want else "fail",
    }]
    detail = {
        "dims": table,
        "quadratic_bound": bound,
        "exceeds_quadratic_bound": got > bound,
    }
    return checks, detail


def _run_elliptic(cfg):
    tols = cfg["_tolerances"]
    mp = ModularPoint(cfg["tau"])
    out = identity_suite(mp, samples=cfg["samples"], order=cfg["order"],
                         seed=cfg["seed"])
    checks = []
    for name, value in out.items():
        tol = tols["elliptic_fd"] if name.endswith("_fd") else tols["elliptic_algebraic"]
        checks.append({
            "identity": name,
            "max_residual": float(value),
            "samples": cfg["samples"],
            "tolerance": tol,
            "status": "pass" if value < tol else "fail",
        })
    return checks, {}


def _run_flatness(cfg):
    tols = cfg["_tolerances"]
    rs = cfg["_rs"]
    moduli = bool(cfg.get("moduli"))
    qa = build_quotient(rs, cfg["degree"])
    mp = ModularPoint(cfg["tau"])
    reports = flatness_scan(qa, rs, mp, samples=cfg["samples"],
                            seed=cfg["seed"], moduli=moduli,
                            threads=cfg["_threads"])
    residuals = [float(r.max_residual) for r in reports]
    name = "curvature_moduli" if moduli else "curvature_fixed_tau"
    tol = tols["flatness_moduli"] if moduli else tols["flatness_fixed_tau"]
    checks = [_entry(name, max(residuals), tol,
                     residuals=residuals, samples=cfg["samples"])]
    return checks, {}


def _run_degenerate(cfg):
    tols = cfg["_tolerances"]
    rs = cfg["_rs"]
    tau = cfg["tau"]
    qa = build_quotient(rs, cfg["degree"])
    trig = trig_degeneration_check(qa, rs, im_tau=tau.imag, re_tau=tau.real,
                                   seed=cfg["seed"])
    rca = degeneration_check(rs, im_tau=tau.imag, re_tau=tau.real,
                             N=cfg["degree"], seed=cfg["seed"])
    checks = [
        _entry("connection_vs_trig_limit", trig["componentwise"],
               tols["degeneration_connection"]),
        _entry("relation_tt", trig["tt"], tols["degeneration_relations"]),
        _entry("relation_XX", trig["XX"], tols["degeneration_relations"]),
        _entry("relation_tX", trig["tX"], tols["degeneration_relations"]),
        _entry("specialized_vs_trig_limit", rca,
               tols["degeneration_specialized"]),
    ]
    detail = {"im_tau": tau.imag, "z": list(trig["z"]),
              "tX_pairs": trig["tX_pairs"]}
    return checks, detail


def _run_cherednik(cfg):
    rs = cfg["_rs"]
    checks = [
        _exact_entry("sl2_triple", verify_sl2(rs)),
        _exact_entry("specialization_relations", verify_xi(rs)),
        _exact_entry("derivation_images", verify_xi_tilde(rs, max_m=2)),
        _exact_entry("orbit_representation", verify_rep(rs)),
    ]
    return checks, {}


def _run_dunkl(cfg):
    tols = cfg["_tolerances"]
    rs = cfg["_rs"]
    rep = build_rep(rs, c=_c_by_orbit(rs, cfg["c"]))
    mp = ModularPoint(cfg["tau"])
    scan = connection_scan(rep, mp, count=cfg["samples"], seed=cfg["seed"])
    checks = [
        _entry("routes_agree", scan["max_route_diff"], tols["dunkl_routes"]),
        _entry("matrix_curvature", scan["max_curvature"],
               tols["dunkl_curvature"]),
    ]
    return checks, {"rows": scan["rows"]}


def _run_monodromy(cfg):
    tols = cfg["_tolerances"]
    rs = cfg["_rs"]
    mp = ModularPoint(cfg["tau"])
    if cfg["check"] == "hecke":
        rep = build_rep(rs, c=_c_by_orbit(rs, cfg["c"]))
        r = hecke_check(rep, mp, tol=cfg["tol"])
        checks = [
            _entry("quadratic_relation", r["max_quadratic"],
                   tols["monodromy_quadratic"]),
            _entry("braid_relation", r["max_braid"], tols["monodromy_braid"]),
        ]
        detail = {"t": r["t"], "base": r["base"], "quadratic": r["quadratic"],
                  "braid": r["braid"], "transport_error": r["transport_error"]}
    else:
        qa = build_quotient(rs, cfg["degree"])
        r = leading_term_check(qa, rs, mp, tol=cfg["tol"])
        checks = [
            _entry("leading_terms", r["max_residual"],
                   tols["monodromy_leading"]),
        ]
        detail = {"x": r["x"], "y": r["y"], "t": r["t"], "degree": r["N"],
                  "transport_error": r["transport_error"]}
    return checks, detail


_RUNNERS = {
    "dims": _run_dims,
    "elliptic-suite": _run_elliptic,
    "flatness": _run_flatness,
    "degenerate": _run_degenerate,
    "cherednik-verify": _run_cherednik,
    "dunkl": _run_dunkl,
    "monodromy": _run_monodromy,
}


# ---------------------------------------------------------------------------
# report assembly


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.complexfloating):
        return [float(v.real), float(v.imag)]
    return v


def _echo(cfg):
    out = {}
    for k in sorted(cfg):
        if k.startswith("_"):
            continue
        v = cfg[k]
        if k == "tau":
            v = [v.real, v.imag]
        elif k == "c":
            v = list(v)
        out[k] = v
    return out


def _status(checks):
    return "pass" if all(e["status"] == "pass" for e in checks) else "fail"


def run_command(command, given, tolerances, threads, timings=False):
    """Resolved-config dispatch; returns the full report dict."""
    report = {"schema": SCHEMA, "version": __version__, "command": command}
    clock = {}
    if command == "all":
        report["config"] = {k: _jsonable(v) for k, v in sorted(given.items())}
        subs = []
        for name in ALL_SECTIONS:
            cfg = _section_config(name, given, tolerances, threads)
            t0 = time.perf_counter()
            checks, detail = _RUNNERS[name](cfg)
            clock[name] = time.perf_counter() - t0
            subs.append({
                "command": name,
                "config": _echo(cfg),
                "checks": checks,
                "detail": detail,
                "status": _status(checks),
            })
        report["reports"] = subs
        report["status"] = ("pass" if all(s["status"] == "pass" for s in subs)
                            else "fail")
    else:
        cfg = _section_config(command, given, tolerances, threads)
        report["config"] = _echo(cfg)
        t0 = time.perf_counter()
        checks, detail = _RUNNERS[command](cfg)
        clock[command] = time.perf_counter() - t0
        report["checks"] = checks
        report["detail"] = detail
        report["status"] = _status(checks)
    if timings:
        report["timings"] = {k: round(v, 3) for k, v in clock.items()}
    return _jsonable(report)


# ---------------------------------------------------------------------------
# surface


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="kzb",
        description="verification drivers for the elliptic connection stack")
    ap.add_argument("--version", action="version", version="kzb " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML file; flags override its keys")
        p.add_argument("--json", action="store_true", default=None,
                       help="print the JSON report instead of a summary")
        p.add_argument("--output", help="also write the JSON report here")
        p.add_argument("--timings", action="store_true", default=None,
                       help="include wall-clock timings (breaks byte determinism)")
        p.add_argument("--seed", type=int)

    def rsflag(p):
        p.add_argument("--root-system", dest="root_system", metavar="LABEL",
                       help="e.g. A2, B2, G2")

    p = sub.add_parser("dims", help="bidegree dimension table of the quotient")
    common(p); rsflag(p)
    p.add_argument("--max-degree", "--degree", dest="degree", type=int)

    p = sub.add_parser("elliptic-suite", help="theta-kernel identity sweep")
    common(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--order", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("flatness", help="curvature residuals at sampled points")
    common(p); rsflag(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--max-degree", "--degree", dest="degree", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--moduli", action="store_true", default=None,
                   help="vary tau as well as z")

    p = sub.add_parser("degenerate", help="large-Im-tau trigonometric limit")
    common(p); rsflag(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--max-degree", "--degree", dest="degree", type=int)

    p = sub.add_parser("cherednik-verify", help="exact symbolic relation checks")
    common(p); rsflag(p)

    p = sub.add_parser("dunkl", help="orbit connection routes and curvature")
    common(p); rsflag(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--c", help="coupling, one value or one per orbit")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("monodromy", help="divisor monodromy relations")
    common(p); rsflag(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--c", help="coupling, one value or one per orbit")
    p.add_argument("--check", choices=["hecke", "leading"])
    p.add_argument("--max-degree", "--degree", dest="degree", type=int)
    p.add_argument("--tol", type=float, help="transport tolerance")

    p = sub.add_parser("all", help="every section with its defaults")
    common(p); rsflag(p)
    p.add_argument("--tau", help="re,im")
    p.add_argument("--max-degree", "--degree", dest="degree", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--c", help="coupling, one value or one per orbit")
    p.add_argument("--check", choices=["hecke", "leading"])
    p.add_argument("--tol", type=float)
    p.add_argument("--moduli", action="store_true", default=None)

    return ap


def _print_human(report, stream):
    def block(sub):
        for e in sub["checks"]:
            name = e.get("name") or e.get("identity")
            if "failures" in e:
                note = ("exact (%d relations)" % e["checked"]
                        if not e["failures"]
                        else "failed: %s" % ", ".join(e["failures"]))
            elif "residual" in e or "max_residual" in e:
                r = e.get("max_residual", e.get("residual"))
                note = "residual %.3e  tol %.1e" % (r, e["tolerance"])
            else:
                note = "value %s  expected %s" % (e.get("value"), e.get("expected"))
            print("  %-34s %-38s %s" % (name, note, e["status"]), file=stream)

    if "reports" in report:
        for sub in report["reports"]:
            print("%s:" % sub["command"], file=stream)
            block(sub)
    else:
        block(report)
    print(report["status"].upper(), file=stream)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        file_cfg = _load_config_file(args.config) if args.config else {}
        given = _gather_given(args, file_cfg)
        tolerances = _resolve_tolerances(file_cfg)
        threads = _resolve_threads()
        timings = args.timings if args.timings is not None else bool(
            file_cfg.get("timings"))
        want_json = args.json if args.json is not None else bool(
            file_cfg.get("json"))
        output = args.output or file_cfg.get("output")
    except ConfigError as e:
        print("kzb: %s" % e, file=sys.stderr)
        return 2
    try:
        report = run_command(args.command, given, tolerances, threads,
                             timings=timings)
    except ConfigError as e:
        print("kzb: %s" % e, file=sys.stderr)
        return 2
    except Exception as e:
        print("kzb: internal abort: %s" % e, file=sys.stderr)
        return 3
    text = json.dumps(report, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    if want_json:
        print(text)
    else:
        _print_human(report, sys.stdout)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
