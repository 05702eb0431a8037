"""Config-driven experiment runner.

``circledim run config.json`` validates the config, writes ``manifest.json``
(the fully resolved config), runs one experiment and writes ``results.json``
plus experiment-specific CSV tables.  Exit codes: 0 success, 2 invalid
config, 3 budget exhausted, 4 unreliable diagnostics.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .critexp import count_by_conorm, count_global_conorm, convergence_exponent, delta_fit, poincare_partial
from .dim import box_dim, dim_formula_check, moran_dim, pressure_dim
from .errors import (
    BudgetExceeded,
    CircleDimError,
    ConesOverlap,
    DegenerateFit,
    EmptySubsystem,
    InvalidMap,
    NoBracket,
    NotContracting,
    NotFound,
    OverlapDetected,
    PingpongViolation,
    UnknownFixture,
    Unreliable,
)
from .fixtures import arc, fixture_names, fixtures
from .fuchsian import classical_delta, limit_set_sample, pingpong_cones, schottky, schottky_pressure
from .hyperbolic import (
    certify_pingpong,
    conformality_residual,
    extract_subsystem,
    patterson_sullivan,
    pingpong_free_check,
    search_pingpong,
    standard_cones,
    subsystem_sample,
)
from .walk import WalkMeasure, detect_structure, lyapunov, stationary_sample
from .words import Alphabet

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_UNRELIABLE = 0, 2, 3, 4

# ---------------------------------------------------------------------------
# schemas

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_INT1 = {"type": "integer", "minimum": 1}
_INT0 = {"type": "integer", "minimum": 0}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_WINDOW = {"type": "array", "items": _INT0, "minItems": 2, "maxItems": 2}
_ARCS = {"type": "array", "items": _PAIR, "minItems": 1}
_WEIGHTS = {"type": "array", "items": _POS, "minItems": 1}


def _params(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


PARAMETER_SCHEMAS = {
    "lyapunov": _params({"x0": _NUM, "n": _INT1, "trials": _INT1, "weights": _WEIGHTS}),
    "stationary": _params({"burn": _INT1, "count": _INT1, "chains": _INT1, "weights": _WEIGHTS, "residual_threshold": _POS}),
    "structure": _params({"n": _INT1, "seeds": _INT1, "grid_size": _INT1, "cluster_eps": _POS, "weights": _WEIGHTS, "conjugate_by": _NUM}),
    "dim": _params({
        "x0": _NUM, "n": _INT1, "trials": _INT1, "burn": _INT1, "count": _INT1, "chains": _INT1,
        "window": _WINDOW, "weights": _WEIGHTS, "ratios": {"type": "array", "items": _POS}, "pressure_arcs": _ARCS,
    }),
    "critexp": _params({
        "base_points": {"type": "array", "items": _NUM, "minItems": 1}, "eps": _POS, "max_len": _INT1,
        "window": _WINDOW, "distortion_cap": _POS, "global": {"type": "boolean"}, "global_cells": _INT1, "grid": _INT1,
    }, ["base_points", "eps", "max_len"]),
    "poincare": _params({"x": _NUM, "s_values": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1.2}, "minItems": 2}, "max_len": _INT1}, ["x", "s_values", "max_len"]),
    "pingpong": _params({
        "mode": {"enum": ["certify", "search"]}, "cones": {"type": "array", "items": _ARCS, "minItems": 4, "maxItems": 4},
        "grid": _INT1, "max_power": _INT1, "seeds": _INT1, "max_word_len": _INT1, "free_check_len": _INT1,
    }),
    "subsystem": _params({
        "N": _INT1, "lam": _NUM, "eps": _POS, "arcs": _ARCS, "separating": {"type": "boolean"}, "depth": _INT1, "window": _WINDOW,
    }, ["N", "lam", "eps", "arcs"]),
    "conformal": _params({
        "x": _NUM, "s": _POS, "L_values": {"type": "array", "items": _INT0, "minItems": 1}, "generator": {"type": "string"},
        "delta": _NUM, "offset": _POS,
    }, ["x", "s", "L_values"]),
    "fuchsian-calibrate": _params({"max_len": _INT1, "depth": _INT1, "box_window": _WINDOW, "eps": _POS, "base_depth": _INT1}),
}

_SYSTEM_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"fixture": {"type": "string"}, "params": {"type": "object"}},
            "required": ["fixture"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "generators": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {"name": {"type": "string"}, "map": {"type": ["object", "array"]}},
                        "required": ["name", "map"],
                        "additionalProperties": False,
                    },
                },
                "group_mode": {"type": "boolean"},
            },
            "required": ["generators"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "schottky": {
                    "type": "object",
                    "properties": {
                        "multipliers": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 1}, "minItems": 1},
                        "axes": {"type": "array", "items": _NUM, "minItems": 1},
                        "cover": {"enum": ["projective", "linear"]},
                    },
                    "required": ["multipliers", "axes"],
                    "additionalProperties": False,
                }
            },
            "required": ["schottky"],
            "additionalProperties": False,
        },
    ]
}

DEFAULT_BUDGET = {"max_words": 5_000_000, "max_seconds": 600.0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExperimentConfig",
    "type": "object",
    "properties": {
        "experiment": {"enum": sorted(PARAMETER_SCHEMAS)},
        "system": _SYSTEM_SCHEMA,
        "parameters": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "output_dir": {"type": "string"},
        "budget": {
            "type": "object",
            "properties": {"max_words": _INT1, "max_seconds": _POS},
            "additionalProperties": False,
        },
    },
    "required": ["experiment", "system"],
    "additionalProperties": False,
}

RESULTS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExperimentResults",
    "type": "object",
    "properties": {
        "status": {"enum": ["ok", "budget_exceeded", "unreliable"]},
        "experiment": {"type": "string"},
        "seed": {"type": "integer"},
        "version": {"type": "string"},
        "error": {"type": ["object", "null"]},
    },
    "required": ["status", "experiment", "seed", "version", "error"],
}


class ConfigError(Exception):
    pass


def resolve_config(raw: dict, seed: int | None = None, output_dir: str | None = None) -> dict:
    """Validate and fill defaults; raises ConfigError."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message}") from None
    cfg = copy.deepcopy(raw)
    sysd = cfg["system"]
    params = dict(cfg.get("parameters", {}))
    if "fixture" in sysd:
        try:
            fx = fixtures(sysd["fixture"], **sysd.get("params", {}))
        except UnknownFixture as exc:
            raise ConfigError(str(exc.args[0])) from None
        except (TypeError, ValueError, CircleDimError) as exc:
            raise ConfigError(f"fixture parameters: {exc}") from None
        if fx.config.get("experiment") == cfg["experiment"]:
            params = {**fx.config.get("parameters", {}), **params}
    cfg["parameters"] = params
    try:
        jsonschema.validate(params, PARAMETER_SCHEMAS[cfg["experiment"]])
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"parameters{'.' + path if path else ''}: {exc.message}") from None
    if seed is not None:
        cfg["seed"] = int(seed)
    cfg.setdefault("seed", 0)
    if output_dir is not None:
        cfg["output_dir"] = output_dir
    cfg.setdefault("output_dir", "results")
    cfg["budget"] = {**DEFAULT_BUDGET, **cfg.get("budget", {})}
    return cfg


# ---------------------------------------------------------------------------
# systems


def build_system(sysd: dict):
    """(alphabet, fixture or None, Fuchsian system or None)."""
    if "fixture" in sysd:
        fx = fixtures(sysd["fixture"], **sysd.get("params", {}))
        return fx.system, fx, fx.fuchsian
    if "schottky" in sysd:
        s = sysd["schottky"]
        fs = schottky(s["multipliers"], s["axes"], s.get("cover", "projective"))
        return fs.alphabet, None, fs
    return Alphabet.from_json(sysd), None, None


def _walk(al: Alphabet, params: dict, free: bool = False) -> WalkMeasure:
    w = params.get("weights")
    if w is None:
        return WalkMeasure.uniform(al, free)
    w = np.asarray(w, float)
    return WalkMeasure(al, w / w.sum(), free)


# ---------------------------------------------------------------------------
# experiments: each returns (results dict, {csv name: (header, rows)})


def _exp_lyapunov(al, fx, fs, p, seed, budget):
    lam, err = lyapunov(_walk(al, p), p.get("x0", 0.3), p.get("n", 2000), p.get("trials", 8), seed)
    return {"lyapunov": lam, "stderr": err}, {}


def _exp_stationary(al, fx, fs, p, seed, budget):
    nu = stationary_sample(_walk(al, p), p.get("burn", 200), p.get("count", 20_000), p.get("chains", 16), seed, p.get("residual_threshold", 0.02))
    res = {
        "points": int(nu.points.size),
        "residual": nu.info["residual"],
        "converged": bool(nu.info["converged"]),
        "quantiles": np.quantile(nu.points, [0.05, 0.25, 0.5, 0.75, 0.95]).tolist(),
    }
    if not res["converged"]:
        raise Unreliable("stationary sample did not pass the invariance residual check", res)
    return res, {"stationary.csv": (["point", "weight"], zip(nu.points.tolist(), nu.weights.tolist()))}


def _exp_structure(al, fx, fs, p, seed, budget):
    from .maps import Rotation

    mu = _walk(al, p)
    if "conjugate_by" in p:
        mu = mu.conjugated(Rotation(p["conjugate_by"]))
    seeds = [seed + i for i in range(p.get("seeds", 20))]
    rep = detect_structure(mu, p.get("n", 200), p.get("grid_size", 64), p.get("cluster_eps", 1e-3), seeds)
    res = {
        "d": rep.d,
        "r": rep.r,
        "dr": rep.dr,
        "reliable": rep.reliable,
        "cluster_centers": rep.cluster_centers,
        "lyapunov_per_component": rep.lyapunov_per_component,
        "diagnostics": rep.diagnostics,
    }
    return res, {"clusters.csv": (["center"], [[c] for c in rep.cluster_centers])}


def _exp_dim(al, fx, fs, p, seed, budget):
    mu = _walk(al, p, free=True)
    rec = dim_formula_check(
        mu, p.get("x0", 0.5), p.get("n", 4000), p.get("trials", 16), p.get("burn", 200), p.get("count", 200_000),
        p.get("chains", 64), tuple(p.get("window", (6, 16))), seed,
    )
    res = rec.to_json()
    ref = fx.reference if fx else {}
    ratios = p.get("ratios", ref.get("ratios"))
    if ratios:
        res["moran_dim"] = moran_dim(ratios)
    parcs = p.get("pressure_arcs", ref.get("pressure_arcs"))
    if parcs:
        res["pressure_dim"] = pressure_dim(al.maps, [arc(a) for a in parcs]).value
    return res, {}


def _exp_critexp(al, fx, fs, p, seed, budget):
    cap = budget["max_words"]
    grid = p.get("grid", 8)
    tab = count_by_conorm(al, p["base_points"], p["eps"], p["max_len"], cap, p.get("distortion_cap"), grid)
    window = tuple(p["window"]) if "window" in p else None
    d, diag = delta_fit(tab, window)
    res = {"delta": d, "fit": diag, "complete_up_to": tab.complete_up_to, "table": tab.to_json()}
    if len(tab.by_length) > 2:
        try:
            res["delta_L_minus_2"] = delta_fit(tab.counts_up_to_length(tab.max_len - 2), tuple(diag["window"]))[0]
        except DegenerateFit:
            res["delta_L_minus_2"] = None
    csvs = {"counts.csv": (["n", "count"], tab.to_rows())}
    if p.get("global", False):
        g = count_global_conorm(al, p["max_len"], p.get("global_cells", 256), cap, grid)
        counts = np.asarray(g.counts)
        if np.ptp(counts[: g.complete_up_to + 1]) == 0:
            # a constant count has exact slope zero
            gd, gdiag = 0.0, {"window": [0, g.complete_up_to], "constant": True}
        else:
            gd, gdiag = delta_fit(g)
        res["global"] = {"delta": gd, "fit": gdiag, "complete_up_to": g.complete_up_to}
        res["gap"] = d - gd
        csvs["global_counts.csv"] = (["n", "count"], g.to_rows())
    return res, csvs


def _exp_poincare(al, fx, fs, p, seed, budget):
    tab = poincare_partial(al, p["x"], p["s_values"], p["max_len"], budget["max_words"])
    mid, width = convergence_exponent(tab)
    res = {"exponent": mid, "bracket_width": width, "final_partial_sums": {str(s): float(tab.partial_sums[s][-1]) for s in tab.s_values}}
    return res, {"partial_sums.csv": (["length", "s", "partial_sum"], tab.to_rows())}


def _exp_pingpong(al, fx, fs, p, seed, budget):
    mode = p.get("mode", "certify")
    if mode == "search":
        h1, h2, cert = search_pingpong(_walk(al, p), None, p.get("max_power", 64), p.get("seeds", 8), p.get("max_word_len", 3))
        worst, free = pingpong_free_check(h1, h2, p.get("free_check_len", 6))
        return {"found": True, "certificate": cert.to_json(), "free_check": {"min_displacement": worst, "passed": free}}, {}
    if len(al.maps) < 2:
        raise InvalidMap("pingpong certification needs two generators")
    h1, h2 = al.maps[:2]
    if "cones" in p:
        cones = tuple([arc(a) for a in fam] for fam in p["cones"])
    elif fs is not None:
        cones = pingpong_cones(fs)
    else:
        cones, _ = standard_cones(h1, h2)
    try:
        cert = certify_pingpong(h1, h2, cones, p.get("grid", 64))
    except PingpongViolation as exc:
        return {"certified": False, "condition": exc.condition, "message": str(exc), "witness": exc.witness}, {}
    return {"certified": True, "certificate": cert.to_json()}, {}


def _exp_subsystem(al, fx, fs, p, seed, budget):
    arcs = [arc(a) for a in p["arcs"]]
    sub = extract_subsystem(al, p["N"], p["lam"], p["eps"], arcs, budget["max_words"], p.get("separating", False))
    res = {"subsystem": sub.to_json(al), "kept": len(sub.words)}
    csvs = {"subsystem_words.csv": (["word"], [[" ".join(al.to_names(w))] for w in sub.words])}
    if "depth" in p:
        pts = subsystem_sample(al, sub, p["depth"], budget["max_words"])
        lo, hi = p.get("window", (4, 14))
        est = box_dim(pts, lo, hi)
        res["box_dim"] = est.to_json()
        res["expected_dim"] = math.log2(len(sub.words)) / (p["N"] * abs(p["lam"])) if p["lam"] else None
    return res, csvs


def _exp_conformal(al, fx, fs, p, seed, budget):
    name = p.get("generator", al.names[0])
    f = al.map(al.parse([name]).letters[0])
    s = p["s"]
    delta = p.get("delta", s)
    off = p.get("offset", 0.3)
    rows, ladder = [], []
    for L in p["L_values"]:
        nu = patterson_sullivan(al, p["x"], s, L, budget["max_words"])
        r = {d: conformality_residual(nu, f, d) for d in (delta, delta - off, delta + off)}
        ladder.append({"L": L, "residual": r[delta], "residual_low": r[delta - off], "residual_high": r[delta + off]})
        rows.extend((L, d, v) for d, v in r.items())
    res = {
        "ladder": ladder,
        "monotone": all(a["residual"] > b["residual"] for a, b in zip(ladder, ladder[1:])),
        "mismatch_ratio": min(min(e["residual_low"], e["residual_high"]) / e["residual"] for e in ladder if e["residual"] > 0) if any(e["residual"] > 0 for e in ladder) else None,
    }
    return res, {"conformal.csv": (["L", "delta", "residual"], rows)}


def _exp_fuchsian(al, fx, fs, p, seed, budget):
    if fs is None:
        raise InvalidMap("fuchsian-calibrate needs a Schottky system")
    L = p.get("max_len", 12)
    cap = budget["max_words"]
    dt, ddiag = classical_delta(fs, L, cap=cap)
    base = limit_set_sample(fs, p.get("base_depth", 3), cap=cap)
    base = base[:: max(1, base.size // 6)]
    tab = count_by_conorm(al, base, p.get("eps", 0.01), L, cap)
    dh, hdiag = delta_fit(tab)
    pts = limit_set_sample(fs, p.get("depth", 12), cap=cap)
    bw = p.get("box_window", (8, 48))
    bd = box_dim(pts, bw[0], bw[1])
    pr = schottky_pressure(fs)
    est = {"matrix_count": dt, "conorm_count": dh, "box_dim": bd.value, "pressure": pr.value}
    vals = list(est.values())
    res = {
        "estimates": est,
        "max_pairwise_gap": max(abs(a - b) for a in vals for b in vals),
        "matrix_fit": {k: v for k, v in ddiag.items() if k != "counts"},
        "conorm_fit": hdiag,
        "box_fit": bd.to_json(),
    }
    csvs = {
        "matrix_counts.csv": (["n", "count"], list(enumerate(ddiag["counts"]))),
        "conorm_counts.csv": (["n", "count"], tab.to_rows()),
    }
    return res, csvs


EXPERIMENTS = {
    "lyapunov": _exp_lyapunov,
    "stationary": _exp_stationary,
    "structure": _exp_structure,
    "dim": _exp_dim,
    "critexp": _exp_critexp,
    "poincare": _exp_poincare,
    "pingpong": _exp_pingpong,
    "subsystem": _exp_subsystem,
    "conformal": _exp_conformal,
    "fuchsian-calibrate": _exp_fuchsian,
}

# ---------------------------------------------------------------------------
# output


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _dump(path: Path, obj):
    path.write_text(json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run(raw: dict, seed: int | None = None, output_dir: str | None = None) -> int:
    """Run one config; returns the exit code."""
    given = raw.get("output_dir") if isinstance(raw.get("output_dir"), str) else None
    out = Path(output_dir or given or "results")
    try:
        cfg = resolve_config(raw, seed, output_dir)
    except ConfigError as exc:
        out.mkdir(parents=True, exist_ok=True)
        _dump(out / "manifest.json", {"config": raw, "status": "invalid", "error": str(exc), "version": __version__})
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": cfg, "version": __version__, "numpy": np.__version__, "fixtures": fixture_names()}
    _dump(out / "manifest.json", manifest)

    base = {"experiment": cfg["experiment"], "seed": cfg["seed"], "version": __version__, "error": None}
    t0 = time.perf_counter()
    try:
        al, fx, fs = build_system(cfg["system"])
        res, csvs = EXPERIMENTS[cfg["experiment"]](al, fx, fs, cfg["parameters"], cfg["seed"], cfg["budget"])
        code, status = EXIT_OK, "ok"
    except BudgetExceeded as exc:
        res, csvs, code, status = {}, {}, EXIT_BUDGET, "budget_exceeded"
        base["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except (Unreliable, DegenerateFit, NoBracket, NotFound, EmptySubsystem, NotContracting, OverlapDetected) as exc:
        res, csvs, code, status = {}, {}, EXIT_UNRELIABLE, "unreliable"
        base["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, Unreliable) and exc.report is not None:
            rep = exc.report
            res = rep if isinstance(rep, dict) else {"d": rep.d, "r": rep.r, "dr": rep.dr, "diagnostics": rep.diagnostics}
    except (InvalidMap, ConesOverlap, UnknownFixture, ValueError, KeyError) as exc:
        manifest["status"] = "invalid"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        _dump(out / "manifest.json", manifest)
        print(f"invalid system or parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    elapsed = time.perf_counter() - t0
    if code == EXIT_OK and elapsed > cfg["budget"]["max_seconds"]:
        code, status = EXIT_BUDGET, "budget_exceeded"
        base["error"] = {"type": "TimeBudget", "message": f"run took {elapsed:.1f} s, budget {cfg['budget']['max_seconds']} s"}
    results = {**res, **base, "status": status}
    jsonschema.validate(_clean(results), RESULTS_SCHEMA)
    _dump(out / "results.json", results)
    for name, (header, rows) in csvs.items():
        _write_csv(out / name, header, rows)
    # timing is not part of results.json, which must be reproducible byte for byte
    manifest["status"] = status
    manifest["elapsed_seconds"] = round(elapsed, 3)
    _dump(out / "manifest.json", manifest)
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="circledim", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config", help="path to a JSON config")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--output", help="override the output directory")
    f = sub.add_parser("fixtures", help="built-in systems")
    f.add_argument("--list", action="store_true", help="list fixture names")
    f.add_argument("--show", metavar="NAME", help="print the fixture's system and default config")
    s = sub.add_parser("schema", help="print the config or results JSON schema")
    s.add_argument("which", choices=["config", "results"])
    args = ap.parse_args(argv)

    if args.command == "run":
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if not isinstance(raw, dict):
            print("config must be a JSON object", file=sys.stderr)
            return EXIT_INVALID
        return run(raw, args.seed, args.output)
    if args.command == "fixtures":
        if args.show:
            try:
                fx = fixtures(args.show)
            except UnknownFixture as exc:
                print(exc.args[0], file=sys.stderr)
                return EXIT_INVALID
            print(json.dumps(_clean({"name": fx.name, "description": fx.description, "system": fx.system.to_json(), "config": fx.config, "reference": fx.reference}), indent=2, sort_keys=True))
            return EXIT_OK
        for name in fixture_names():
            print(name)
        return EXIT_OK
    print(json.dumps(CONFIG_SCHEMA if args.which == "config" else RESULTS_SCHEMA, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
