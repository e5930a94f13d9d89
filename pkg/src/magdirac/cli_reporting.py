"""Job configuration, dispatch, and deterministic JSON/CSV output.

Usage: ``magdirac job.json [--out DIR] [--parallel] [--verbose]``.
Exit status: 0 when every check passes, 2 when a numerical result is
inconclusive, 1 on error.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, hopf_spectrum, link_geometry, model_operator
from .special_functions import c_alpha

log = logging.getLogger("magdirac")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
CSV_HEADER = ["value", "multiplicity", "branch", "k", "lambda", "error_estimate"]

_FLUX = {
    "oneOf": [
        {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        {"type": "string", "pattern": r"^\s*\d+\s*/\s*[1-9]\d*\s*$"},
        {"type": "string", "pattern": r"^\s*0?\.\d+\s*$"},
    ]
}
_POINT = {
    "oneOf": [
        {"enum": ["north", "south"]},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_POS = {"type": "number", "exclusiveMinimum": 0}

JOB_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["hopf-spectrum", "circle-scan", "model-check", "geometry"]},
        "link": {
            "type": "object",
            "required": ["fluxes"],
            "additionalProperties": False,
            "properties": {
                "fluxes": {"type": "array", "minItems": 1, "items": _FLUX},
                "points": {"type": "array", "items": _POINT},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid_n": {"type": "integer", "minimum": 16},
                "window": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "kernel_tol": _POS,
                "tolerance": _POS,
                "alphas": {"type": "array", "minItems": 1,
                           "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
                "ell": _POS,
                "n_max": {"type": "integer", "minimum": 0, "maximum": 32},
                "seed": {"type": "integer"},
                "trials": {"type": "integer", "minimum": 1},
                "k_max": {"type": "integer", "minimum": 0},
                "q_max": {"type": "integer", "minimum": 0},
                "epsilon": _POS,
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"csv": {"type": "string"}, "json": {"type": "string"}},
        },
    },
    "allOf": [
        {"if": {"properties": {"kind": {"enum": ["hopf-spectrum", "geometry"]}}},
         "then": {"required": ["link"]}},
    ],
}


class JobError(ValueError):
    pass


def parse_flux(x):
    """'p/q' and decimal strings become exact fractions; numbers stay floats."""
    if isinstance(x, str):
        return Fraction(x.replace(" ", ""))
    return float(x)


def parse_point(p):
    return p if isinstance(p, str) else (float(p[0]), float(p[1]))


def validate(config):
    validator = jsonschema.Draft202012Validator(JOB_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{where}: {e.message}")
        raise JobError("invalid job configuration:\n  " + "\n  ".join(msgs))


def load_job(path):
    text = Path(path).read_text()
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JobError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validate(config)
    return config


def _canon(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else obj.numerator
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(format(x, ".15g"))
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def canonical_json(obj):
    """Sorted keys, floats rounded to 15 significant digits, trailing newline."""
    return json.dumps(_canon(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".15g")
    return str(x)


def csv_text(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    rows = table.rows if hasattr(table, "rows") else table
    for r in sorted(rows, key=lambda r: (r.value, r.k, r.branch, r.lam or 0.0)):
        w.writerow([_fmt(float(r.value)), r.multiplicity, r.branch, r.k,
                    _fmt(None if r.lam is None else float(r.lam)),
                    _fmt(None if r.error_estimate is None else float(r.error_estimate))])
    return buf.getvalue()


def emit_csv(table, path):
    """Write a SpectrumTable (or a list of rows) as CSV with LF line endings."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(csv_text(table))
    return path


def _workers(parallel):
    if not parallel:
        return 1
    cap = os.environ.get("MAGDIRAC_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise JobError(f"MAGDIRAC_THREADS must be an integer, got {cap!r}") from None
    return n


def _hopf_job(config, params, workers):
    link = config["link"]
    fluxes = [parse_flux(a) for a in link["fluxes"]]
    points = [parse_point(p) for p in link["points"]] if "points" in link else None
    try:
        cfg = hopf_spectrum.HopfConfig(fluxes, points)
    except (hopf_spectrum.HopfError, ValueError) as exc:
        raise JobError(str(exc)) from None
    n = params.get("grid_n", 4000)
    kd = hopf_spectrum.kernel_dimension(cfg, tol=params.get("kernel_tol", 1e-6), n=n)
    result = {"c": cfg.c, "m": cfg.m, "kernel_dim": kd.count, "kernel_dim_upper": kd.upper,
              "kernel_method": kd.method}
    flags = [] if kd.conclusive else ["kernel dimension inconclusive"]
    table = None
    if "window" in params:
        provider = hopf_spectrum.numerical_s2_provider(cfg, n=n, workers=workers)
        table = hopf_spectrum.assemble_spectrum(cfg, params["window"], provider)
        result["rows"] = [{"value": r.value, "multiplicity": r.multiplicity, "branch": r.branch,
                           "k": r.k, "lambda": r.lam, "error_estimate": r.error_estimate}
                          for r in table.rows]
        tol = params.get("tolerance", 1e-3)
        bad = [r for r in table.rows if r.error_estimate is not None and r.error_estimate > tol]
        if bad:
            flags.append(f"{len(bad)} rows exceed error tolerance {tol}")
    return result, flags, table


def _scan_job(config, params, workers):
    alphas = params.get("alphas", [round(0.05 * i, 2) for i in range(1, 20)])
    rows = hopf_spectrum.circle_zero_mode_scan(alphas, n=params.get("grid_n", 4000), workers=workers)
    out = [{"alpha": r.alpha, "c": r.c, "m": r.m, "k": r.k, "critical": r.critical,
            "nearest": r.nearest, "gap": r.gap, "error_estimate": r.error_estimate,
            "status": r.status} for r in rows]
    flags = [f"alpha={r.alpha}: gap within error bars" for r in rows if r.status != "pass"]
    return {"scan": out}, flags, None


def _model_job(config, params, workers):
    alphas = params.get("alphas", [0.25, 0.5, 0.75])
    ell = params.get("ell", 2.0 * math.pi)
    nmax = params.get("n_max", 4)
    trials = params.get("trials", 5)
    tol = params.get("tolerance", 1e-5)
    rng = np.random.default_rng(params.get("seed", 0))
    rows, flags = [], []
    for a in alphas:
        for sign in (1, -1):
            worst_def = worst_ext = worst_norm = 0.0
            worst_gap = math.inf
            for _ in range(trials):
                c = {n: complex(*rng.normal(size=2)) for n in range(-nmax, nmax + 1)}
                elem = model_operator.deficiency_element(ell, a, c, sign)
                worst_def = max(worst_def, model_operator.deficiency_residual(elem))
                mode = model_operator.singular_mode(ell, a, c, sign)
                worst_ext = max(worst_ext, model_operator.extension_action_residual(mode))
                f = mode.on_grid()
                worst_norm = max(worst_norm, abs(f.norm2() / model_operator.singular_l2_norm(mode) - 1))
                l2 = sum(abs(v) ** 2 for v in c.values())
                gap = model_operator.graph_norm2(f) - model_operator.graph_norm_lower_bound(a) * l2
                worst_gap = min(worst_gap, gap)
            ok = worst_def <= tol and worst_ext <= tol and worst_norm <= tol and worst_gap >= -1e-6
            rows.append({"alpha": a, "sign": sign, "deficiency_residual": worst_def,
                         "extension_residual": worst_ext, "norm_relative_error": worst_norm,
                         "graph_norm_excess": worst_gap, "pass": ok})
            if not ok:
                flags.append(f"alpha={a}, sign={sign} outside tolerance")
    consts = [{"alpha": a, "c_alpha": c_alpha(a).value, "c_one_minus_alpha": c_alpha(1 - a).value,
               "graph_norm_bound": model_operator.graph_norm_lower_bound(a)} for a in alphas]
    return {"checks": rows, "constants": consts}, flags, None


def _geometry_job(config, params, workers):
    link = config["link"]
    fluxes = [parse_flux(a) for a in link["fluxes"]]
    pts = link.get("points")
    if pts is None or len(pts) != len(fluxes):
        raise JobError("geometry jobs need one base point per flux")
    vecs = []
    for p in pts:
        if isinstance(p, str):
            vecs.append(np.array([1.0, 0.0, 0.0]) if p == "north" else np.array([-1.0, 0.0, 0.0]))
        else:
            th, ph = float(p[0]), float(p[1])
            vecs.append(np.array([math.cos(th), math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph)]))
    curves = [link_geometry.hopf_preimage(v, n_samples=512) for v in vecs]
    k = len(curves)
    lk = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            lk[i][j] = lk[j][i] = link_geometry.linking_number(curves[i], curves[j])
    fv = [float(a) for a in fluxes]
    slopes = [link_geometry.slope_c_k(fv, lk, i) for i in range(k)] if k > 1 else [0.0]
    return {"link_matrix": lk, "slopes": slopes, "lengths": [c.length for c in curves]}, [], None


HANDLERS = {"hopf-spectrum": _hopf_job, "circle-scan": _scan_job,
            "model-check": _model_job, "geometry": _geometry_job}


def run_job(config, parallel=False):
    """Validate and execute a job; returns (envelope, table or None, wall time)."""
    validate(config)
    params = config.get("params", {})
    start = time.perf_counter()
    result, flags, table = HANDLERS[config["kind"]](config, params, _workers(parallel))
    wall = time.perf_counter() - start
    envelope = {
        "inputs": config,
        "version": __version__,
        "kind": config["kind"],
        "result": result,
        "flags": flags,
        "status": "pass" if not flags else "inconclusive",
    }
    return envelope, table, wall


def main(argv=None):
    ap = argparse.ArgumentParser(prog="magdirac", description=__doc__.splitlines()[0])
    ap.add_argument("job", help="job configuration (JSON)")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--parallel", action="store_true", help="parallel sector maps")
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = load_job(args.job)
        envelope, table, wall = run_job(config, parallel=args.parallel)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        names = config.get("output", {})
        json_path = out / names.get("json", "result.json")
        json_path.write_text(canonical_json(envelope), encoding="ascii")
        # timing is kept out of the envelope so that reruns are byte-identical
        (out / "timing.json").write_text(canonical_json({"wall_time_s": wall}), encoding="ascii")
        if table is not None:
            emit_csv(table, out / names.get("csv", "spectrum.csv"))
        log.info("wrote %s (%.2f s)", json_path, wall)
        for f in envelope["flags"]:
            log.warning("%s", f)
    except (JobError, OSError, ValueError) as exc:
        print(f"magdirac: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if envelope["status"] == "pass" else EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
