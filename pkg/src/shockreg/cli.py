"""Command-line front end.

    shockreg polar      --rho0 1 --rho1 2 --theta-w 60
    shockreg reflect    --kind rr --theta-w 60 [--straight-shock]
    shockreg angles     --rho0 1 --rho1 2 --theta-min 30 --theta-max 89
    shockreg vorticity  --n-samples 1000 --seed 0
    shockreg commutator --grid-n 256 --eps-schedule 0.125,0.0625,0.03125,0.015625
    shockreg identity   --kind rr --orders 2,4,8,16 --m-schedule 1.5,2,4,8
    shockreg contradict --kind rr --theta-w 60 --curvature-scale 1

Angles are given in degrees.  Every subcommand accepts ``--config FILE`` with
``key = value`` lines (keys are flag names with or without the leading
dashes); flags given on the command line take precedence.  Outputs go to
``--out DIR`` and depend only on the inputs and ``--seed``.

Exit codes: 0 success, 2 invalid input or failed admissibility check,
3 numerical non-convergence, 4 file-system error.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np
import sympy as sp

from .config import (angle_sweep, build_configuration, sonic_angle, validate_admissible_structure,
                     write_geometry_json)
from .config.states import reflection_point
from .diagnostic import (XI1, XI2, AnalyticField, QuadPatch, contradiction_functional,
                         identity_refinement, quadratic_pair, renorm_pair_truncated,
                         truncation_limit_study)
from .errors import NumericalError, PreconditionError, ValidationError
from .fields import commutator_study, random_pair
from .gas import GasParams, PointState
from .jump import OrientedInterface, downstream_state, shock_polar
from .vortcalc import ShockPointData, shock_vorticity_closed_form, solve_shock_vorticity

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

KIND_ALIASES = {
    "rr": "RegularReflectionSym",
    "rr-nonsym": "RegularReflectionNonsym",
    "prandtl": "Prandtl",
    "lighthill": "Lighthill",
    "four-shock": "FourShock",
}

DEFAULTS = {
    "gamma": 1.4, "rho0": 1.0, "rho1": 2.0, "rho2": 2.0, "rho_inf": 1.0, "u_inf": 2.0,
    "theta_w": 60.0, "theta_w1": 60.0, "theta_w2": 65.0,
    "theta_min": 30.0, "theta_max": 89.0, "n_angles": 60,
    "n_polar": 181, "n_samples": 1000, "grid_n": 256, "n_pairs": 1,
    "eps_schedule": "0.125,0.0625,0.03125,0.015625",
    "m_schedule": "1.5,2,4,8,16", "orders": "2,4,8,16",
    "curvature_scale": 1.0, "n_nodes": 64,
    "kind": "rr", "out": ".", "seed": 0, "format": "csv", "straight_shock": False,
}
FLOAT_KEYS = {"gamma", "rho0", "rho1", "rho2", "rho_inf", "u_inf", "theta_w", "theta_w1",
              "theta_w2", "theta_min", "theta_max", "curvature_scale"}
INT_KEYS = {"n_angles", "n_polar", "n_samples", "grid_n", "n_pairs", "n_nodes", "seed"}


# ---------------------------------------------------------------------------
# argument handling

def read_config(path):
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PreconditionError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in DEFAULTS:
                raise PreconditionError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val
    return out


def _coerce(key, val):
    if key in FLOAT_KEYS:
        return float(val)
    if key in INT_KEYS:
        return int(val)
    if key == "straight_shock" and isinstance(val, str):
        return val.strip().lower() in ("1", "true", "yes", "on")
    return val


def resolve(args):
    """Merge defaults, config file and explicit flags into a plain dict (the run spec)."""
    spec = dict(DEFAULTS)
    if args.config:
        spec.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    spec = {k: _coerce(k, v) for k, v in spec.items()}
    spec["command"] = args.command
    return spec


def floats(text, name):
    try:
        vals = [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise PreconditionError(f"{name} must be a comma-separated list of numbers, got {text!r}")
    if not vals:
        raise PreconditionError(f"{name} is empty")
    return vals


def _params(spec):
    return GasParams(spec["gamma"])


def _outpath(spec, name):
    os.makedirs(spec["out"], exist_ok=True)
    return os.path.join(spec["out"], name)


def write_table(spec, stem, header, rows):
    """CSV (header names carry units) or JSON list of records, by --format."""
    def cell(x):
        if isinstance(x, (bool, np.bool_)):
            return int(x)
        if isinstance(x, (int, np.integer)):
            return int(x)
        return float(x)
    if spec["format"] == "json":
        path = _outpath(spec, stem + ".json")
        recs = []
        for r in rows:
            recs.append({h: (None if isinstance(cell(v), float) and not math.isfinite(cell(v)) else cell(v))
                         for h, v in zip(header, r)})
        with open(path, "w") as fh:
            json.dump(recs, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        path = _outpath(spec, stem + ".csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([repr(cell(v)) if isinstance(cell(v), float) else cell(v) for v in r])
    return path


def write_json(spec, name, obj):
    path = _outpath(spec, name)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return path


def build_from_spec(spec, straight=None):
    kind = KIND_ALIASES.get(spec["kind"], spec["kind"])
    params = _params(spec)
    rad = math.radians
    straight = spec["straight_shock"] if straight is None else straight
    if kind == "RegularReflectionSym":
        data = dict(rho0=spec["rho0"], rho1=spec["rho1"], theta_w=rad(spec["theta_w"]))
    elif kind == "RegularReflectionNonsym":
        data = dict(rho0=spec["rho0"], rho1=spec["rho1"], theta_w1=rad(spec["theta_w1"]),
                    theta_w2=rad(spec["theta_w2"]))
    elif kind == "Prandtl":
        data = dict(rho_inf=spec["rho_inf"], u_inf=spec["u_inf"], theta_w=rad(spec["theta_w"]))
    elif kind == "Lighthill":
        data = dict(rho0=spec["rho0"], rho1=spec["rho1"], theta_corner=rad(spec["theta_w"]))
    elif kind == "FourShock":
        data = dict(rho1=spec["rho1"], rho2=spec["rho2"], theta1=rad(spec["theta_w1"]),
                    theta2=rad(spec["theta_w2"]))
    else:
        raise PreconditionError(f"unknown configuration kind {spec['kind']!r}; "
                                f"expected one of {sorted(KIND_ALIASES)}")
    return build_configuration(kind, params, straight_shock=straight, **data)


def _validation_message(report):
    fails = report.failures()
    names = " ".join(fails)
    if "shock_not_straight" in names:
        return ("admissibility check failed: the reflected shock cannot be a straight segment "
                "(its end tangents coincide and the endpoint tangential velocity condition fails)")
    return f"admissibility check failed: {', '.join(fails)}"


# ---------------------------------------------------------------------------
# subcommands

def cmd_polar(spec):
    params = _params(spec)
    inc, P0 = reflection_point(spec["rho0"], spec["rho1"], params, math.radians(spec["theta_w"]))
    up = PointState(spec["rho1"], np.array([inc.u1, 0.0]) - P0)
    entries = shock_polar(up, params, spec["n_polar"], point=P0)
    rows = []
    for e in entries:
        d = e.downstream
        rows.append((e.beta, d.rho, float(d.v @ e.iface.normal), float(d.v @ e.iface.tangent),
                     float(params.pressure(d.rho)), int(e.entropy_ok)))
    header = ["beta_rad", "rho_plus", "vnu_plus", "vtau_plus", "p_plus", "entropy_ok_bool"]
    return [write_table(spec, "polar", header, rows)]


def cmd_reflect(spec):
    cfg = build_from_spec(spec)
    report = validate_admissible_structure(cfg)
    files = [_outpath(spec, "geometry.json"), write_json(spec, "validation.json", report.to_dict())]
    write_geometry_json(cfg, files[0])
    if not report.ok:
        raise ValidationError(_validation_message(report), report)
    return files


def cmd_angles(spec):
    params = _params(spec)
    th = np.radians(np.linspace(spec["theta_min"], spec["theta_max"], spec["n_angles"]))
    rows = angle_sweep(spec["rho0"], spec["rho1"], params, th)
    header = ["theta_w_rad", "rho2_weak", "rho2_strong", "mach_at_P0"]
    files = [write_table(spec, "sweep", header, rows)]
    crit = sonic_angle(spec["rho0"], spec["rho1"], params)
    files.append(write_json(spec, "critical_angles.json", {
        "detachment_rad": crit.detachment, "sonic_rad": crit.sonic,
        "detachment_deg": math.degrees(crit.detachment), "sonic_deg": math.degrees(crit.sonic),
        "existence_interval_rad": list(crit.existence_interval),
        "supersonic_side": crit.supersonic_side}))
    return files


def _vorticity_sample(rng):
    params = GasParams(float(rng.uniform(1.1, 3.0)))
    rho1 = float(np.exp(rng.uniform(-1, 1)))
    c1 = float(params.sound_speed(rho1))
    iface = OrientedInterface((0.0, 0.0), (0.0, 1.0))
    up = PointState(rho1, np.array([rng.uniform(-2, 2) * c1, c1 * rng.uniform(1.2, 4.0)]))
    down = downstream_state(up, iface, params)
    return params, ShockPointData.from_states(down.rho, down.v, rho1, up.v, float(rng.normal()), params)


def cmd_vorticity(spec):
    rng = np.random.default_rng(spec["seed"])
    rows = []
    for i in range(spec["n_samples"]):
        params, d = _vorticity_sample(rng)
        closed = shock_vorticity_closed_form(d)
        direct = float(solve_shock_vorticity(d)[2])
        rel = abs(closed - direct) / max(abs(direct), 1e-300) if direct != 0 else abs(closed)
        rows.append((i, params.gamma, d.rho, d.v[0], d.v[1], d.rho1, d.fs2, closed, direct, rel))
    header = ["sample", "gamma", "rho", "v1", "v2", "rho1", "fs2_per_length", "omega_closed_per_time",
              "omega_direct_per_time", "rel_diff"]
    return [write_table(spec, "vorticity", header, rows)]


def cmd_commutator(spec):
    rng = np.random.default_rng(spec["seed"])
    eps = floats(spec["eps_schedule"], "eps-schedule")
    n = spec["grid_n"]
    if n < 8:
        raise PreconditionError("grid-n must be at least 8")
    if max(eps) > 0.2 or min(eps) < 1.0 / n:
        raise PreconditionError(f"eps-schedule values must lie in [1/grid-n, 0.2], got {eps}")
    rows = []
    for p in range(spec["n_pairs"]):
        b, u = random_pair(rng, n)
        for r in commutator_study(b, u, eps):
            rows.append((p,) + tuple(r))
    header = ["pair", "epsilon_len", "l1_norm", "ratio_vs_previous", "empirical_constant",
              "theoretical_constant"]
    return [write_table(spec, "commutator", header, rows)]


def manufactured_field():
    x, y = XI1, XI2
    return AnalyticField.from_sympy(1 + 0.1 * sp.sin(x) * sp.cos(y), 0.3 - x + 0.2 * y ** 2,
                                    -0.1 - y + 0.1 * sp.sin(2 * x), "manufactured")


def cmd_identity(spec):
    cfg = build_from_spec(spec)
    patch = QuadPatch.from_configuration(cfg)
    fld = manufactured_field()
    zeta = sp.exp(-XI1 ** 2) * (1 + XI2)
    orders = [int(o) for o in floats(spec["orders"], "orders")]
    Ms = floats(spec["m_schedule"], "m-schedule")
    rows = []
    for label, pair in [("quadratic", quadratic_pair())] + [
            (f"truncated_M={M:g}", renorm_pair_truncated(M)) for M in Ms]:
        for n, nodes, res in identity_refinement(patch, fld, pair, zeta, cfg.params, orders):
            rows.append((label, n, nodes, res))
    files = [write_table_mixed(spec, "identity", ["pair", "order_per_direction", "nodes", "residual"], rows)]
    study = truncation_limit_study(fld, patch, Ms)
    files.append(write_table(spec, "truncation", ["M", "volume_term", "boundary_term"], study["rows"]))
    return files


def write_table_mixed(spec, stem, header, rows):
    """Like write_table but the first column is a text label."""
    if spec["format"] == "json":
        recs = [dict(zip(header, (r[0],) + tuple(float(v) if isinstance(v, float) else int(v) for v in r[1:])))
                for r in rows]
        return write_json(spec, stem + ".json", recs)
    path = _outpath(spec, stem + ".csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r[0]] + [repr(float(v)) if isinstance(v, float) else int(v) for v in r[1:]])
    return path


def cmd_contradict(spec):
    cfg = build_from_spec(spec)
    try:
        rep = contradiction_functional(cfg, curvature_scale=spec["curvature_scale"],
                                       n_nodes=spec["n_nodes"])
    except ValidationError as exc:
        raise ValidationError(_validation_message(exc.report), exc.report)
    path = _outpath(spec, "contradiction.json")
    rep.to_json(path)
    return [path]


COMMANDS = {
    "polar": cmd_polar, "reflect": cmd_reflect, "angles": cmd_angles, "vorticity": cmd_vorticity,
    "commutator": cmd_commutator, "identity": cmd_identity, "contradict": cmd_contradict,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="shockreg", description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--gamma", type=float)
        p.add_argument("--rho0", type=float)
        p.add_argument("--rho1", type=float)
        p.add_argument("--theta-w", dest="theta_w", type=float, help="degrees")
        if name in ("reflect", "identity", "contradict"):
            p.add_argument("--kind", choices=sorted(KIND_ALIASES) + sorted(KIND_ALIASES.values()))
            p.add_argument("--theta-w1", dest="theta_w1", type=float, help="degrees")
            p.add_argument("--theta-w2", dest="theta_w2", type=float, help="degrees")
            p.add_argument("--rho2", type=float)
            p.add_argument("--rho-inf", dest="rho_inf", type=float)
            p.add_argument("--u-inf", dest="u_inf", type=float)
            p.add_argument("--straight-shock", dest="straight_shock", action="store_const", const=True)
        if name == "polar":
            p.add_argument("--n-polar", dest="n_polar", type=int)
        if name == "angles":
            p.add_argument("--theta-min", dest="theta_min", type=float, help="degrees")
            p.add_argument("--theta-max", dest="theta_max", type=float, help="degrees")
            p.add_argument("--n-angles", dest="n_angles", type=int)
        if name == "vorticity":
            p.add_argument("--n-samples", dest="n_samples", type=int)
        if name == "commutator":
            p.add_argument("--grid-n", dest="grid_n", type=int)
            p.add_argument("--eps-schedule", dest="eps_schedule")
            p.add_argument("--n-pairs", dest="n_pairs", type=int)
        if name == "identity":
            p.add_argument("--orders")
            p.add_argument("--m-schedule", dest="m_schedule")
        if name == "contradict":
            p.add_argument("--curvature-scale", dest="curvature_scale", type=float)
            p.add_argument("--n-nodes", dest="n_nodes", type=int)
    return ap


def run(spec):
    """Execute a resolved run spec; returns the list of files written."""
    return COMMANDS[spec["command"]](spec)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = resolve(args)
        files = run(spec)
    except OSError as exc:
        print(f"shockreg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, ValueError) as exc:
        print(f"shockreg: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"shockreg: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
