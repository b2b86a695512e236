"""JSON geometry export and angle-sweep tables."""

import csv
import json
import math

import numpy as np

from ..errors import DetachedError
from ..gas import GasParams
from .model import Configuration
from .states import solve_state2

SAMPLES_PER_CURVE = 256
SWEEP_COLUMNS = ("theta_w_rad", "rho2_weak", "rho2_strong", "mach_at_P0")


def _f(x):
    return float(x) if np.isfinite(x) else None


def _seg_record(seg, n):
    pts = seg.point(np.linspace(0.0, 1.0, n))
    return {"name": seg.name, "kind": seg.kind.value, "points": [[_f(a), _f(b)] for a, b in pts]}


def geometry_dict(cfg: Configuration, n=SAMPLES_PER_CURVE):
    return {
        "kind": cfg.kind,
        "gamma": cfg.params.gamma,
        "inventory": cfg.inventory(),
        "points": {k: [_f(v[0]), _f(v[1])] for k, v in sorted(cfg.points.items())},
        "sonic_circles": [{"state": c.state, "center": [_f(c.center[0]), _f(c.center[1])],
                           "radius": _f(c.radius)} for c in cfg.sonic_circles],
        "states": {k: {"rho": _f(s.rho), "u": [_f(s.u[0]), _f(s.u[1])]} for k, s in sorted(cfg.states.items())},
        "regions": [{"label": r.label, "state": r.state} for r in cfg.regions],
        "gamma_ext": [_seg_record(s, n) for s in cfg.gamma_ext],
        "gamma_int": [_seg_record(s, n) for s in cfg.gamma_int],
        "straight_shocks": [dict(_seg_record(s.segment, n), upstream=s.upstream, downstream=s.downstream)
                            for s in cfg.straight_shocks],
    }


def write_geometry_json(cfg: Configuration, path, n=SAMPLES_PER_CURVE):
    with open(path, "w") as fh:
        json.dump(geometry_dict(cfg, n), fh, indent=2, sort_keys=True)
        fh.write("\n")


def angle_sweep(rho0, rho1, params: GasParams, angles):
    """Rows (theta, rho2_weak, rho2_strong, mach of the weak state at P0); nan when detached."""
    rows = []
    for th in angles:
        try:
            sol = solve_state2(rho0, rho1, params, float(th))
        except DetachedError:
            rows.append((float(th), math.nan, math.nan, math.nan))
            continue
        rows.append((float(th), sol.weak.state.rho, sol.strong.state.rho, sol.weak.mach(params)))
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([repr(float(x)) for x in r])
