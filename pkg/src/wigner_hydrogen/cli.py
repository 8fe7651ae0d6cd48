"""Command-line front end: ``wigner-hydrogen {eval|grid|marginal|oracle|check}``.

Every subcommand reads numerical settings from ``--config FILE`` (falling
back to ``$WIGNER_HYDROGEN_CONFIG``); explicit flags override file values.

Exit codes: 0 success, 1 failed audit, 2 unsupported state or bad input,
3 convergence failure, 4 grid written with failed (NaN) cells.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_checks
from .core import (CONFIG_ENV_VAR, ConvergenceFailure, PhasePoint, QuantumNumbers,
                   UnsupportedState, load_config)
from .oracle import OracleSettings, ToleranceNotMet, oracle_integral
from .wigner import closed_form_density, marginal_momentum, marginal_position, wigner_eval, \
    wigner_many

EXIT_AUDIT = 1
EXIT_UNSUPPORTED = 2
EXIT_CONVERGENCE = 3
EXIT_NAN_CELLS = 4

WEIGHTS = ("none", "r2k2", "4pir2k2")
_WEIGHT_LABELS = {"none": "W", "r2k2": "r^2*k^2*W", "4pir2k2": "4*pi*r^2*k^2*W"}


def _vector(text):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def _range(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise argparse.ArgumentTypeError(f"range must be finite with hi > lo, got {text!r}")
    return lo, hi


def _count(text):
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("point counts must be at least 2")
    return n


def _fmt(x):
    return "%.17g" % x


def _config(args):
    return load_config(args.config, bohr_radius=args.bohr_radius, quad_tol=args.quad_tol,
                       panel_fraction=args.panel_fraction)


@dataclass(frozen=True)
class GridSpec:
    """One rectangular slice of phase space.

    ``kind="rk"``: axes ``|r|`` and ``|k|`` with fixed directions
    ``(theta1, phi1)`` for ``r_vec`` and ``(theta2, phi2)`` for ``k_vec``.
    ``kind="rphi"``: axes ``|r|`` and ``phi2`` at fixed ``|k|``.
    """

    state: QuantumNumbers
    kind: str
    axis1: tuple
    axis2: tuple
    n1: int
    n2: int
    theta1: float = 0.0
    phi1: float = 0.0
    theta2: float = 0.0
    phi2: float = 0.0
    k: float = 0.2
    weight: str = "none"

    def __post_init__(self):
        if self.kind not in ("rk", "rphi"):
            raise ValueError(f"unknown slice kind {self.kind!r}")
        if self.weight not in WEIGHTS:
            raise ValueError(f"unknown weight {self.weight!r}")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("point counts must be at least 2")
        for lo, hi in (self.axis1, self.axis2):
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ValueError("axis ranges must be finite with positive length")

    @property
    def axis_names(self):
        return ("r", "k") if self.kind == "rk" else ("r", "phi2")

    def nodes(self):
        """Axis values and the matching ``r_vec``, ``k_vec`` arrays (axis1 major)."""
        a1 = np.linspace(*self.axis1, self.n1)
        a2 = np.linspace(*self.axis2, self.n2)
        A1, A2 = np.meshgrid(a1, a2, indexing="ij")
        r_dir = _direction(self.theta1, self.phi1)
        if self.kind == "rk":
            r_vec = A1[..., None] * r_dir
            k_vec = A2[..., None] * _direction(self.theta2, self.phi2)
            k_mag = A2
        else:
            r_vec = A1[..., None] * r_dir
            st = math.sin(self.theta2)
            k_vec = self.k * np.stack([st * np.cos(A2), st * np.sin(A2),
                                       np.full_like(A2, math.cos(self.theta2))], axis=-1)
            k_mag = np.full_like(A2, self.k)
        return A1, A2, r_vec, k_vec, k_mag

    def weight_factor(self, r, k):
        if self.weight == "none":
            return np.ones_like(r)
        factor = r * r * k * k
        return factor if self.weight == "r2k2" else 4 * math.pi * factor


def _direction(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def evaluate_grid(spec, cfg):
    """Return ``(axis1, axis2, weighted values)`` flattened in axis1-major order."""
    A1, A2, r_vec, k_vec, k_mag = spec.nodes()
    w, _, _, failed = wigner_many(spec.state, r_vec, k_vec, cfg)
    values = np.where(failed, np.nan, w * spec.weight_factor(A1, k_mag))
    return A1.ravel(), A2.ravel(), values.ravel()


def write_grid_csv(path, spec, axis1, axis2, values):
    label = _WEIGHT_LABELS[spec.weight]
    lines = [",".join(spec.axis_names + (label,))]
    lines += [f"{_fmt(x)},{_fmt(y)},{_fmt(v)}" for x, y, v in zip(axis1, axis2, values)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_eval(args):
    cfg = _config(args)
    qn = QuantumNumbers.parse(args.state)
    val = wigner_eval(qn, PhasePoint(args.r, args.k), cfg)
    record = {"state": qn.label, "r": list(args.r), "k": list(args.k), "w": val.w,
              "im_residual": val.im_residual, "est_error": val.est_error}
    print(json.dumps(record))
    return 0


def cmd_oracle(args):
    cfg = _config(args)
    qn = QuantumNumbers.parse(args.state)
    settings = OracleSettings(q_cutoff=args.q_cutoff, radial_order=args.radial_order,
                              angular_order=args.angular_order, tol=args.tol)
    res = oracle_integral(qn, args.r, args.k, settings, cfg.bohr_radius)
    record = {"state": qn.label, "r": list(args.r), "k": list(args.k), "w": res.w,
              "im_residual": abs(res.value.imag), "est_error": res.est_error}
    print(json.dumps(record))
    if res.est_error > settings.tol:
        raise ToleranceNotMet(f"oracle error estimate {res.est_error:.3g} exceeds "
                              f"{settings.tol:g}", res.est_error)
    return 0


def cmd_grid(args):
    cfg = _config(args)
    qn = QuantumNumbers.parse(args.state)
    default2 = (0.0, 3.0) if args.kind == "rk" else (0.0, math.pi)
    theta2 = args.theta2 if args.theta2 is not None else args.theta
    spec = GridSpec(qn, args.kind, args.axis1 or (0.0, 10.0), args.axis2 or default2,
                    args.n1, args.n2, theta1=args.theta1, phi1=args.phi1, theta2=theta2,
                    phi2=args.phi2, k=args.k, weight=args.weight)
    axis1, axis2, values = evaluate_grid(spec, cfg)
    out = Path(args.out)
    write_grid_csv(out, spec, axis1, axis2, values)
    n_nan = int(np.isnan(values).sum())
    meta = {"state": qn.label, "kind": spec.kind, "axes": list(spec.axis_names),
            "axis1": list(spec.axis1), "axis2": list(spec.axis2), "n1": spec.n1, "n2": spec.n2,
            "theta1": spec.theta1, "phi1": spec.phi1, "theta2": spec.theta2, "phi2": spec.phi2,
            "k": spec.k if spec.kind == "rphi" else None, "weight": spec.weight,
            "bohr_radius": cfg.bohr_radius, "quad_tol": cfg.quad_tol,
            "panel_fraction": cfg.panel_fraction, "failed_cells": n_nan,
            "version": __version__}
    sidecar = out.with_name(out.name + ".json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if n_nan:
        print(f"{n_nan} of {values.size} cells failed to converge (NaN)", file=sys.stderr)
        return EXIT_NAN_CELLS
    return 0


def cmd_marginal(args):
    cfg = _config(args)
    qn = QuantumNumbers.parse(args.state)
    points = list(args.point or [])
    direction = np.asarray(args.direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    points += [tuple(float(x) for x in rad * direction) for rad in (args.radii or [])]
    if not points:
        points = [(0.0, 0.0, 0.0)]
    func = marginal_position if args.axis == "r" else marginal_momentum
    lines = ["x,y,z,marginal,closed_form,diff"]
    for p in points:
        m = func(qn, p, cfg)
        exact = closed_form_density(qn, args.axis, p, cfg.bohr_radius)
        lines.append(",".join(_fmt(v) for v in (*p, m, exact, m - exact)))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args):
    cfg = _config(args)
    results = run_checks(args.state, args.level, cfg)
    for res in results:
        print(res.line())
    return 0 if all(r.passed for r in results) else EXIT_AUDIT


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value settings file (default: ${CONFIG_ENV_VAR})")
    common.add_argument("--bohr-radius", "-a", type=float, default=None)
    common.add_argument("--quad-tol", type=float, default=None)
    common.add_argument("--panel-fraction", type=float, default=None)
    common.add_argument("--state", required=True, help="1s, 2s, 2p0, 2p+1, 2p-1 or n,l,m")

    parser = argparse.ArgumentParser(prog="wigner-hydrogen", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="Wigner function at one phase point")
    p.add_argument("--r", type=_vector, required=True, help="position x,y,z")
    p.add_argument("--k", type=_vector, required=True, help="wavevector x,y,z")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", parents=[common], help="brute-force transform at one point")
    p.add_argument("--r", type=_vector, required=True)
    p.add_argument("--k", type=_vector, required=True)
    p.add_argument("--q-cutoff", type=float, default=None)
    p.add_argument("--radial-order", type=int, default=12)
    p.add_argument("--angular-order", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("grid", parents=[common], help="CSV slice of phase space")
    p.add_argument("--kind", choices=("rk", "rphi"), default="rk")
    p.add_argument("--axis1", type=_range, default=None, help="range of |r| (default 0,10)")
    p.add_argument("--axis2", type=_range, default=None,
                   help="range of |k| (rk, default 0,3) or phi2 (rphi, default 0,pi)")
    p.add_argument("--n1", type=_count, default=50)
    p.add_argument("--n2", type=_count, default=50)
    p.add_argument("--theta", type=float, default=0.0,
                   help="angle between r_vec and k_vec for the default geometry")
    p.add_argument("--theta1", type=float, default=0.0)
    p.add_argument("--phi1", type=float, default=0.0)
    p.add_argument("--theta2", type=float, default=None, help="polar angle of k_vec (overrides --theta)")
    p.add_argument("--phi2", type=float, default=0.0)
    p.add_argument("--k", type=float, default=0.2, help="|k| for rphi slices")
    p.add_argument("--weight", choices=WEIGHTS, default="none")
    p.add_argument("--out", required=True, help="CSV path; metadata goes to <out>.json")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("marginal", parents=[common], help="marginals against closed forms")
    p.add_argument("--axis", choices=("r", "k"), required=True)
    p.add_argument("--point", type=_vector, action="append", help="sample vector (repeatable)")
    p.add_argument("--radii", type=lambda s: [float(x) for x in s.split(",")], default=None,
                   help="comma-separated magnitudes along --direction")
    p.add_argument("--direction", type=_vector, default=(0.0, 0.0, 1.0))
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("check", parents=[common], help="invariant audit")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedState as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ConvergenceFailure, ToleranceNotMet) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
