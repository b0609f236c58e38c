"""Command-line frontend: ``compton-xsec <command> [flags]``.

Exit codes: 0 success, 2 invalid parameter, 3 numerical non-convergence,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import __version__
from .amplitudes import HydrogenAngle, j0_scalar
from .constants import HARTREE_EV, UnknownUnitError, to_au
from .cross_sections import Units, fdcs_values
from .errors import ComptonError, NonConvergenceError, OracleAccuracyError
from .kinematics import KinematicInput, Target, TMode
from .output import convert_table, to_csv, to_json
from .quadrature import ddcs_phi1
from .scans import FIGURES, ScanRecord, ScanTable, figure_scan, trace_resonance_line

__all__ = ["EXIT_INVALID", "EXIT_IO", "EXIT_NONCONVERGENCE", "build_parser", "main", "parse_quantity"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")
_ENERGY_UNITS = {"au", "hartree", "eV", "keV"}
_ANGLE_UNITS = {"rad", "deg"}


class ParameterError(ValueError):
    pass


def parse_quantity(text: str, kind: str) -> tuple[float, str]:
    """Parse ``"27.2eV"`` or ``"60deg"`` into (value in a.u./rad, unit).

    A bare number is taken as atomic units (energies) or radians (angles).
    """
    m = _QUANTITY.match(text)
    if not m:
        raise ParameterError(f"cannot parse {text!r} as a number with a unit suffix")
    value = float(m.group(1))
    allowed = _ENERGY_UNITS if kind == "energy" else _ANGLE_UNITS
    unit = m.group(2) or ("au" if kind == "energy" else "rad")
    if unit not in allowed:
        raise ParameterError(f"unit {unit!r} not valid for {kind}; use one of {sorted(allowed)}")
    try:
        return to_au(value, unit), unit
    except UnknownUnitError as exc:
        raise ParameterError(str(exc)) from None


def _energy(text):
    return parse_quantity(text, "energy")


def _angle(text):
    return parse_quantity(text, "angle")


def _wrap(parser_fn):
    def conv(text):
        try:
            return (parser_fn(text), text)
        except ParameterError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    conv.__name__ = parser_fn.__name__.lstrip("_")
    return conv


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _count(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("grid sizes must be >= 2")
    return v


def _add_output(p):
    p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--units", choices=[u.value for u in Units], default="au",
                   help="cross-section units: au, barn (barn/(eV sr^2)) or cm2")


def _add_common(p):
    p.add_argument("--t-mode", choices=[m.value for m in TMode], default=TMode.FIXED_UNITY.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compton-xsec",
                                     description="Compton ionization / disintegration cross sections")
    parser.add_argument("--version", action="version", version=f"compton_xsec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fdcs", help="fully differential cross section at one point")
    p.add_argument("--target", choices=["ps", "h"], required=True)
    p.add_argument("--omega", type=_wrap(_energy), required=True)
    p.add_argument("--Ee", type=_wrap(_energy), required=True)
    p.add_argument("--theta", type=_wrap(_angle), required=True)
    p.add_argument("--phi1", type=_wrap(_angle), required=True)
    p.add_argument("--Phi", type=_wrap(_angle), required=True)
    p.add_argument("--epsilon", type=_nonneg_float, default=0.0)
    p.add_argument("--hydrogen-angle", choices=[a.value for a in HydrogenAngle],
                   default=HydrogenAngle.MOMENTUM_TRANSFER.value)
    _add_common(p)
    _add_output(p)

    p = sub.add_parser("ddcs", help="cross section integrated over photon angles")
    p.add_argument("--target", choices=["ps", "h"], required=True)
    p.add_argument("--omega", type=_wrap(_energy), required=True)
    p.add_argument("--Ee", type=_wrap(_energy), required=True)
    p.add_argument("--phi1", type=_wrap(_angle), required=True)
    p.add_argument("--rel-tol", type=_positive_float, default=1e-4)
    p.add_argument("--epsilon", type=_nonneg_float, default=0.0)
    _add_common(p)
    _add_output(p)

    for name in FIGURES:
        p = sub.add_parser(f"scan-{name}", help=f"data for {name}")
        p.add_argument("--n-angle", type=_count, default=181)
        p.add_argument("--n-energy", type=_count, default=200)
        p.add_argument("--rel-tol", type=_positive_float, default=1e-4)
        p.add_argument("--epsilon", type=_positive_float, default=0.01,
                       help="resonance smoothing for the surface scan")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: COMPTON_XSEC_THREADS or all cores)")
        _add_common(p)
        _add_output(p)

    p = sub.add_parser("resonance-line", help="E_e(theta) along the positronium resonance")
    p.add_argument("--omega", type=_wrap(_energy), required=True)
    p.add_argument("--n-angle", type=_count, default=181)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("oracle-check", help="closed-form J0 against partial-wave summation")
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=_positive_float, default=1e-4)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _base_meta(command):
    return {"engine": f"compton_xsec {__version__}", "command": command}


def _quantity_meta(meta, name, pair, unit_kind):
    (value, _unit), text = pair
    meta[name] = text
    meta[f"{name}_{'au' if unit_kind == 'energy' else 'rad'}"] = value


def _run_fdcs(args):
    target = Target.from_name(args.target)
    vals = {k: getattr(args, k)[0][0] for k in ("omega", "Ee", "theta", "phi1", "Phi")}
    KinematicInput(vals["omega"], vals["Ee"], vals["theta"], vals["phi1"], vals["Phi"],
                   TMode(args.t_mode))  # validates ranges
    value = float(fdcs_values(target, vals["omega"], vals["Ee"], vals["theta"], vals["phi1"],
                              vals["Phi"], args.epsilon, TMode(args.t_mode),
                              HydrogenAngle(args.hydrogen_angle)))
    meta = _base_meta("fdcs")
    meta["target"] = target.short_name
    for k, kind in (("omega", "energy"), ("Ee", "energy"), ("theta", "angle"),
                    ("phi1", "angle"), ("Phi", "angle")):
        _quantity_meta(meta, k, getattr(args, k), kind)
    meta.update({"epsilon": args.epsilon, "t_mode": args.t_mode,
                 "hydrogen_angle": args.hydrogen_angle, "units": "au"})
    rec = ScanRecord((vals["omega"], vals["Ee"], vals["theta"], vals["phi1"], vals["Phi"]),
                     value, "au", tag=target.short_name)
    return ScanTable("fdcs", ("omega_i", "E_e", "theta", "phi1", "Phi"),
                     ("au", "au", "rad", "rad", "rad"), [rec], meta, "fdcs")


def _run_ddcs(args):
    target = Target.from_name(args.target)
    omega, Ee, phi1 = args.omega[0][0], args.Ee[0][0], args.phi1[0][0]
    s = ddcs_phi1(target, omega, Ee, phi1, args.rel_tol, args.epsilon, TMode(args.t_mode))
    meta = _base_meta("ddcs")
    meta["target"] = target.short_name
    _quantity_meta(meta, "omega", args.omega, "energy")
    _quantity_meta(meta, "Ee", args.Ee, "energy")
    _quantity_meta(meta, "phi1", args.phi1, "angle")
    meta.update({"rel_tol": args.rel_tol, "epsilon": args.epsilon, "t_mode": args.t_mode,
                 "evaluations": s.extra["evaluations"], "units": "au"})
    rec = ScanRecord((omega, Ee, phi1), s.value, "au", s.error_estimate, target.short_name)
    return ScanTable("ddcs", ("omega_i", "E_e", "phi1"), ("au", "au", "rad"), [rec], meta, "ddcs")


def _run_scan(args):
    name = args.command.removeprefix("scan-")
    table = figure_scan(name, n_angle=args.n_angle, n_energy=args.n_energy,
                        rel_tol=args.rel_tol, epsilon=args.epsilon,
                        t_mode=TMode(args.t_mode), workers=args.workers)
    meta = _base_meta(args.command)
    meta.update(table.metadata)
    meta.update({"n_angle": args.n_angle, "n_energy": args.n_energy, "units": "au"})
    table.metadata = meta
    if "E_e" in table.coord_names:
        idx = table.coord_names.index("E_e")
        table.derived = {"E_e_eV": lambda r, i=idx: r.coordinates[i] * HARTREE_EV}
    return table


def _run_resonance(args):
    omega = args.omega[0][0]
    thetas = np.linspace(math.pi / (args.n_angle - 1), math.pi, args.n_angle - 1)
    records = trace_resonance_line(omega, thetas)
    meta = _base_meta("resonance-line")
    _quantity_meta(meta, "omega", args.omega, "energy")
    meta["n_angle"] = args.n_angle
    return ScanTable("resonance-line", ("theta",), ("rad",), records, meta, "E_e",
                     derived={"theta_deg": lambda r: math.degrees(r.coordinates[0]),
                              "E_e_eV": lambda r: r.value * HARTREE_EV})


def _run_oracle(args):
    from .oracle import OracleConfig, j0_numeric

    rng = np.random.default_rng(args.seed)
    cfg = OracleConfig()
    records = []
    worst = 0.0
    for _ in range(args.points):
        q, p = rng.uniform(0.3, 1.5, 2)
        c = rng.uniform(-1.0, 1.0)
        Z = float(rng.choice([0.5, 1.0]))
        closed = abs(complex(j0_scalar(q, p, c, Z))) ** 2
        numeric = abs(j0_numeric(q, p, c, Z, cfg)) ** 2
        rel = abs(closed - numeric) / numeric
        worst = max(worst, rel)
        status = "ok" if rel <= args.tolerance else "failed"
        records.append(ScanRecord((q, p, c, Z, closed, numeric), rel, "1", tag="J0", status=status))
    meta = _base_meta("oracle-check")
    meta.update({"points": args.points, "seed": args.seed, "tolerance": args.tolerance,
                 "l_max": cfg.l_max, "radial_cutoff": cfg.radial_cutoff, "worst_rel_diff": worst})
    table = ScanTable("oracle-check", ("q", "p", "cos", "Z", "closed_msq", "oracle_msq"),
                      ("au", "au", "1", "1", "au", "au"), records, meta, "rel_diff")
    return table, worst <= args.tolerance


def _write(text, path):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(args) -> int:
    ok = True
    if args.command == "fdcs":
        table = _run_fdcs(args)
    elif args.command == "ddcs":
        table = _run_ddcs(args)
    elif args.command.startswith("scan-"):
        table = _run_scan(args)
    elif args.command == "resonance-line":
        table = _run_resonance(args)
    elif args.command == "oracle-check":
        table, ok = _run_oracle(args)
    else:  # pragma: no cover - argparse restricts the choices
        raise ParameterError(f"unknown command {args.command}")

    units = getattr(args, "units", "au")
    if units != "au":
        table = convert_table(table, units)
    text = to_json(table) if args.format == "json" else to_csv(table)
    _write(text, args.output)

    failed = sum(r.status != "ok" for r in table.records)
    if failed:
        print(f"compton-xsec: {failed} of {len(table.records)} points failed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NONCONVERGENCE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except (NonConvergenceError, OracleAccuracyError) as exc:
        print(f"compton-xsec: non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"compton-xsec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ComptonError, ValueError) as exc:
        print(f"compton-xsec: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
