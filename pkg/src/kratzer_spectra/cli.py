"""Command-line front end: kratzer-spectra <command> [flags].

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

import argparse
import ast
import json
import math
import operator
import random
import sys

import numpy as np

from . import basis, greens, oracle, spectral
from .errors import KratzerError
from .model import ANGLE_INTERVALS, ANGLE_NAMES, CouplingParams, classify, extension, potential_profile

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# flag parsing

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_angle(text):
    """Radians; arithmetic with numbers and ``pi`` is allowed (``pi/2``, ``-3*pi/4``)."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise UsageError(f"cannot parse angle {text!r}")
    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError):
        raise UsageError(f"cannot parse angle {text!r}") from None


def parse_grid(text):
    """``a:b:n`` (linear, inclusive), ``log:a:b:n`` (geometric) or a comma list."""
    try:
        parts = text.split(":")
        if parts[0] == "log" and len(parts) == 4:
            return [float(v) for v in np.geomspace(float(parts[1]), float(parts[2]), int(parts[3]))]
        if len(parts) == 3:
            return [float(v) for v in np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))]
        if len(parts) == 1:
            return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        pass
    raise UsageError(f"cannot parse grid {text!r}")


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def _params(args):
    if args.g1 is None or args.g2 is None:
        raise UsageError("--g1 and --g2 are required")
    return CouplingParams(args.g1, args.g2, args.k0)


def _ext(args, p):
    rid = classify(p).range_id
    if rid == "R1":
        if args.angle is not None:
            raise UsageError("R1 has a unique extension; drop --angle")
        return extension(p)
    if args.angle is None:
        raise UsageError(f"{rid} needs --angle ({ANGLE_NAMES[rid]})")
    return extension(p, parse_angle(args.angle))


# ---------------------------------------------------------------------------
# output

def fmt(v):
    """17 significant digits; inf/nan spelled as JSON-parsable tokens."""
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def dump_json(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{_json_str(str(k))}: {dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dump_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, str):
        return _json_str(obj)
    return fmt(obj)


def _json_str(s):
    return json.dumps(s)


def dump_csv(header, rows):
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(fmt(v) for v in r))
    return "\n".join(lines) + "\n"


def _emit(args, text, suffix=""):
    if args.out:
        with open(args.out + suffix, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args, header, rows):
    if args.format == "json":
        _emit(args, dump_json([dict(zip(header, r)) for r in rows]) + "\n")
    else:
        _emit(args, dump_csv(header, rows))


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args):
    p = _params(args)
    rc = classify(p)
    rid = rc.range_id
    info = {
        "range": rid,
        "mu_kind": rc.mu.kind,
        "mu": rc.mu.magnitude,
        "deficiency": list(rc.deficiency),
        "extension": "unique" if rid == "R1" else f"{ANGLE_NAMES[rid]} family",
        "angle_interval": list(ANGLE_INTERVALS[rid]) if ANGLE_INTERVALS[rid] else None,
        "threshold_angle": spectral.threshold_param(p) if (p.g1 > 0 and rid != "R1") else None,
    }
    if args.format == "json":
        _emit(args, dump_json(info) + "\n")
    else:
        lines = [f"{k}: {v if isinstance(v, str) else dump_json(v)}" for k, v in info.items()]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_spectrum(args):
    p = _params(args)
    ext = _ext(args, p)
    grid = parse_grid(args.grid) if args.grid else list(np.linspace(0.0, 10.0, 51)[1:])
    rep = spectral.assemble_spectrum(p, ext, (args.emin, args.emax), grid, args.levels)
    report = dump_json(rep.to_dict()) + "\n"
    density = dump_csv(["E", "density"], zip(rep.continuum["energies"], rep.continuum["density"]))
    levels = dump_csv(["n", "E", "Q"], [(lv.n, lv.energy, lv.weight_Q) for lv in rep.discrete])
    if args.out:
        _emit(args, report, ".json")
        _emit(args, density, "_density.csv")
        _emit(args, levels, "_levels.csv")
    elif args.format == "csv":
        sys.stdout.write(levels)
    else:
        sys.stdout.write(report)
    return EXIT_OK


def cmd_profile(args):
    p = _params(args)
    xs = parse_grid(args.grid) if args.grid else parse_grid("log:0.05:20:100")
    _table(args, ["x", "V"], zip(xs, potential_profile(p, xs)))
    return EXIT_OK


def cmd_eigenfunction(args):
    p = _params(args)
    ext = _ext(args, p)
    xs = parse_grid(args.grid) if args.grid else parse_grid("log:0.001:60:200")
    levels = spectral.discrete_spectrum(p, ext, (args.emin, args.emax), max(args.levels, 1) + 64)
    match = [lv for lv in levels if lv.n == args.level]
    if not match:
        raise UsageError(f"no level n = {args.level} in the window [{args.emin}, {args.emax}]")
    lv = match[0]
    vals = spectral.eigenfunction(p, ext, lv, xs)
    _table(args, ["x", "U"], zip(xs, vals))
    return EXIT_OK


def cmd_green(args):
    p = _params(args)
    ext = _ext(args, p)
    W = parse_complex(args.W)
    xs = parse_grid(args.grid) if args.grid else parse_grid("0.25:4:16")
    rows = []
    for x in xs:
        for y in xs:
            g = greens.green(p, ext, x, y, W).value
            rows.append((x, y, g.real, g.imag))
    _table(args, ["x", "y", "re_G", "im_G"], rows)
    return EXIT_OK


# verify ----------------------------------------------------------------------

VERIFY_CASES = {
    "R1": (CouplingParams(-1.0, 0.75, 1.0), None),
    "R2": (CouplingParams(-1.0, 0.1, 1.3), 0.3),
    "R3": (CouplingParams(-1.0, -0.25, 1.3), 0.4),
    "R4": (CouplingParams(-1.0, -1.25, 1.0), 1.0),
    "R5": (CouplingParams(-1.0, 0.0, 1.3), 0.4),
}

DEFAULT_TOLS = {"wronskian": 1e-8, "ode_residual": 1e-6, "orthonormality": 1e-4,
                "interlacing": 0.0, "oracle": 1e-6}


def _check_wronskian(p, ext, rng, n=5):
    c = spectral.green_prefactor(p)
    err = 0.0
    for _ in range(n):
        W = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        x = rng.uniform(0.1, 4)
        err = max(err, abs(c * basis.wronskian(basis.PRINCIPAL, basis.CONJUGATE, p, ext, x, W) + 1))
    return err


def _check_ode(p, ext, rng, n=5):
    err = 0.0
    for _ in range(n):
        W = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        x = rng.uniform(0.2, 4)
        h = 1e-4 * x
        psi = basis.solution_pair(basis.PRINCIPAL, p, ext, x, W)[0]
        dp = basis.solution_pair(basis.PRINCIPAL, p, ext, x + h, W)[1]
        dm = basis.solution_pair(basis.PRINCIPAL, p, ext, x - h, W)[1]
        lhs = (dp - dm) / (2 * h)
        rhs = (p.g1 / x + p.g2 / x ** 2 - W) * psi
        err = max(err, abs(lhs - rhs) / max(abs(rhs), abs(psi), 1e-300))
    return err


def _levels_for(p, ext, count):
    return spectral.discrete_spectrum(p, ext, (-50.0, 0.0), count)


def _check_orthonormality(p, ext, count):
    lv = _levels_for(p, ext, count)
    err = 0.0
    for i, a in enumerate(lv):
        for b in lv[i:]:
            fa = lambda x, a=a: spectral.eigenfunction(p, ext, a, [x])[0]
            fb = lambda x, b=b: spectral.eigenfunction(p, ext, b, [x])[0]
            scale = 1.0 / math.sqrt(-b.energy)
            ip = oracle.quad_inner_product(fa, fb, (0.0, 60.0 * scale), 1e-9,
                                           breakpoints=[0.1 * scale, scale, 5 * scale, 20 * scale])
            err = max(err, abs(ip - (1.0 if a is b else 0.0)))
    return err


def _check_interlacing(p, ext, count):
    lv = _levels_for(p, ext, count)
    bad = 0
    for a, b in zip(lv, lv[1:]):
        bad += not a.energy < b.energy
    for l in lv:
        lo, hi = l.bracket
        bad += not lo <= l.energy <= hi
    return float(bad)


def _check_oracle(p, ext, count):
    err = 0.0
    for lv in _levels_for(p, ext, count):
        e = oracle.shoot_near(p, ext, lv.energy)
        err = max(err, abs(e - lv.energy) / abs(lv.energy))
    return err


def cmd_verify(args):
    ranges = list(VERIFY_CASES)
    if args.range:
        want = [r.strip().upper() for r in args.range.split(",")]
        want = [r if r.startswith("R") else "R" + r for r in want]
        bad = [r for r in want if r not in VERIFY_CASES]
        if bad:
            raise UsageError(f"unknown range(s) {bad}")
        ranges = [r for r in ranges if r in want]
    count = args.levels
    checks = []
    for rid in ranges:
        p, angle = VERIFY_CASES[rid]
        ext = extension(p, angle)
        rng = random.Random(f"{args.seed}:{rid}")
        runs = [("wronskian", lambda: _check_wronskian(p, ext, rng)),
                ("ode_residual", lambda: _check_ode(p, ext, rng)),
                ("orthonormality", lambda: _check_orthonormality(p, ext, count)),
                ("interlacing", lambda: _check_interlacing(p, ext, count)),
                ("oracle", lambda: _check_oracle(p, ext, count))]
        for name, fn in runs:
            tol = args.tol if args.tol is not None else DEFAULT_TOLS[name]
            try:
                err = fn()
                ok = err <= tol
            except KratzerError as exc:
                err, ok = math.nan, False
                print(f"{rid}.{name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            checks.append({"name": f"{rid}.{name}", "pass": ok, "error": err, "tol": tol})
    passed = all(c["pass"] for c in checks)
    _emit(args, dump_json({"seed": args.seed, "pass": passed, "checks": checks}) + "\n")
    for c in checks:
        if not c["pass"]:
            print(f"FAILED {c['name']} (error {fmt(c['error'])}, tol {fmt(c['tol'])})", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g1", type=float)
    common.add_argument("--g2", type=float)
    common.add_argument("--k0", type=float, default=1.0)
    common.add_argument("--angle", help="extension angle in radians; 'pi/2' style allowed")
    common.add_argument("--emin", type=float, default=-1e3)
    common.add_argument("--emax", type=float, default=0.0)
    common.add_argument("--levels", type=int, default=10)
    common.add_argument("--grid", help="a:b:n, log:a:b:n or a comma list")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output path (prefix for spectrum)")
    common.add_argument("--tol", type=float, help="override every verification tolerance")

    ap = argparse.ArgumentParser(prog="kratzer-spectra",
                                 description="Spectra of V(x) = g1/x + g2/x^2 on the half-line.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="coupling range and extension family")
    sub.add_parser("spectrum", parents=[common], help="density, levels and zero mode")
    sub.add_parser("profile", parents=[common], help="potential on a grid")
    e = sub.add_parser("eigenfunction", parents=[common], help="normalized U_n on a grid")
    e.add_argument("--level", type=int, default=0)
    g = sub.add_parser("green", parents=[common], help="G(x, y; W) on a square grid")
    g.add_argument("--W", required=True, help="complex spectral parameter, e.g. -0.5+0.2j")
    v = sub.add_parser("verify", parents=[common], help="run the self-checks")
    v.add_argument("--range", help="comma list of ranges, e.g. 4 or R2,R4")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(levels=3)
    return ap


COMMANDS = {"classify": cmd_classify, "spectrum": cmd_spectrum, "profile": cmd_profile,
            "eigenfunction": cmd_eigenfunction, "green": cmd_green, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, KratzerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
