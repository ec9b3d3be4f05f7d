"""Command-line interface.

Exit codes: 0 success, 2 invalid input or failed check (JSON diagnostics on
stderr), 1 internal error.  Complex flags are written ``"re,im"``.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys

import numpy as np

from . import io
from .canonical import build_splitting
from .coefficients import validate
from .errors import CanonDAEError
from .hypotheses import MODES, certify_self_adjoint, check_index1
from .tolerances import TOL_CIRCLE, TOL_SING, TOL_STRUCT

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID = 0, 1, 2

STACK_HELP = (
    'stack JSON: {"period": d, "n": n, "J": [[...]], "layers": [{"thickness": t, "H": [[...]], "W": [[...]]}]} '
    "with complex entries as [re, im]; J may instead be given with --jmatrix"
)


class CheckFailed(Exception):
    """A check ran to completion and its verdict is negative."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


def parse_complex(text):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from exc


def _fmt(x):
    if x == "":
        return ""
    return format(float(x), ".17g")


def _write(args, text):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _load(args):
    with open(args.stack) as fh:
        data = json.load(fh)
    coeffs, J = io.stack_from_dict(data)
    if getattr(args, "jmatrix", None):
        with open(args.jmatrix) as fh:
            J = io.decode_matrix(json.load(fh), "J")
    if J is None:
        raise CanonDAEError("no J given: add a 'J' entry to the stack or pass --jmatrix")
    return coeffs, J, build_splitting(J, tol=args.tol_struct)


def _tol_circle(args):
    if args.tol_circle is not None:
        return args.tol_circle
    env = os.environ.get("CANONDAE_TOL_CIRCLE")
    return float(env) if env else TOL_CIRCLE


def cmd_validate(args):
    coeffs, J, sp = _load(args)
    report = validate(coeffs, args.tol_struct)
    payload = {"n": coeffs.n, "rank_J": sp.n1, "num_layers": coeffs.num_layers, **report.to_dict()}
    if not report.passed:
        raise CheckFailed(payload)
    _write(args, _json(payload))


def _failure_messages(report):
    out = []
    for c in report.failures:
        label = c.label.replace(" invertible", " singular")
        if report.z0 == 0:
            label = label.replace("(H - z0 W)22", "H22").replace("H22 - z0 W22", "H22")
        out.append(f"{label} (layer {c.layer})")
    return out


def cmd_check(args):
    coeffs, J, sp = _load(args)
    report = check_index1(coeffs, sp, args.z0, args.mode, args.tol_sing)
    payload = report.to_dict()
    if not report.overall:
        payload["messages"] = _failure_messages(report)
        raise CheckFailed(payload)
    _write(args, _json(payload))


def cmd_certify(args):
    coeffs, J, sp = _load(args)
    cert = certify_self_adjoint(coeffs, sp, args.z0, args.tol_sing)
    payload = cert.to_dict()
    if not cert.passed:
        raise CheckFailed(payload)
    _write(args, _json(payload))


def cmd_monodromy(args):
    from .propagation import monodromy
    from .reduction import reduce_at
    from .spectral import floquet

    coeffs, J, sp = _load(args)
    mono = monodromy(reduce_at(coeffs, sp, args.lam, args.tol_sing))
    fs = floquet(mono, _tol_circle(args))
    payload = {
        "lambda": io.encode(args.lam),
        "M": io.encode(mono.M),
        "condition": mono.cond,
        "multipliers": io.encode(fs.multipliers),
        "on_circle": fs.on_circle.tolist(),
        "wavenumbers": [None if not np.isfinite(k) else float(k) for k in fs.wavenumbers],
    }
    _write(args, _json(payload))


def cmd_ivp(args):
    from .propagation import solve_ivp

    coeffs, J, sp = _load(args)
    with open(args.f0) as fh:
        f0 = io.decode_vector(json.load(fh), "f0")
    g = None
    if args.source:
        with open(args.source) as fh:
            g = io.source_from_dict(json.load(fh), coeffs.num_layers)
    traj = solve_ivp(coeffs, sp, args.lam, f0, args.t0, args.t1, g=g, samples_per_layer=args.samples)
    header = ["t"] + [f"{p}{i + 1}" for i in range(sp.n) for p in ("re_f", "im_f")]
    rows = []
    for t, f in zip(traj.t, traj.f):
        row = [t]
        for v in f:
            row += [v.real, v.imag]
        rows.append(row)
    _write(args, _csv(header, rows))


def cmd_bands(args):
    from .spectral import band_scan

    with open(args.stack) as fh:
        data = json.load(fh)
    if data.get("layers") and "eps" in data["layers"][0]:
        from .maxwell import assemble, problem_from_dict

        _, coeffs, sp = assemble(problem_from_dict(data, k1=args.k1, k2=args.k2))
    else:
        if args.k1 or args.k2:
            raise CanonDAEError("--k1/--k2 only apply to Maxwell material stacks")
        coeffs, J, sp = _load(args)
    scan = band_scan(coeffs, sp, args.lmin, args.lmax, args.num, _tol_circle(args), args.threads)
    n1 = sp.n1
    header = ["lambda", "count"] + [f"k{i + 1}" for i in range(n1)] + [f"abs_mu{i + 1}" for i in range(n1)]
    _write(args, _csv(header, scan.rows()))


def cmd_pointspec(args):
    from .spectral import point_spectrum

    coeffs, J, sp = _load(args)
    _write(args, _json(point_spectrum(coeffs, sp, args.lam, args.tol_sing).to_dict()))


def cmd_maxwell_bands(args):
    from .maxwell import band_structure, problem_from_dict, table_header

    with open(args.materials) as fh:
        problem = problem_from_dict(json.load(fh), k1=args.k1, k2=args.k2, omega=args.omega, mode=args.mode)
    _, table = band_structure(problem, args.wmin, args.wmax, args.num, _tol_circle(args), args.threads)
    _write(args, _csv(table_header(4), table))


def cmd_selftest(args):
    from .selftest import run

    results = run(args.seed)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "") for name, ok, detail in results]
    _write(args, "\n".join(lines) + "\n")
    if not all(ok for _, ok, _ in results):
        raise CheckFailed({"failed": [name for name, ok, _ in results if not ok]})


def build_parser():
    p = argparse.ArgumentParser(prog="canondae", description="Periodic canonical DAEs: index-1 checks, reduction, Floquet analysis.")
    p.add_argument("--tol-struct", type=float, default=TOL_STRUCT)
    p.add_argument("--tol-sing", type=float, default=TOL_SING)
    p.add_argument("--tol-circle", type=float, default=None, help="default 1e-8 or $CANONDAE_TOL_CIRCLE")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def stack_cmd(name, fn, help_):
        s = sub.add_parser(name, help=help_, description=STACK_HELP)
        s.add_argument("--stack", required=True)
        s.add_argument("--jmatrix", default=None)
        s.set_defaults(func=fn)
        return s

    stack_cmd("validate", cmd_validate, "check Hermitian H and positive definite W per layer")
    s = stack_cmd("check", cmd_check, "local index-1 hypotheses at z0")
    s.add_argument("--z0", type=parse_complex, default=1j)
    s.add_argument("--mode", default="definition", choices=list(MODES) + ["pencil", "def"])
    s = stack_cmd("certify", cmd_certify, "self-adjointness certificate")
    s.add_argument("--z0", type=parse_complex, default=1j)
    s = stack_cmd("monodromy", cmd_monodromy, "monodromy matrix and Floquet multipliers")
    s.add_argument("--lambda", dest="lam", type=parse_complex, required=True)
    s = stack_cmd("ivp", cmd_ivp, "solve the initial value problem, CSV trajectory")
    s.add_argument("--lambda", dest="lam", type=parse_complex, default=0j)
    s.add_argument("--t0", type=float, required=True)
    s.add_argument("--t1", type=float, required=True)
    s.add_argument("--f0", required=True, help="JSON vector, the value of Jf at t0")
    s.add_argument("--source", default=None, help='JSON {"layers": [[{"coef": [...], "rate": [re, im]}]]}')
    s.add_argument("--samples", type=int, default=50, help="samples per layer piece")
    s = stack_cmd("bands", cmd_bands, "band scan over real lambda, CSV")
    s.add_argument("--lmin", type=float, required=True)
    s.add_argument("--lmax", type=float, required=True)
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--k1", type=float, default=None)
    s.add_argument("--k2", type=float, default=None)
    s = stack_cmd("pointspec", cmd_pointspec, "infinite-multiplicity eigenvalue test at lambda")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s = sub.add_parser("maxwell-bands", help="Maxwell dispersion table, CSV")
    s.add_argument("--materials", required=True)
    s.add_argument("--k1", type=float, default=None)
    s.add_argument("--k2", type=float, default=None)
    s.add_argument("--wmin", type=float, required=True)
    s.add_argument("--wmax", type=float, required=True)
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--omega", type=float, default=None, help="fixed frequency for disorder/lossy modes")
    s.add_argument("--mode", default=None, choices=["eigenfrequency", "disorder", "lossy"])
    s.set_defaults(func=cmd_maxwell_bands)
    s = sub.add_parser("selftest", help="run the built-in invariant suite")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    for name in ("tol_struct", "tol_sing", "tol_circle"):
        val = getattr(args, name)
        if val is not None and not val > 0:
            sys.stderr.write(_json({"error": "InvalidTolerance", "message": f"{name} must be positive"}))
            return EXIT_INVALID
    try:
        args.func(args)
    except CheckFailed as exc:
        sys.stderr.write(_json(exc.payload))
        return EXIT_INVALID
    except (CanonDAEError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        sys.stderr.write(_json({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(_json({"error": type(exc).__name__, "message": str(exc), "internal": True}))
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
