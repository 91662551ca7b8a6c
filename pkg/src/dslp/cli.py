"""Command-line interface: ``dslp solve | verify | sweep | example``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 numerical inconsistency, 64 usage error.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .bcfamilies import limit_bc, loop_in_chart, make_coupled, make_separated, wrap_angle
from .errors import DSLPError, NumericalError, UnknownTheorem, ValidationError
from .inequalities import THEOREM_IDS, run_suite, suite_passed
from .problem import ChartCoords, Equation, RawBC, SeparatedBC, classify_bc, validate_equation, xi
from .spectrum import characteristic_polynomial, solve_spectrum

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# Problem files


def _complex_entry(v, where):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValidationError(f"{where} must be a number or [re, im]", field=where)
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(float(v))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where} must be a number or [re, im]", field=where) from exc


def _matrix2(m, name):
    if not isinstance(m, list) or len(m) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in m):
        raise ValidationError(f"{name} must be a 2x2 array", field=name)
    return np.array([[_complex_entry(m[i][j], f"{name}[{i}][{j}]") for j in range(2)]
                     for i in range(2)])


def parse_bc(data):
    """Boundary condition from its JSON form."""
    if not isinstance(data, dict):
        raise ValidationError("bc must be an object", field="bc")
    kind = data.get("type")
    try:
        if kind == "separated":
            return make_separated(data["alpha"], data["beta"])
        if kind == "coupled":
            K = data["K"]
            return make_coupled(wrap_angle(data["gamma"]), K)
        if kind == "raw":
            return RawBC(_matrix2(data["A"], "bc.A"), _matrix2(data["B"], "bc.B"))
    except KeyError as exc:
        raise ValidationError(f"bc is missing {exc.args[0]!r}", field=f"bc.{exc.args[0]}") from None
    raise ValidationError(f"unknown bc type {kind!r}", field="bc.type")


def load_problem(path, need_bc=True):
    """(Equation, bc or None) from a problem file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}", field="path") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc.msg}", field="file") from exc
    if not isinstance(data, dict):
        raise ValidationError("problem file must hold a JSON object", field="file")
    eq = validate_equation(data)
    bc = None
    if "bc" in data:
        bc = parse_bc(data["bc"])
    elif need_bc:
        raise ValidationError("problem file has no bc", field="bc")
    return eq, bc


def _fmt(x):
    return repr(float(x))


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args):
    eq, bc = load_problem(args.path)
    canon = classify_bc(bc)
    spec = solve_spectrum(eq, canon)
    roots = [{"value": float(x), "multiplicity": int(m)}
             for x, m in zip(spec.eigenvalues.values, spec.eigenvalues.multiplicities)]
    if args.format == "json":
        out = {"N": eq.N, "r": spec.r, "k": spec.k, "bc": canon.to_dict(),
               "eigenvalues": [float(v) for v in spec.values()], "roots": roots}
        print(json.dumps(out, indent=2))
    else:
        print(f"N  = {eq.N}")
        print(f"r  = {spec.r}")
        print(f"k  = {spec.k}")
        print("bc = " + ", ".join(f"{k}={v}" for k, v in canon.to_dict().items()))
        print(f"{'n':>3}  {'eigenvalue':>24}  multiplicity")
        n = 0
        for root in roots:
            print(f"{n:>3}  {root['value']:>24.16g}  {root['multiplicity']}")
            n += root["multiplicity"]
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _theorem_list(text):
    if text.strip().lower() == "all":
        return list(THEOREM_IDS)
    ids = [t.strip() for t in text.split(",") if t.strip()]
    unknown = [t for t in ids if t not in THEOREM_IDS]
    if unknown or not ids:
        raise UsageError(f"unknown theorem ids {unknown}; known ids: {', '.join(THEOREM_IDS)}")
    return ids


def _effective_seed(seed):
    env = os.environ.get("DSLP_SEED")
    if env is None or env == "":
        return seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DSLP_SEED must be an integer, got {env!r}") from None


def cmd_verify(args):
    ids = _theorem_list(args.theorems)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = _effective_seed(args.seed)
    summary = run_suite(ids, trials=args.trials, seed=seed, tol=args.tol)
    print(f"{'theorem':<10} {'passed':>7} {'failed':>7} {'skipped':>8} {'tight':>6} {'seconds':>8}")
    for tid, row in summary.items():
        print(f"{tid:<10} {row['passed']:>7} {row['failed']:>7} {row['skipped']:>8} "
              f"{row['tight']:>6} {row['seconds']:>8.2f}")
    ok = suite_passed(summary)
    if args.report:
        payload = {"seed": seed, "trials": args.trials, "tol": args.tol, "passed": ok,
                   "theorems": summary}
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, default=_json_default)
            fh.write("\n")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


# ---------------------------------------------------------------------------
# sweep


def example_equation():
    """f = (1, 1, 1), q = (0, 0), w = (1, 1), N = 2."""
    return Equation.harmonic(2)


def example_coords(s):
    """Chart O14 point of the family with rows [1, s, -1, 0; 0, -1, 0, 1]."""
    return ChartCoords("O14", float(s), 0.0, -1.0 + 0j)


def _sweep_equation(args):
    if args.problem and args.harmonic:
        raise ValidationError("give either --problem or --harmonic, not both", field="--problem")
    if args.problem:
        return load_problem(args.problem, need_bc=False)[0]
    if args.harmonic:
        return Equation.harmonic(args.harmonic)
    raise ValidationError("this family needs --problem or --harmonic", field="--problem")


def _require_flags(args, names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise ValidationError(f"family {args.family} needs --{', --'.join(missing)}",
                              field="--" + missing[0])


def _parse_z(text):
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError("--z must be 're,im' or a real number", field="--z") from None
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise ValidationError("--z must be 're,im' or a real number", field="--z")


def _parse_K(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError("--K must be 'k11,k12,k21,k22'", field="--K") from None
    if len(vals) != 4:
        raise ValidationError("--K must be 'k11,k12,k21,k22'", field="--K")
    return [vals[:2], vals[2:]]


def sweep_rows(args):
    """(parameter, Equation, bc) for every grid point of the requested family."""
    n = args.grid
    if n < 2:
        raise ValidationError("--grid must be at least 2", field="--grid")
    fam = args.family
    if fam == "example-3.1-s":
        eq = example_equation()
        lo = -10.0 if args.smin is None else args.smin
        hi = 10.0 if args.smax is None else args.smax
        if not lo < hi:
            raise ValidationError("--smin must be below --smax", field="--smin")
        return [(float(s), eq, example_coords(s).raw()) for s in np.linspace(lo, hi, n)]
    eq = _sweep_equation(args)
    if fam == "alpha":
        _require_flags(args, ["beta0"])
        beta0 = float(args.beta0)
        if not 0.0 < beta0 <= math.pi:
            raise ValidationError("--beta0 must lie in (0, pi]", field="--beta0")
        grid = sorted(set([float(a) for a in np.linspace(0.0, math.pi, n, endpoint=False)] + [xi(eq)]))
        return [(a, eq, SeparatedBC(a, beta0)) for a in grid]
    if fam == "beta":
        _require_flags(args, ["alpha0"])
        alpha0 = float(args.alpha0)
        if not 0.0 <= alpha0 < math.pi:
            raise ValidationError("--alpha0 must lie in [0, pi)", field="--alpha0")
        grid = [math.pi * (i + 1) / n for i in range(n)]
        grid[-1] = math.pi
        return [(b, eq, SeparatedBC(alpha0, b)) for b in grid]
    if fam in ("loop-s", "loop-t"):
        _require_flags(args, ["chart", "x", "y"])
        coords = ChartCoords(args.chart, float(args.x), float(args.y),
                             _parse_z(args.z) if args.z is not None else 0j)
        loop = loop_in_chart(coords, args.chart, fam[-1])
        us = np.linspace(-0.5 * math.pi, 0.5 * math.pi, n)
        us[0], us[-1] = -0.5 * math.pi, 0.5 * math.pi
        return [(float(u), eq, loop.at_compact(float(u))) for u in us]
    if fam == "gamma":
        _require_flags(args, ["K"])
        K = _parse_K(args.K)
        grid = [-math.pi + 2.0 * math.pi * (i + 1) / n for i in range(n)]
        grid[-1] = math.pi
        return [(g, eq, make_coupled(wrap_angle(g), K)) for g in grid]
    raise UsageError(f"unknown family {fam!r}")


def sweep_table(rows):
    """Header and CSV rows; cells beyond the local count stay blank."""
    spectra = [(p, solve_spectrum(eq, classify_bc(bc))) for p, eq, bc in rows]
    kmax = max(s.k for _, s in spectra)
    header = ["param"] + [f"lambda_{i}" for i in range(kmax)] + ["count"]
    body = []
    for p, s in spectra:
        vals = s.values()
        body.append([_fmt(p)] + [_fmt(vals[i]) if i < s.k else "" for i in range(kmax)] + [str(s.k)])
    return header, body


def cmd_sweep(args):
    header, body = sweep_table(sweep_rows(args))
    if args.out and args.out != "-":
        fh = open(args.out, "w", encoding="utf-8", newline="")
    else:
        fh = sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# example


def example_closed_form(s):
    """The two eigenvalues of the example family, sorted, or one when s = 1."""
    if s == 1.0:
        return [0.0]
    return sorted([0.0, 2.0 * (s - 2.0) / (s - 1.0)])


def example_gamma_expected(s):
    """Coefficients (lowest first) of -(s - 1) lambda^2 + 2 (s - 2) lambda."""
    return [0.0, 2.0 * (s - 2.0), -(s - 1.0)]


#: The ordering of the example family against S1, one chain per range of s.
EXAMPLE_ORDERINGS = [
    (-1.0, "s<1", [("S", 0), "=", ("A", 0), "<", ("S", 1), "<", ("A", 1)]),
    (1.0, "s=1", [("S", 0), "=", ("A", 0), "<", ("S", 1)]),
    (1.5, "1<s<2", [("A", 0), "<", ("S", 0), "=", ("A", 1), "<", ("S", 1)]),
    (2.0, "s=2", [("A", 0), "=", ("S", 0), "=", ("A", 1), "<", ("S", 1)]),
    (3.0, "s>2", [("A", 0), "=", ("S", 0), "<", ("A", 1), "<", ("S", 1)]),
]


def example_orderings(tol=1e-10):
    """Evaluate each ordering chain; returns [(case, text, ok)]."""
    eq = example_equation()
    S = solve_spectrum(eq, classify_bc(_example_limit())).values()
    out = []
    for s, case, chain in EXAMPLE_ORDERINGS:
        A = solve_spectrum(eq, classify_bc(example_coords(s).raw())).values()
        vals = {"A": A, "S": S}
        ok = True
        for a, rel, b in zip(chain[0::2], chain[1::2], chain[2::2]):
            gap = vals[b[0]][b[1]] - vals[a[0]][a[1]]
            ok &= abs(gap) <= tol if rel == "=" else gap > tol
        names = {"A": "A1(s)", "S": "S1"}
        text = "".join(f"lambda_{t[1]}({names[t[0]]})" if isinstance(t, tuple) else t for t in chain)
        out.append((case, text, bool(ok)))
    return out


def _example_limit():
    return limit_bc("S1", example_coords(0.0))


def run_example(perturb=0.0, stream=None):
    """Reproduce the worked example; returns True when every check matches."""
    stream = stream or sys.stdout
    eq = example_equation()
    ok = True
    for s in (-1.0, 0.0, 1.0, 2.0, 3.0):
        raw = example_coords(s).raw()
        gamma = characteristic_polynomial(eq, raw).coeffs
        got = list(np.pad(np.asarray(gamma, dtype=float), (0, 3 - len(gamma))))
        got[0] += perturb
        expected = example_gamma_expected(s)
        good = all(abs(a - b) <= 1e-10 * max(1.0, abs(b)) for a, b in zip(got, expected))
        vals = solve_spectrum(eq, classify_bc(raw)).values()
        closed = example_closed_form(s)
        good_vals = len(vals) == len(closed) and all(abs(a - b) <= 1e-10 for a, b in zip(vals, closed))
        ok &= good and good_vals
        print(f"s = {s:+.0f}: Gamma coefficients (lambda^0, lambda^1, lambda^2) = "
              f"({got[0]:.12g}, {got[1]:.12g}, {got[2]:.12g}); expected "
              f"({expected[0]:.12g}, {expected[1]:.12g}, {expected[2]:.12g}); "
              f"eigenvalues = {[round(v, 12) for v in vals]}", file=stream)
    S = solve_spectrum(eq, classify_bc(_example_limit())).values()
    good_S = len(S) == 2 and abs(S[0]) <= 1e-10 and abs(S[1] - 2.0) <= 1e-10
    ok &= good_S
    print(f"S1 spectrum = {[round(v, 12) for v in S]} (expected [0, 2])", file=stream)
    for case, text, good in example_orderings():
        ok &= good
        print(f"{case:>6}: {text}  {'ok' if good else 'MISMATCH'}", file=stream)
    print("PASS" if ok else "FAIL", file=stream)
    return ok


def cmd_example(args):
    if args.id != "3.1":
        raise UsageError(f"unknown example id {args.id!r}; available: 3.1")
    return EXIT_OK if run_example(args.perturb) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = _Parser(prog="dslp", description="Spectra of discrete Sturm-Liouville problems.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="solve one problem file")
    s.add_argument("path")
    s.add_argument("--format", choices=["json", "table"], default="table")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="randomised verification of the inequality catalog")
    v.add_argument("--theorems", default="all", help="comma separated ids or 'all'")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--report", default=None, help="path of the JSON report")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="eigenvalues along a one-parameter family, as CSV")
    w.add_argument("--family", required=True,
                   choices=["alpha", "beta", "loop-s", "loop-t", "gamma", "example-3.1-s"])
    w.add_argument("--problem", default=None, help="problem file providing the equation")
    w.add_argument("--harmonic", type=int, default=None, help="use f=1, q=0, w=1 with this N")
    w.add_argument("--beta0", type=float, default=None)
    w.add_argument("--alpha0", type=float, default=None)
    w.add_argument("--chart", choices=["O13", "O14", "O23", "O24"], default=None)
    w.add_argument("--x", type=float, default=None, help="first real chart coordinate")
    w.add_argument("--y", type=float, default=None, help="second real chart coordinate")
    w.add_argument("--z", default=None, help="complex chart coordinate as 're,im'")
    w.add_argument("--K", default=None, help="coupling matrix as 'k11,k12,k21,k22'")
    w.add_argument("--smin", type=float, default=None)
    w.add_argument("--smax", type=float, default=None)
    w.add_argument("--grid", type=int, default=41)
    w.add_argument("--out", default=None, help="CSV path (default stdout)")
    w.set_defaults(func=cmd_sweep)

    e = sub.add_parser("example", help="reproduce the worked example")
    e.add_argument("--id", required=True)
    e.add_argument("--perturb", type=float, default=0.0,
                   help="add this to the computed constant coefficient (negative control)")
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, UnknownTheorem) as exc:
        print(f"dslp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"dslp: invalid input{field}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"dslp: numerical inconsistency ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DSLPError as exc:
        print(f"dslp: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
