"""Command-line front end.

Every subcommand builds a :class:`Report` (header parameters, rows, overall
status) which is rendered as an aligned table, CSV or JSON lines.  The seed
is echoed into every header so a run can be replayed byte for byte.

Exit codes: 0 all validations passed, 1 a validation failed, 2 usage or
input error, 3 guard violation, 4 precision exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import acceptance, dieudonne, dl_geometry, hecke_chow, newton, strata_complex, weyl_eo
from .exact_core import Coeff, GuardError, PrecisionError, TruncatedWittRing, default_precision

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD, EXIT_PRECISION = 0, 1, 2, 3, 4
SEED_MAX = 2**64 - 1
CLOSURE_MAX_N = 5  # the Psi-order table takes minutes from n = 6 on
FORMATS = ("table", "csv", "json-lines")


@dataclass
class Report:
    command: str
    seed: int
    params: dict
    columns: list
    rows: list = field(default_factory=list)
    ok: bool = True
    notes: list = field(default_factory=list)

    def add(self, **row):
        self.rows.append(row)

    def check(self, cond: bool, message: str):
        """Record a validation; failing ones become notes."""
        if not cond:
            self.ok = False
            self.notes.append(f"validation failed: {message}")


# ---------------------------------------------------------------------------
# rendering


def _plain(x):
    """JSON-native form of a cell."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return x


def _cell(x) -> str:
    x = _plain(x)
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, (list, dict)):
        return json.dumps(x, separators=(",", ":"))
    return str(x)


def _header_line(rep: Report) -> str:
    parts = [f"seed={rep.seed}"] + [f"{k}={_cell(v)}" for k, v in rep.params.items()]
    return f"# eostrata {rep.command} " + " ".join(parts)


def records(rep: Report) -> list:
    out = [{
        "record": "header",
        "command": rep.command,
        "seed": rep.seed,
        "params": _plain(rep.params),
        "columns": list(rep.columns),
    }]
    for row in rep.rows:
        out.append({"record": "row", "command": rep.command, "data": {c: _plain(row.get(c)) for c in rep.columns}})
    out.append({"record": "summary", "command": rep.command, "ok": rep.ok, "rows": len(rep.rows), "notes": list(rep.notes)})
    return out


def render(rep: Report, fmt: str) -> str:
    if fmt == "json-lines":
        recs = records(rep)
        validate_records(recs)
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in recs)
    status = f"# status: {'ok' if rep.ok else 'FAILED'}"
    tail = [f"# note: {n}" for n in rep.notes] + [status]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rep.columns)
        for row in rep.rows:
            w.writerow([_cell(row.get(c)) for c in rep.columns])
        return _header_line(rep) + "\n" + buf.getvalue() + "\n".join(tail) + "\n"
    cells = [[_cell(row.get(c)) for c in rep.columns] for row in rep.rows]
    widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(rep.columns)]
    lines = [_header_line(rep), "  ".join(c.ljust(w) for c, w in zip(rep.columns, widths)).rstrip()]
    lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines + tail) + "\n"


def load_schema() -> dict:
    text = resources.files("eostrata").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate_records(recs) -> None:
    """Raise jsonschema.ValidationError when a record breaks the schema."""
    import jsonschema

    schema = load_schema()
    for r in recs:
        jsonschema.validate(r, schema)


# ---------------------------------------------------------------------------
# commands


def cmd_eo_strata(args) -> Report:
    n = args.n
    if n < 2:
        raise ValueError("--n must be at least 2")
    with_closure = n <= CLOSURE_MAX_N
    rep = Report("eo-strata", args.seed, {"n": n},
                 ["a", "b", "dimension", "length", "supersingular", "closure_size", "closure"])
    labels = weyl_eo.enumerate_jw(n)
    for lab in labels:
        clo = [[c.a, c.b] for c in weyl_eo.closure(lab)] if with_closure else None
        rep.add(a=lab.a, b=lab.b, dimension=lab.dimension, length=lab.length,
                supersingular=weyl_eo.is_supersingular(lab),
                closure_size=len(clo) if clo is not None else None, closure=clo)
    dims = [lab.dimension for lab in labels]
    rep.check(len(labels) == n * n, "label count is not n^2")
    rep.check(all(lab.dimension == lab.length for lab in labels), "dimension differs from length")
    rep.check(dims.count(0) == 1 and dims.count(2 * n - 2) == 1, "extreme dimensions not unique")
    if not with_closure:
        rep.notes.append(f"closure omitted for n > {CLOSURE_MAX_N}")
    return rep


def cmd_newton_strata(args) -> Report:
    n = args.n
    rep = Report("newton-strata", args.seed, {"n": n},
                 ["label", "polygon", "dimension", "mu_ordinary", "supersingular"])
    strata = newton.newton_strata(n)
    for s in strata:
        rep.add(label=s.label, polygon=str(s.polygon), dimension=s.dimension,
                mu_ordinary=s.polygon == newton.mu_ordinary_polygon(n),
                supersingular=s.polygon == newton.supersingular_polygon(n))
    rep.check(len(strata) == n * (n - 1) // 2 + 1, "stratum count differs from n(n-1)/2 + 1")
    rep.check(all(s.polygon.width == 2 * n and s.polygon.rise == n for s in strata), "polygon endpoints")
    return rep


def cmd_slopes(args) -> Report:
    n, a, b, m, p = args.n, args.a, args.b, args.m, args.p
    s = default_precision()
    rep = Report("slopes", args.seed, {"n": n, "a": a, "b": b, "m": m, "p": p, "precision": s},
                 ["quantity", "value", "bound"])
    L = newton.canonical_lift(n, a, b)
    P = newton.exact_slopes(L)
    W = L.to_witt(TruncatedWittRing(p, s))
    lo = newton.truncated_lambda_min(W, m)
    hi = newton.lambda_max(W, m)
    f2, v2 = newton.hasse_criteria(W)
    rep.add(quantity="exact_polygon", value=str(P), bound=None)
    rep.add(quantity="lambda_min", value=lo.value, bound=lo.error_bound)
    rep.add(quantity="lambda_max", value=hi.value, bound=hi.error_bound)
    rep.add(quantity="F2_D2_in_V_D1", value=f2, bound=None)
    rep.add(quantity="V2_D2_in_F_D1", value=v2, bound=None)
    rep.check(abs(lo.value - P.slopes[0][0]) <= lo.error_bound, "lambda_min outside its bound")
    rep.check(abs(hi.value - P.slopes[-1][0]) <= hi.error_bound, "lambda_max outside its bound")
    return rep


def cmd_std_module(args) -> Report:
    n, a, b, p = args.n, args.a, args.b, args.p
    rep = Report("std-module", args.seed, {"n": n, "a": a, "b": b, "p": p}, ["map", "row", "entries"])
    M = dieudonne.standard_module(n, a, b, p=p)
    for name in ("F1", "F2", "V1", "V2"):
        for i, row in enumerate(getattr(M, name)):
            rep.add(map=name, row=i + 1, entries=list(row))
    N = dieudonne.formula_module(n, a, b, p=p)
    rep.check(dieudonne.validate(M), "Dieudonne axioms")
    rep.check(M.signature() == (1, n - 1), "signature is not (1, n-1)")
    rep.check((M.F1, M.F2, M.V1, M.V2) == (N.F1, N.F2, N.V1, N.V2), "table and formula modules differ")
    rep.check(dieudonne.eo_classify(M) == (a, b), "classification round trip")
    return rep


def cmd_dl_points(args) -> Report:
    n, p, k = args.n, args.p, args.k
    dl_geometry.check_guard(n, p, k, args.override_guard)
    indices = [args.i] if args.i else list(range(1, n + 1))
    variants = dl_geometry.VARIANTS if args.variant == "all" else (args.variant,)
    params = {"n": n, "p": p, "k": k, "i": args.i, "variant": args.variant}
    if args.points:
        if len(indices) != 1 or len(variants) != 1:
            raise ValueError("--points needs a single --i and --variant")
        vid = dl_geometry.DLVarietyId(n, indices[0], variants[0])
        rep = Report("dl-points", args.seed, params, ["index", "H1", "H2"])
        pts = dl_geometry.enumerate_points(vid, k, p, override_guard=args.override_guard)
        for j, pt in enumerate(pts):
            rep.add(index=j, H1=[list(r) for r in pt.H1.basis], H2=[list(r) for r in pt.H2.basis])
        rep.check(all(dl_geometry.point_is_valid(vid.variant, pt) for pt in pts), "invalid point")
        return rep
    rep = Report("dl-points", args.seed, params,
                 ["variety", "count", "invalid", "frobenius_failures", "expected"])
    ctx = dl_geometry.Context(n, p, k)
    for i in indices:
        for v in variants:
            vid = dl_geometry.DLVarietyId(n, i, v)
            r = dl_geometry.sweep(vid, k, p, ctx=ctx, override_guard=args.override_guard)
            exp = dl_geometry.z1_count(n, p, k) if i == 1 else None
            rep.add(variety=str(vid), count=r.count, invalid=r.invalid,
                    frobenius_failures=r.composite_failures, expected=exp)
            rep.check(r.invalid == 0, f"{vid}: points fail the defining conditions")
            rep.check(r.composite_failures == 0, f"{vid}: Frobenius composite differs")
            rep.check(exp is None or exp == r.count, f"{vid}: count differs from (q^n-1)/(q-1)")
    return rep


def _exponent2(choice: str, n: int, i: int):
    if choice == "printed":
        return None
    if choice == "dual":
        return dl_geometry.dual_exponent(n, i)
    return int(spec)


def cmd_principal_check(args) -> Report:
    n, i, p = args.n, args.i, args.p
    exp2 = _exponent2(args.exponent2, n, i)
    exp2_val = dl_geometry.form2_exponent(n, i) if exp2 is None else exp2
    rep = Report("principal-check", args.seed,
                 {"n": n, "i": i, "p": p, "exponent1": dl_geometry.form1_exponent(n, i), "exponent2": exp2_val},
                 ["index", "source", "form1", "form2", "agree"])
    divisors = []
    if args.divisor:
        with open(args.divisor) as fh:
            divisors.append(("file", dl_geometry.parse_divisor_file(fh.read(), n, i, p)))
    else:
        rng = random.Random(args.seed)
        for j in range(args.random):
            kind = "random" if j % 2 == 0 else "principal"
            divisors.append((kind, dl_geometry.random_divisor(n, i, p, rng, kind=kind)))
    for j, (src, D) in enumerate(divisors):
        f1 = dl_geometry.is_principal(D)
        f2 = dl_geometry.is_principal_dual(D, exp2)
        rep.add(index=j, source=src, form1=f1, form2=f2, agree=f1 == f2)
        rep.check(f1 == f2, f"divisor {j}: the two characterisations disagree")
    return rep


def _load_model(args):
    if args.model:
        with open(args.model) as fh:
            return hecke_chow.ToyModel.loads(fh.read()), {"model": args.model}
    if args.window:
        try:
            n, p, r = (int(x) for x in args.window.split(","))
        except ValueError:
            raise ValueError("--window expects n,p,r") from None
        W = hecke_chow.build_window(n, p, r, override_guard=args.override_guard)
        return W.to_model(), {"window": [n, p, r]}
    if getattr(args, "random_model", None):
        n = args.random_model
        return hecke_chow.random_model(n, 2, args.seed), {"random_model": n}
    raise ValueError("give --model FILE or --window n,p,r")


def cmd_chow_kernel(args) -> Report:
    model, src = _load_model(args)
    coeff = Coeff.parse(args.coeff)
    hecke_chow.check_coeff(coeff, model.n, model.p)
    rep = Report("chow-kernel", args.seed, {**src, "n": model.n, "p": model.p, "coeff": str(coeff),
                                            "solver": args.solver},
                 ["solver", "coeff", "dim", "ambient", "vertices", "edges"])
    spaces = {}
    if args.solver in ("both", "matrix"):
        spaces["matrix"] = hecke_chow.chow_kernel_matrix(model, coeff)
    if args.solver in ("both", "divisor"):
        spaces["divisor"] = hecke_chow.chow_kernel_divisor(model, coeff).projected
    for name, K in spaces.items():
        rep.add(solver=name, coeff=str(coeff), dim=K.dim, ambient=K.ambient, vertices=model.nv, edges=model.ne)
    if len(spaces) == 2:
        rep.check(spaces["matrix"] == spaces["divisor"], "the two solvers give different subspaces")
    return rep


def cmd_ihara_n2(args) -> Report:
    model, src = _load_model(args)
    if model.n != 2:
        raise ValueError("ihara-n2 needs a rank-2 model")
    coeff = Coeff.parse(args.coeff)
    rep = Report("ihara-n2", args.seed, {**src, "p": model.p, "coeff": str(coeff)}, ["quantity", "value"])
    im = hecke_chow.ihara_n2_matrices(model)
    zero, rows = hecke_chow.composite_vanishes(im)
    inj, cols = hecke_chow.alpha_injective_on_interior(im, coeff)
    h = hecke_chow.middle_homology(im, coeff)
    rep.add(quantity="beta_alpha_zero", value=zero)
    rep.add(quantity="certified_rows", value=rows)
    rep.add(quantity="alpha_injective_interior", value=inj)
    rep.add(quantity="interior_columns", value=cols)
    for key in ("dim_c1", "rank_alpha", "rank_beta", "h1"):
        rep.add(quantity=key, value=h[key])
    rep.check(zero and rows > 0, "beta . alpha does not vanish on certified rows")
    rep.check(inj and cols > 0, "alpha is not injective on interior columns")
    return rep


def _pattern(name: str, n: int):
    if name == "k1":
        return strata_complex.k1_pattern(n)
    if name == "k1-hecke":
        return strata_complex.k1_pattern(n, hecke=True)
    return strata_complex.iwahori_pattern()


def cmd_e1_row(args) -> Report:
    model, src = _load_model(args)
    coeff = Coeff.parse(args.coeff)
    cx = _pattern(args.pattern, model.n)
    rep = Report("e1-row", args.seed, {**src, "pattern": cx.name, "coeff": str(coeff),
                                       "drop_connected": args.drop_connected},
                 ["degree", "dim", "cohomology"])
    problems = cx.validate()
    rc = strata_complex.e1_bottom_row(cx, model, coeff, args.drop_connected)
    h = strata_complex.row_cohomology(rc)
    for k in range(3):
        rep.add(degree=k, dim=rc.dims[k], cohomology=h[k])
    for msg in problems:
        rep.check(False, msg)
    rep.check(rc.d_squared_zero(), "d1 . d0 is not zero")
    if rc.certified is not None:
        rep.notes.append(f"d1 . d0 checked on {sum(rc.certified)} of {len(rc.certified)} rows away from the boundary")
    if cx.unspecified:
        rep.notes.append("tags chosen by convention: " + ", ".join(cx.unspecified))
    return rep


def _parse_only(text):
    if not text:
        return None
    out = set()
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(part))
    bad = out - set(acceptance.CRITERIA)
    if bad:
        raise ValueError(f"unknown criteria {sorted(bad)}; selftest covers 1-14")
    return out


def cmd_selftest(args) -> Report:
    only = _parse_only(args.only)
    rep = Report("selftest", args.seed,
                 {"profile": "quick" if args.quick else "full",
                  "criteria": sorted(only) if only else sorted(acceptance.CRITERIA)},
                 ["criterion", "status", "title", "detail"])
    for res in acceptance.run(args.seed, args.quick, only):
        rep.add(criterion=res.number, status="PASS" if res.ok else "FAIL", title=res.title, detail=res.detail)
        rep.check(res.ok, f"criterion {res.number} ({res.title})")
    return rep


COMMANDS = {
    "eo-strata": cmd_eo_strata,
    "newton-strata": cmd_newton_strata,
    "slopes": cmd_slopes,
    "std-module": cmd_std_module,
    "dl-points": cmd_dl_points,
    "principal-check": cmd_principal_check,
    "chow-kernel": cmd_chow_kernel,
    "ihara-n2": cmd_ihara_n2,
    "e1-row": cmd_e1_row,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# argument parsing


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _coeff(text: str) -> str:
    try:
        Coeff.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--seed", type=_seed, default=0, help="64-bit seed, echoed in the header")

    model = argparse.ArgumentParser(add_help=False)
    src = model.add_mutually_exclusive_group()
    src.add_argument("--model", metavar="FILE", help="toy model JSON file")
    src.add_argument("--window", metavar="n,p,r", help="build the lattice window instead")
    model.add_argument("--coeff", type=_coeff, default="Q", help="Q or Fl:<prime>")
    model.add_argument("--override-guard", action="store_true")

    parser = argparse.ArgumentParser(prog="eostrata", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eo-strata", parents=[common], help="EO labels with dimensions and closures")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("newton-strata", parents=[common], help="Newton strata and polygons")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("slopes", parents=[common], help="exact and truncated slopes of a canonical lift")
    for name in ("n", "a", "b"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--m", type=int, default=24, help="truncation depth")
    p.add_argument("--p", type=int, default=2)

    p = sub.add_parser("std-module", parents=[common], help="standard mod-p Dieudonne module")
    for name in ("n", "a", "b"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--p", type=int, default=2)

    p = sub.add_parser("dl-points", parents=[common], help="point counts of DL-type varieties")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, default=0, help="0 sweeps all i")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--variant", choices=dl_geometry.VARIANTS + ("all",), default="Z")
    p.add_argument("--points", action="store_true", help="list the points instead of counting")
    p.add_argument("--override-guard", action="store_true")

    p = sub.add_parser("principal-check", parents=[common], help="compare the two principality tests")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--divisor", metavar="FILE")
    g.add_argument("--random", type=int, metavar="COUNT")
    p.add_argument("--exponent2", default="printed", help="printed, dual or an integer")

    p = sub.add_parser("chow-kernel", parents=[common, model], help="kernel of psi by both solvers")
    p.add_argument("--solver", choices=("both", "matrix", "divisor"), default="both")

    sub.add_parser("ihara-n2", parents=[common, model], help="rank-2 Ihara complex checks")

    p = sub.add_parser("e1-row", parents=[common, model], help="bottom row of the incidence spectral sequence")
    p.add_argument("--pattern", choices=("k1", "k1-hecke", "iwahori"), required=True)
    p.add_argument("--random-model", type=int, metavar="N", help="seeded random toy model of rank N")
    p.add_argument("--drop-connected", action="store_true")

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--quick", action="store_true", help="reduced parameter ranges")
    p.add_argument("--only", help="criteria to run, e.g. 1,2,5-7")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = COMMANDS[args.command](args)
    except GuardError as exc:
        print(f"eostrata: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except PrecisionError as exc:
        print(f"eostrata: precision: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ValueError, OSError) as exc:
        print(f"eostrata: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(rep, args.format))
    sys.stdout.flush()
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
