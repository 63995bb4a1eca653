"""Command-line front end: every verification as a subcommand with JSON or text reports."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import bulk, characters, classify, codes, freefields, lattices, n4
from .series import CycNum, JacobiSeries, SeriesError

DEFAULT_ORDER = Fraction(6)
DEFAULT_TOL = 1e-6
IM_FLOOR = 0.5

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


class RunConfig:
    def __init__(self, order=None, tol: float = DEFAULT_TOL, points=None, fmt: str = "json", parallel: bool = False):
        if order is None:
            order = os.environ.get("VOSA_ORDER", DEFAULT_ORDER)
        self.order = Fraction(order)
        if self.order <= 0:
            raise UsageError("order must be positive")
        if not tol > 0:
            raise UsageError("tol must be positive")
        self.tol = float(tol)
        self.points = list(points) if points else list(bulk.DEFAULT_POINTS)
        for p in self.points:
            if p.imag < IM_FLOOR or (-1 / p).imag < IM_FLOOR:
                raise UsageError(f"point {p} or its S-image lies below Im = {IM_FLOOR}")
        if fmt not in ("json", "text"):
            raise UsageError("format must be json or text")
        self.format = fmt
        self.parallel = parallel


def parse_points(text: str) -> List[complex]:
    """'re,im;re,im' -> complex points."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            re, im = (float(x) for x in chunk.split(","))
        except ValueError as e:
            raise UsageError(f"bad point {chunk!r}") from e
        out.append(complex(re, im))
    if not out:
        raise UsageError("no points given")
    return out


# JSON -----------------------------------------------------------------------

def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, CycNum):
        return x.to_json()
    if isinstance(x, JacobiSeries):
        return x.to_json()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return repr(x)


def dumps(report) -> str:
    return json.dumps(report, default=_plain, sort_keys=True)


def _text(report: dict) -> str:
    name = report.get("check", "report")
    ex = report.get("example")
    head = f"{name}" + (f" [{ex}]" if ex else "")
    status = "PASS" if report.get("pass") else "FAIL"
    extra = []
    for k in ("residual", "t_residual", "tail_bound", "classification", "E0", "first_mismatch", "error"):
        if k in report and report[k] is not None:
            extra.append(f"{k}={json.dumps(report[k], default=_plain, sort_keys=True)}")
    return f"{status} {head} " + " ".join(extra)


def emit(reports: Sequence[dict], cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    for r in reports:
        out.write((dumps(r) if cfg.format == "json" else _text(r)) + "\n")
    return EXIT_OK if reports and all(r.get("pass") for r in reports) else EXIT_FAIL


# checks ---------------------------------------------------------------------

def _error_report(check: str, example, err: Exception) -> dict:
    return {"check": check, "example": example, "pass": False, "residual": None,
            "first_mismatch": None, "error": str(err)}


def check_characters(lattice: str, sector: str, order, marking=None) -> dict:
    obj = lattices.make_lattice(lattice)
    c = obj if isinstance(obj, lattices.Coset) else obj.coset()
    sec = characters.parse_sector(sector)
    parity = None
    if sec.twist == "R" and sec.sign == "-":
        parity = lattices.SignCharacter.norm_parity()
    ch = characters.lattice_vosa_character(c, sec, parity, marking, order)
    return {"check": "characters", "example": lattice, "sector": str(sec), "pass": True,
            "residual": 0.0, "first_mismatch": None, "series": characters.character_json(ch, sec, parity)}


def check_theta(lattice: str, order) -> dict:
    obj = lattices.make_lattice(lattice)
    c = obj if isinstance(obj, lattices.Coset) else obj.coset()
    fast = lattices.theta(c, trunc=order)
    slow = lattices.theta(c, trunc=order, route="enumerate")
    mm = fast.first_mismatch(slow)
    return {"check": "theta", "example": lattice, "pass": mm is None, "residual": 0.0 if mm is None else 1.0,
            "first_mismatch": None if mm is None else [str(mm[0]), mm[1], repr(mm[2]), repr(mm[3])],
            "series": fast.to_json()}


def check_glue_d(n: int, i: int) -> dict:
    """Glue code of D_{2n}+[i] over A1^{2n} against the D-code coset."""
    words = lattices.labels_to_words(lattices.glue_image(lattices.d_coset(2 * n, i), lattices.a1_embedding(n)), 2)
    code, reps = codes.d_code_family(n)
    want = sorted(tuple(int(x) for x in (np.array(w) + np.array(reps[i])) % 2) for w in code.words)
    got = sorted(tuple(int(x) % 2 for x in w) for w in words)
    ok = got == want
    return {"check": "glue", "example": f"D{2 * n}+[{i}]", "pass": ok, "residual": 0.0 if ok else 1.0,
            "words": got, "first_mismatch": None if ok else sorted(set(got) ^ set(want))[:1]}


def check_glue_golay() -> dict:
    g = codes.golay12()
    lam = codes.golay_lambda_basis(g)
    words = lattices.labels_to_words(lattices.glue_image(lattices.d_plus(12), lattices.Lattice.from_basis(lam)), 3)
    glue = codes.TernaryCode(np.array(words) % 3)
    dist = glue.weight_distribution()
    try:
        perm, signs = codes.monomial_equivalence(glue, g, transitive=5)
        mapped = codes.apply_monomial(np.array(words), perm, signs)
        ok = all(tuple(int(x) for x in w) in g for w in mapped)
    except codes.CodeError:
        perm, signs, ok = None, None, False
    return {"check": "glue", "example": "D12+/sqrt3Z^12", "pass": ok and len(words) == 729,
            "residual": 0.0 if ok else 1.0, "weight_distribution": {str(k): v for k, v in sorted(dist.items())},
            "permutation": perm, "signs": signs, "first_mismatch": None}


def check_classify() -> dict:
    hits = classify.enumerate_solutions()
    got = sorted((d, t.name, k) for d, t, k in hits)
    matches = [classify.weight2_match(d) for d in range(24)]
    bad = [m["d"] for m in matches if not m["pass"]]
    ok = got == [(0, "D12", 1), (8, "E8", 1)] and not bad
    return {"check": "classify", "pass": ok, "residual": 0.0 if ok else 1.0, "hits": classify.hits_json(hits),
            "weight2_kappa": {str(m["d"]): m["kappa"] for m in matches},
            "first_mismatch": None if not bad else {"d": bad[0]}}


def check_modular(example: str, n, cfg: RunConfig, u=0, t_power: int = 1) -> dict:
    b = bulk.build_bulk(example, n)
    order = None if cfg.order == DEFAULT_ORDER else cfg.order
    return bulk.modular_check(b, points=cfg.points, tol=cfg.tol, trunc=order, u=u, t_power=t_power)


def check_genus(example: str, n, order) -> dict:
    b = bulk.build_bulk(example, n)
    return bulk.genus_report(b, trunc=order, phi_trunc=min(Fraction(order), 3))


def check_flow(example: str, n, order) -> dict:
    return bulk.spectral_flow_symmetry_check(bulk.build_bulk(example, n), trunc=order)


def check_a1_flow(order) -> dict:
    rows = [characters.spectral_flow_character_check(j, ell, order) for j in (0, 1) for ell in range(-2, 3)]
    bad = [r for r in rows if not r["pass"]]
    return {"check": "spectral_flow_character", "example": "A1 level 1", "pass": not bad,
            "residual": float(len(bad)), "first_mismatch": bad[0] if bad else None}


def check_decomposition(example: str, n, order) -> List[dict]:
    b = bulk.build_bulk(example, n)
    return [bulk.verify_decomposition(b, trunc=(order, order), sector=s) for s in sorted(b.targets)]


def check_n4(what: str, window: int, parallel: bool) -> dict:
    if what == "jacobi":
        return n4.jacobi_check(window, processes=os.cpu_count() if parallel else 1)
    if what == "primed":
        return n4.primed_relations_check(window)
    if what == "flow":
        reps = [n4.flow_bracket_check(ell, window) for ell in (-1, 1)]
        return {"check": "flow_brackets", "pass": all(r["pass"] for r in reps), "reports": reps}
    if what == "lemma":
        r = n4.lemma_g0_square()
        r["pass"] = r["supported_on_L0_J0"] and r["magnitudes"] == (2, 1)
        return r
    raise UsageError(f"unknown n4 check {what!r}")


def check_freefield(relations: str, cutoff) -> dict:
    return freefields.verify_relations(Fraction(cutoff), relations)


# verify-all ----------------------------------------------------------------

def _battery(cfg: RunConfig) -> List[tuple]:
    order = min(cfg.order, Fraction(3))
    jobs = [
        ("00-golay-glue", check_glue_golay, ()),
        ("01-classify", check_classify, ()),
        ("02-a1-flow", check_a1_flow, (cfg.order,)),
    ]
    for i in range(4):
        jobs.append((f"03-glue-D6-{i}", check_glue_d, (3, i)))
    for ex, n in (("diagD", 1), ("diagD", 2), ("diagD", 3), ("diagF", 1), ("diagF", 2), ("torusD", 1)):
        jobs.append((f"10-modular-{ex}-{n}", check_modular, (ex, n, cfg)))
    for ex, n in (("diagD", 1), ("diagD", 2), ("diagD", 3), ("diagA1", 1), ("diagA1", 2), ("diagF", 1),
                  ("diagF", 2), ("diagF", 3), ("torusD", 1), ("torusD", 2), ("diagVL", 2),
                  ("tetrahedralK3", None), ("golayD12", None)):
        jobs.append((f"20-decomposition-{ex}-{n}", check_decomposition, (ex, n, order)))
    for ex, n in (("tetrahedralK3", None), ("golayD12", None), ("torusD", 1)):
        jobs.append((f"30-flow-{ex}-{n}", check_flow, (ex, n, order)))
    for ex, n in (("golayD12", None), ("tetrahedralK3", None), ("torusD", 1)):
        jobs.append((f"40-genus-{ex}-{n}", check_genus, (ex, n, min(cfg.order, Fraction(4)))))
    return jobs


def _run_job(job) -> List[dict]:
    name, fn, args = job
    try:
        r = fn(*args)
    except (bulk.BulkError, SeriesError, lattices.LatticeError, codes.CodeError, ValueError) as e:
        r = _error_report(name, None, e)
    return r if isinstance(r, list) else [r]


def run_jobs(jobs, parallel: bool) -> List[dict]:
    jobs = sorted(jobs, key=lambda j: j[0])
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    return [r for rs in results for r in rs]


# argument parsing ------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--order", default=None, help="truncation order in q (default 6, or $VOSA_ORDER)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--points", default=None, help="sample points as 're,im;re,im'")
    p.add_argument("--format", default="json", choices=("json", "text"))
    p.add_argument("--parallel", action="store_true")


def _n_arg(p):
    p.add_argument("--n", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vosa", description="Exact checks for lattice vertex superalgebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characters", help="NS/R characters of a lattice VOSA")
    p.add_argument("--lattice", required=True, help="e.g. Z1, D4, D12+, D6+[1], A1^2, sqrt3Z^1")
    p.add_argument("--sector", default="NS+")
    _common(p)

    p = sub.add_parser("theta", help="theta series by two routes")
    p.add_argument("--lattice", required=True)
    _common(p)

    p = sub.add_parser("glue", help="glue codes of D_{2n}+[i] over A1^{2n}, or of D12+ over sqrt3Z^12")
    p.add_argument("--family", choices=("d", "golay"), default="golay")
    _n_arg(p)
    p.add_argument("--cls", type=int, default=None, help="class i in 0..3 (all if omitted)")
    _common(p)

    p = sub.add_parser("classify", help="the c = 12 scan and weight-2 matching")
    _common(p)

    p = sub.add_parser("modular", help="S and T checks of a bulk partition vector")
    p.add_argument("--example", required=True, choices=bulk.EXAMPLES)
    _n_arg(p)
    p.add_argument("--u", default="0", help="elliptic variable as 're,im' or a real number")
    p.add_argument("--t-power", type=int, default=1)
    _common(p)

    p = sub.add_parser("genus", help="elliptic genus of a bulk decomposition")
    p.add_argument("--example", required=True, choices=bulk.EXAMPLES)
    _n_arg(p)
    _common(p)

    p = sub.add_parser("flow", help="spectral flow checks")
    p.add_argument("--example", default="A1", choices=("A1",) + bulk.EXAMPLES)
    _n_arg(p)
    _common(p)

    p = sub.add_parser("n4", help="N=4 mode algebra checks")
    p.add_argument("which", choices=("jacobi", "primed", "flow", "lemma"))
    p.add_argument("--window", type=int, default=2)
    _common(p)

    p = sub.add_parser("freefield", help="free-field realization relations")
    p.add_argument("--relations", default="sl2-level-1", choices=("sl2-level-1", "n4-c6"))
    p.add_argument("--cutoff", default="7/2")
    _common(p)

    p = sub.add_parser("verify-all", help="run the standard battery")
    _common(p)
    return ap


def _parse_u(text: str) -> complex:
    if "," in text:
        re, im = (float(x) for x in text.split(","))
        return complex(re, im)
    return complex(float(text))


def dispatch(argv: Optional[Sequence[str]] = None, out=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        pts = parse_points(args.points) if args.points else None
        cfg = RunConfig(args.order, args.tol, pts, args.format, args.parallel)
        reports = _run_command(args, cfg)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        sys.stderr.write(f"vosa: error: {e}\n")
        return EXIT_USAGE
    return emit(reports, cfg, out)


def _guard(name: str, example, fn: Callable, *a) -> List[dict]:
    try:
        r = fn(*a)
    except (bulk.BulkError, SeriesError, lattices.LatticeError, codes.CodeError,
            freefields.FreeFieldError, n4.N4Error) as e:
        return [_error_report(name, example, e)]
    return r if isinstance(r, list) else [r]


def _run_command(args, cfg: RunConfig) -> List[dict]:
    cmd = args.command
    if cmd == "characters":
        return _guard("characters", args.lattice, check_characters, args.lattice, args.sector, cfg.order)
    if cmd == "theta":
        return _guard("theta", args.lattice, check_theta, args.lattice, cfg.order)
    if cmd == "glue":
        if args.family == "golay":
            return _guard("glue", "golay", check_glue_golay)
        if args.n is None:
            raise UsageError("--n is required for the d family")
        classes = range(4) if args.cls is None else [args.cls]
        jobs = [(f"glue-{i}", check_glue_d, (args.n, i)) for i in classes]
        return run_jobs(jobs, cfg.parallel)
    if cmd == "classify":
        return _guard("classify", None, check_classify)
    if cmd == "modular":
        return _guard("modular", args.example, check_modular, args.example, args.n, cfg, _parse_u(args.u),
                      args.t_power)
    if cmd == "genus":
        return _guard("elliptic_genus", args.example, check_genus, args.example, args.n, cfg.order)
    if cmd == "flow":
        if args.example == "A1":
            return _guard("spectral_flow_character", "A1", check_a1_flow, cfg.order)
        return _guard("spectral_flow", args.example, check_flow, args.example, args.n, cfg.order)
    if cmd == "n4":
        return _guard(f"n4-{args.which}", None, check_n4, args.which, args.window, cfg.parallel)
    if cmd == "freefield":
        return _guard("freefield", args.relations, check_freefield, args.relations, args.cutoff)
    if cmd == "verify-all":
        return run_jobs(_battery(cfg), cfg.parallel)
    raise UsageError(f"unknown command {cmd!r}")


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
