"""Batch verification over character classes, JSONL persistence and the CLI."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import multiprocessing
import sys
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .characters import ConjugacyClass, enumerate_classes
from .conjectures import (
    M_MAX,
    Schedule,
    analyze_class,
    canonical_key,
    gross_check,
    lambda_via_sinnott_Q,
    main_conjecture_verdict,
    series_with_invariants,
)
from .iwasawa import h_poly
from .newton import build_newton_polygon
from .padic import PadicElement, PrecisionError, SeriesApprox, base_ring, cyclotomic_data, vp_int
from .series import gsharp_reduce, positive_valuation_roots, weierstrass_distinguished, zero_map_t_to_s

log = logging.getLogger("lpzeros")

SCHEMA = 1
TIMING_FIELDS = ("timings", "wall_time")

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_PRECISION, EXIT_USAGE = 0, 1, 2, 3


@dataclass
class BatchConfig:
    p: int
    bound: int
    lower: int = 1
    orders: tuple[int, ...] | None = None
    L0: int = 12
    digits: int = 4
    max_size: int = 400_000
    m_max: int = M_MAX
    out: str | None = None
    jobs: int = 1
    plant: bool = False

    def __post_init__(self):
        if self.bound < 3 and self.bound >= self.lower:
            raise ValueError("conductor bound must be at least 3")
        if self.digits <= 0 or self.L0 <= 0:
            raise ValueError("precisions must be positive")

    @property
    def schedule(self) -> Schedule:
        return Schedule(L0=self.L0, digits=self.digits, max_size=self.max_size, m_max=self.m_max)


# --- records ---------------------------------------------------------------------

def class_record(cls: ConjugacyClass, p: int, sched: Schedule) -> dict:
    chi = cls.representative
    t0 = time.perf_counter()
    try:
        rep = analyze_class(chi, p, sched, orbit_size=cls.orbit_size)
        rec = rep.to_dict()
    except Exception as exc:  # recorded, the batch continues
        rec = {"key": chi.key(p), "p": p, "conductor": chi.modulus, "order": chi.order,
               "status": "error", "error": f"{type(exc).__name__}: {exc}"}
    f0 = chi.modulus // p ** vp_int(chi.modulus, p)
    rec.update({
        "schema": SCHEMA,
        "version": __version__,
        "degree": cls.embedding_degree,
        "psi_conductor": f0,
        "stats_admissible": p != 2 and chi.order % p != 0 and vp_int(chi.modulus, p) <= 1 and f0 > 1,
        "wall_time": round(time.perf_counter() - t0, 3),
    })
    return rec


def _worker(args):
    cls, p, sched = args
    return class_record(cls, p, sched)


def _planted_root(p: int, K: int) -> int:
    """t_3 = u^(1-3) - 1 modulo p^K."""
    u = cyclotomic_data(p).u
    return (pow(pow(u, -1, p ** K), 2, p ** K) - 1) % p ** K


def planted_counterexample_record(p: int, m_max: int = 10 ** 4) -> dict:
    """A planted series G = (T - t_3)(1 + T) whose zero sits at s = 3."""
    cd = cyclotomic_data(p)
    ring = base_ring(p)
    K = 30
    t3 = _planted_root(p, K)
    coeffs = [-t3, 1 - t3, 1]
    S = SeriesApprox.from_ints(ring, coeffs, K, mu_floor=K)
    W = weierstrass_distinguished(S)
    certs = positive_valuation_roots(W.distinguished, cd.w)

    def refine(E: int) -> int:
        K2 = E + cd.w + 4
        D = [PadicElement.from_int(ring, -_planted_root(p, K2), K2), PadicElement.from_int(ring, 1, K2)]
        cert = positive_valuation_roots(D, cd.w)[0]
        s = zero_map_t_to_s(PadicElement.from_int(ring, cert.approx, cert.precision), p)
        return s.to_int() % p ** E

    verdict = main_conjecture_verdict([(0, 0, refine) for _ in certs], p, m_max, heuristic=False)
    return {"key": f"{p}:planted", "p": p, "status": "counterexample" if verdict["counterexamples"] else "ok",
            "planted": True, "main_conjecture": verdict, "schema": SCHEMA, "version": __version__}


def dump(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, default=str)


def strip_timings(rec: dict) -> dict:
    return {k: v for k, v in rec.items() if k not in TIMING_FIELDS}


def _complete_lines(path) -> list[tuple[dict, int]]:
    """(record, byte offset after it) for each complete JSONL line; stops at the first damaged one."""
    out = []
    p = Path(path)
    if not p.exists():
        return out
    data = p.read_bytes()
    pos = 0
    while pos < len(data):
        nl = data.find(b"\n", pos)
        if nl < 0:
            break
        try:
            rec = json.loads(data[pos:nl])
        except json.JSONDecodeError:
            break
        pos = nl + 1
        out.append((rec, pos))
    return out


def read_records(path) -> tuple[list[dict], int]:
    """Complete records of a JSONL file and the byte offset after the last one."""
    lines = _complete_lines(path)
    return [r for r, _ in lines], (lines[-1][1] if lines else 0)


def exit_code_for(records: list[dict]) -> int:
    statuses = {r.get("status") for r in records}
    if "counterexample" in statuses:
        return EXIT_COUNTEREXAMPLE
    if statuses & {"precision-exhausted", "error"}:
        return EXIT_PRECISION
    return EXIT_OK


def select_classes(cfg: BatchConfig) -> list[ConjugacyClass]:
    classes = enumerate_classes(cfg.p, cfg.bound, lower=cfg.lower)
    if cfg.orders:
        classes = [c for c in classes if c.representative.order in cfg.orders]
    return classes


def run_batch(cfg: BatchConfig) -> tuple[dict, int]:
    """Process every class, appending one record per class (resuming a partial file)."""
    classes = select_classes(cfg)
    sched = cfg.schedule
    done: list[dict] = []
    sink = None
    if cfg.out:
        offset = 0
        for rec, end in _complete_lines(cfg.out):
            if rec.get("planted"):
                break
            done.append(rec)
            offset = end
        if Path(cfg.out).exists():
            with open(cfg.out, "r+b") as fh:
                fh.truncate(offset)
        if done:
            log.info("resuming after %d complete records", len(done))
        sink = open(cfg.out, "a", encoding="utf-8")
    todo = classes[len(done):]
    records = list(done)
    tasks = [(c, cfg.p, sched) for c in todo]

    def emit(rec):
        records.append(rec)
        if sink:
            sink.write(dump(rec) + "\n")
            sink.flush()

    try:
        if cfg.jobs > 1 and len(tasks) > 1:
            with multiprocessing.Pool(cfg.jobs) as pool:
                for rec in pool.imap(_worker, tasks):
                    emit(rec)
        else:
            for t in tasks:
                emit(_worker(t))
        if cfg.plant:
            emit(planted_counterexample_record(cfg.p, cfg.m_max))
    finally:
        if sink:
            sink.close()
    summary = tallies(records)
    return summary, exit_code_for(records)


# --- reports ------------------------------------------------------------------------

def tallies(records: list[dict]) -> dict:
    out = {
        "records": len(records),
        "status": dict(Counter(r.get("status", "?") for r in records)),
        "mu": dict(Counter(_mu_tag(r) for r in records)),
        "gross": dict(Counter(_gross_tag(r) for r in records)),
        "simple_roots": dict(Counter(_simple_tag(r) for r in records)),
        "main_conjecture": dict(Counter((r.get("main_conjecture") or {}).get("verdict", "n/a")
                                        for r in records)),
        "lambda": dict(Counter(str(r.get("lam")) for r in records)),
    }
    return out


def _mu_tag(r):
    mv = r.get("mu_verdict")
    if not mv:
        return "n/a"
    return {True: "holds", False: "fails", None: "undetermined"}[mv.get("holds")]


def _gross_tag(r):
    g = r.get("gross")
    if not g:
        return "n/a"
    return "matched" if g.get("matched") else "mismatch"


def _simple_tag(r):
    s = r.get("simple_roots")
    if not s:
        return "n/a"
    return "simple" if s.get("simple") else "inconclusive"


def emit_report(records: list[dict]) -> tuple[str, dict]:
    t = tallies(records)
    lines = [f"records: {t['records']}"]
    for name in ("status", "mu", "gross", "simple_roots", "main_conjecture", "lambda"):
        parts = ", ".join(f"{k}={v}" for k, v in sorted(t[name].items()))
        lines.append(f"{name}: {parts}")
    for r in records:
        if r.get("status") not in ("ok", None):
            lines.append(f"  {r.get('key')}: {r.get('status')} {r.get('error') or ''}".rstrip())
    return "\n".join(lines) + "\n", t


def stats_csv(records: list[dict], p: int, d: int) -> str:
    """Cumulative count of lambda > 0 and cumulative sum of p^-deg, by conductor of psi."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["conductor", "count_lambda_positive", "model_sum"])
    rows = [r for r in records if r.get("p") == p and r.get("degree") == d and r.get("stats_admissible")]
    for r in rows:
        if r.get("lam") is None:
            raise ValueError(f"record {r.get('key')} has no lambda")
    rows.sort(key=lambda r: (r["psi_conductor"], r["key"]))
    blue, red = 0, Fraction(0)
    out: list[list] = []
    for r in rows:
        blue += 1 if r["lam"] > 0 else 0
        red += Fraction(1, p ** r["degree"])
        if out and out[-1][0] == r["psi_conductor"]:
            out[-1] = [r["psi_conductor"], blue, red]
        else:
            out.append([r["psi_conductor"], blue, red])
    for x, b, s in out:
        w.writerow([x, b, str(s)])
    return buf.getvalue()


# --- CLI -----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _classes_for(args) -> list[ConjugacyClass]:
    if args.conductor:
        classes = enumerate_classes(args.p, args.conductor, lower=args.conductor)
    else:
        classes = enumerate_classes(args.p, args.bound)
    if args.order:
        classes = [c for c in classes if c.representative.order == args.order]
    if args.index is not None:
        classes = classes[args.index:args.index + 1]
    return classes


def _out(args):
    return open(args.out, "w", encoding="utf-8") if args.out else sys.stdout


def _series_dict(S: SeriesApprox) -> list[dict]:
    out = []
    for i, c in enumerate(S.coeffs):
        v = c.valuation()
        out.append({"i": i, "valuation": None if v is None else str(v), "precision": str(c.prec),
                    "coords": [str(x) for x in c.coords], "shift": c.shift})
    return out


def cmd_enumerate(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            chi = c.representative
            fh.write(dump({"key": chi.key(args.p), "class_key": canonical_key(chi, args.p),
                           "conductor": chi.modulus, "order": chi.order, "orbit_size": c.orbit_size,
                           "degree": c.embedding_degree}) + "\n")
    return EXIT_OK


def _sched(args) -> Schedule:
    return Schedule(L0=args.length, digits=args.precision, m_max=args.m_max)


def cmd_series(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            chi = c.representative
            S, ml = series_with_invariants(chi, args.p, _sched(args))
            fh.write(dump({"key": chi.key(args.p), "level": S.level, "calibration": S.calibration,
                           "mu_floor": str(S.mu_floor), "coeffs": _series_dict(S)}) + "\n")
    return EXIT_OK


def cmd_invariants(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            chi = c.representative
            S, ml = series_with_invariants(chi, args.p, _sched(args))
            lam = ml.lam - (0 if h_poly(chi, args.p).is_one else 1)
            fh.write(dump({"key": chi.key(args.p), "mu": str(ml.mu), "lambda_G": ml.lam, "lambda": lam,
                           "level": S.level, "L": S.L}) + "\n")
    return EXIT_OK


def cmd_newton(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            chi = c.representative
            S, ml = series_with_invariants(chi, args.p, _sched(args))
            g = gross_check(chi, S, args.p)
            Gs = gsharp_reduce(S, g.r_prime, args.p)
            NP = build_newton_polygon(Gs)
            rec = {"key": chi.key(args.p), "segments": [str(s) for s in NP.segments],
                   "on_points": NP.on_points}
            if args.grid:
                rec["grid"] = NP.to_grid()
            if args.csv:
                rec["csv"] = NP.to_csv()
            fh.write(dump(rec) + "\n")
    return EXIT_OK


def cmd_roots(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            rep = analyze_class(c.representative, args.p, _sched(args), c.orbit_size, with_sinnott=False)
            fh.write(dump({"key": rep.key, "status": rep.status, "roots": rep.roots,
                           "main_conjecture": rep.main_conjecture}) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = BatchConfig(p=args.p, bound=args.bound, lower=args.lower,
                      orders=(args.order,) if args.order else None, L0=args.length,
                      digits=args.precision, m_max=args.m_max, out=args.out, jobs=args.jobs,
                      plant=args.plant)
    summary, code = run_batch(cfg)
    print(json.dumps(summary, sort_keys=True))
    return code


def cmd_sinnott(args) -> int:
    with _out(args) as fh:
        for c in _classes_for(args):
            chi = c.representative
            fh.write(dump({"key": chi.key(args.p), "lambda_sinnott": lambda_via_sinnott_Q(chi, args.p)}) + "\n")
    return EXIT_OK


def cmd_stats(args) -> int:
    if not args.input:
        raise SystemExit(EXIT_USAGE)
    records, _ = read_records(args.input)
    if args.d is not None:
        text = stats_csv(records, args.p, args.d)
    else:
        text, _ = emit_report(records)
    with _out(args) as fh:
        fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lpzeros", description="Zeroes of p-adic L-functions of Dirichlet characters")
    ap.add_argument("--p", type=int, required=True, help="the prime p")
    ap.add_argument("--bound", type=int, default=30, help="conductor bound B")
    ap.add_argument("--precision", type=int, default=4, help="target digits for the series")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=None, help="output file (stdout when omitted)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)
    for name in ("enumerate", "series", "invariants", "newton", "roots", "verify", "sinnott", "stats"):
        sp = sub.add_parser(name)
        sp.add_argument("--conductor", type=int, default=None)
        sp.add_argument("--order", type=int, default=None)
        sp.add_argument("--index", type=int, default=None)
        sp.add_argument("--lower", type=int, default=1)
        sp.add_argument("--length", type=int, default=12, help="initial series length L")
        sp.add_argument("--m-max", dest="m_max", type=int, default=M_MAX)
        if name == "newton":
            sp.add_argument("--grid", action="store_true")
            sp.add_argument("--csv", action="store_true")
        if name == "verify":
            sp.add_argument("--plant", action="store_true", help="append a planted counterexample")
        if name == "stats":
            sp.add_argument("--input", default=None, help="JSONL records")
            sp.add_argument("--d", type=int, default=None, help="emit the cumulative CSV for degree d")
    return ap


COMMANDS = {
    "enumerate": cmd_enumerate, "series": cmd_series, "invariants": cmd_invariants,
    "newton": cmd_newton, "roots": cmd_roots, "verify": cmd_verify, "sinnott": cmd_sinnott,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.p < 2 or any(args.p % d == 0 for d in range(2, int(args.p ** 0.5) + 1)):
        print(f"error: {args.p} is not prime", file=sys.stderr)
        return EXIT_USAGE
    if args.bound < 1 or args.precision <= 0 or args.jobs < 1:
        print("error: bound, precision and jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.verb](args)
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
