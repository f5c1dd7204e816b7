"""Command-line front end: ``siegel {gk,counts,series,density,verify,grid}``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 guardrail refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .arith import format_rational, parse_rational
from .errors import GuardrailExceeded, InconsistentCounts, PoleAtK, SiegelError
from .lattice import QuadLattice, gk_invariant
from .overlat import CountTable, count_table
from .series import local_density, local_density_naive, siegel_poly, substitute_normalized
from .verify import CHECKS, GridSpec, check_lattice, run_grid

log = logging.getLogger("siegel")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    lattice: Optional[QuadLattice] = None
    out: Optional[Path] = None
    fmt: str = "json"
    jobs: int = 1
    store: Optional[Path] = None
    log_level: str = "error"
    b: Optional[int] = None
    k: Optional[int] = None
    naive: Optional[int] = None
    density: bool = False
    grid: Optional[GridSpec] = None


def parse_diag(text: str, p: int) -> QuadLattice:
    """``"1:1,1:2"`` → diag(1·p, 1·p²)."""
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        unit, sep, order = item.partition(":")
        if not sep:
            raise UsageError(f"--diag entry {item!r} is not of the form unit:ord")
        try:
            pairs.append((parse_rational(unit), int(order)))
        except ValueError as e:
            raise UsageError(f"--diag entry {item!r}: {e}") from None
    if not pairs:
        raise UsageError("--diag is empty")
    return QuadLattice.from_diag(p, pairs)


def load_gram(path: str, p: Optional[int]) -> QuadLattice:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, list):
        obj = {"gram": obj}
    if p is not None:
        obj.setdefault("p", p)
    if "p" not in obj:
        raise UsageError("--gram file has no 'p' and --p was not given")
    return QuadLattice.from_json(obj)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="siegel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def lattice_args(sp):
        sp.add_argument("--p", type=int, help="odd prime")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--diag", help="comma-separated unit:ord pairs, e.g. 1:1,1:2")
        src.add_argument("--gram", help="JSON file with a Gram matrix or a lattice object")

    def output_args(sp):
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        sp.add_argument("--out", type=Path, help="write output here instead of stdout")

    sp = sub.add_parser("gk", help="Gross-Keating invariant and n0")
    lattice_args(sp)
    output_args(sp)

    sp = sub.add_parser("counts", help="census of integral overlattices")
    lattice_args(sp)
    output_args(sp)
    sp.add_argument("--b", type=int, help="only this index length")
    sp.add_argument("--store", type=Path, help="JSONL result store to reuse and extend")

    sp = sub.add_parser("series", help="F_L(X), c_t and the determinant invariants")
    lattice_args(sp)
    output_args(sp)
    sp.add_argument("--store", type=Path, help="JSONL result store to reuse and extend")

    sp = sub.add_parser("density", help="local density α(L, H_k)")
    lattice_args(sp)
    output_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--naive", type=int, metavar="N", help="also count solutions mod p^N directly")

    sp = sub.add_parser("verify", help="run every check on one lattice")
    lattice_args(sp)
    output_args(sp)
    sp.add_argument("--density", action="store_true", help="include the naive density cross-check")

    sp = sub.add_parser("grid", help="run every check over a parameter grid")
    sp.add_argument("--p", required=True, help="comma-separated odd primes")
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--n-min", type=int, default=1)
    sp.add_argument("--d-max", type=int, default=3)
    sp.add_argument("--units", choices=("canonical", "all"), default="canonical")
    sp.add_argument("--all-shapes", action="store_true", help="every exponent tuple, not only (0,..,0,d1,d2)")
    sp.add_argument("--b-cap", type=int)
    sp.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECKS)}")
    sp.add_argument("--sample", type=int, help="random subset of this size")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--density", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    output_args(sp)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, out=ns.out, fmt=ns.fmt)
    cfg.log_level = os.environ.get("SIEGEL_LOG", "error").lower()
    if cfg.log_level not in LOG_LEVELS:
        raise UsageError(f"SIEGEL_LOG must be one of {sorted(LOG_LEVELS)}")
    if ns.command == "grid":
        try:
            primes = tuple(int(x) for x in ns.p.split(",") if x.strip())
        except ValueError:
            raise UsageError(f"--p {ns.p!r} is not a comma-separated list of primes") from None
        checks = tuple(c.strip() for c in ns.checks.split(",")) if ns.checks else CHECKS
        try:
            cfg.grid = GridSpec(
                primes=primes,
                n_range=tuple(range(ns.n_min, ns.n_max + 1)),
                d_max=ns.d_max,
                unit_classes=ns.units,
                b_cap=ns.b_cap,
                checks=checks,
                jobs=ns.jobs,
                seed=ns.seed,
                sample=ns.sample,
                density=ns.density,
                tail_only=not ns.all_shapes,
            )
        except ValueError as e:
            raise UsageError(str(e)) from None
        cfg.jobs = ns.jobs
        return cfg
    if ns.diag is not None:
        if ns.p is None:
            raise UsageError("--diag needs --p")
        cfg.lattice = parse_diag(ns.diag, ns.p)
    else:
        cfg.lattice = load_gram(ns.gram, ns.p)
    cfg.b = getattr(ns, "b", None)
    cfg.k = getattr(ns, "k", None)
    cfg.naive = getattr(ns, "naive", None)
    cfg.store = getattr(ns, "store", None)
    cfg.density = getattr(ns, "density", False)
    if cfg.b is not None and cfg.b < 0:
        raise UsageError("--b must be >= 0")
    if cfg.k is not None and cfg.k < 1:
        raise UsageError("--k must be >= 1")
    if cfg.naive is not None and cfg.naive < 1:
        raise UsageError("--naive must be >= 1")
    return cfg


class ResultStore:
    """Append-only JSONL file of {"key", "counts", "series"} records."""

    def __init__(self, path: Path):
        self.path = path

    def lookup(self, key: str) -> Optional[dict]:
        if not self.path.exists():
            return None
        found = None
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rec = json.loads(line)
                    if rec.get("key") == key:
                        found = rec
        return found

    def append(self, record: dict):
        with self.path.open("a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def series_json(L: QuadLattice, counts: CountTable) -> dict:
    F = siegel_poly(L, counts)
    c = substitute_normalized(F)
    inv = F.meta
    return {
        "F": [str(x) for x in F.integer_coeffs()],
        "c": [x.pairs() for x in c],
        "eB": inv.eB,
        "zeta": inv.zetaB,
        "invariants": {
            "n": inv.n,
            "DB": format_rational(inv.DB),
            "xiB": inv.xiB,
            "etaB": inv.etaB,
            "gk": list(inv.gk.gk),
        },
    }


def _counts_for(L: QuadLattice, store: Optional[ResultStore]) -> CountTable:
    if store is not None:
        rec = store.lookup(L.key())
        if rec is not None and "counts" in rec:
            log.info("reusing stored counts for %s", L.key())
            return CountTable.from_json(rec["counts"], L.n)
    counts = count_table(L)
    if store is not None:
        store.append({"key": L.key(), "counts": counts.to_json(), "series": series_json(L, counts)})
    return counts


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _c_text(pairs) -> str:
    return " ".join(f"{k}:{c}" for k, c in pairs) or "0"


def execute(cfg: RunConfig) -> tuple[int, str]:
    """Run a validated config; returns (exit code, text to emit)."""
    L = cfg.lattice
    store = ResultStore(cfg.store) if cfg.store else None

    if cfg.command == "gk":
        g = gk_invariant(L)
        obj = {"gk": list(g.gk), "n0": g.n0}
        if cfg.fmt == "csv":
            return EXIT_OK, _csv([["gk", "n0"], [" ".join(map(str, g.gk)), g.n0]])
        return EXIT_OK, json.dumps(obj)

    if cfg.command == "counts":
        counts = _counts_for(L, store)
        obj = counts.to_json()
        if cfg.b is not None:
            obj["rows"] = [r for r in obj["rows"] if r["b"] == cfg.b]
        if cfg.fmt == "csv":
            rows = [["b", "a", "sign", "n"]]
            for r in obj["rows"]:
                rows += [[r["b"], c["a"], c["sign"], c["n"]] for c in r["counts"]]
            return EXIT_OK, _csv(rows)
        return EXIT_OK, json.dumps(obj)

    if cfg.command == "series":
        counts = _counts_for(L, store)
        obj = series_json(L, counts)
        if cfg.fmt == "csv":
            rows = [["t", "F", "c"]]
            for t, c in enumerate(obj["c"]):
                rows.append([t, obj["F"][t] if t < len(obj["F"]) else "0", _c_text(c)])
            return EXIT_OK, _csv(rows)
        return EXIT_OK, json.dumps(obj)

    if cfg.command == "density":
        alpha = local_density(L, cfg.k)
        obj = {"k": cfg.k, "alpha": format_rational(alpha)}
        code = EXIT_OK
        if cfg.naive is not None:
            naive = local_density_naive(L, cfg.k, cfg.naive)
            obj["naive"] = {"N": cfg.naive, "value": format_rational(naive)}
        if cfg.fmt == "csv":
            header, row = ["k", "alpha"], [cfg.k, obj["alpha"]]
            if "naive" in obj:
                header += ["N", "naive"]
                row += [cfg.naive, obj["naive"]["value"]]
            return code, _csv([header, row])
        return code, json.dumps(obj)

    if cfg.command == "verify":
        rep = check_lattice(L, density=cfg.density)
        code = EXIT_FAIL if rep.failed else EXIT_OK
        if cfg.fmt == "csv":
            rows = [["check", "status", "reason", "details"]]
            rows += [[c.name, c.status, c.reason, c.details] for c in rep.checks]
            return code, _csv(rows)
        return code, json.dumps(rep.to_json())

    if cfg.command == "grid":
        sink = io.StringIO()
        summary, failing = run_grid(cfg.grid, sink=sink)
        code = EXIT_FAIL if summary.failed else EXIT_OK
        if cfg.fmt == "csv":
            rows = [["check", "pass", "fail", "skipped"]]
            rows += [[k, v["pass"], v["fail"], v["skipped"]] for k, v in summary.per_check.items()]
            return code, _csv(rows)
        return code, sink.getvalue() + json.dumps({"summary": summary.to_json()})

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = config_from_args(ns)
        logging.basicConfig(level=LOG_LEVELS[cfg.log_level], format="%(levelname)s %(name)s: %(message)s")
        code, text = execute(cfg)
    except GuardrailExceeded as e:
        print(f"siegel: refused: {e}", file=sys.stderr)
        return EXIT_GUARD
    except InconsistentCounts as e:
        print(f"siegel: inconsistent counts: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, PoleAtK, SiegelError, ValueError, OSError) as e:
        print(f"siegel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out is not None:
        cfg.out.write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
