"""Cross-validation of every identity on one lattice or across a parameter grid."""

from __future__ import annotations

import itertools
import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .arith import PrimeCtx, least_nonresidue
from .closed import TailParams, closed_coefficients, closed_counts, signed_closed_counts
from .errors import GuardrailExceeded, PoleAtK, UnsupportedShape
from .lattice import QuadLattice, b_invariants, gk_invariant
from .overlat import count_table, count_table_via_param, enumerate_overlattices
from .series import (
    HalfPowerValue,
    applicable_modes,
    coefficients,
    local_density,
    local_density_naive,
    low_order,
    siegel_poly,
    substitute_normalized,
)

log = logging.getLogger(__name__)

CHECKS = (
    "oracle",
    "gk_drop",
    "two_route",
    "functional_eq",
    "shape",
    "closed_counts",
    "closed_coeffs",
    "corollaries",
    "density",
)


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skipped
    details: str = ""
    reason: str = ""


@dataclass
class CheckReport:
    lattice_key: str
    checks: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0
    series: dict = field(default_factory=dict)

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]

    def status(self, name: str) -> str:
        return next(c.status for c in self.checks if c.name == name)

    def to_json(self, with_time: bool = False) -> dict:
        out = {"key": self.lattice_key, "checks": [asdict(c) for c in self.checks], "series": self.series}
        if with_time:
            out["elapsed"] = round(self.elapsed, 4)
        return out


def _fmt(seq) -> str:
    return "[" + ", ".join(repr(x) for x in seq) + "]"


def _oracle(L, table):
    if L.n < 2:
        return "skipped", "", "rank_below_2"
    try:
        param = count_table_via_param(L)
    except UnsupportedShape:
        return "skipped", "", "n0_below_n_minus_2"
    if param == table:
        return "pass", "", ""
    return "fail", f"enumeration={table.to_json()} parametrized={param.to_json()}", ""


def _gk_drop(L, table, b_cap=None):
    gk = gk_invariant(L).gk
    total = sum(gk)
    seen = 0
    top = table.b_max if b_cap is None else min(b_cap, table.b_max)
    for b in range(top + 1):
        for ov in enumerate_overlattices(L.canonical(), b):
            seen += 1
            gk2 = gk_invariant(QuadLattice(L.p, ov.gram)).gk
            if sum(gk2) != total - 2 * b or not tuple(gk) >= tuple(gk2):
                return "fail", f"b={b} GK(L)={gk} GK(L')={gk2}", ""
    return "pass", f"{seen} overlattices", ""


def _two_route(c_counts, c_sub):
    if c_counts == c_sub:
        return "pass", "", ""
    return "fail", f"counts route={_fmt(c_counts)} substitution={_fmt(c_sub)}", ""


def _functional_eq(c, zeta):
    bad = [t for t in range(len(c)) if c[t] != c[len(c) - 1 - t] * zeta]
    if not bad:
        return "pass", "", ""
    return "fail", f"c={_fmt(c)} zeta={zeta} t={bad}", ""


def _shape(F, L):
    inv = F.meta
    lead = HalfPowerValue.power(L.p, (L.n + 1) * inv.eB, inv.zetaB)
    problems = []
    if F.coeffs[0] != 1:
        problems.append(f"F(0)={F.coeffs[0]}")
    if F.degree != inv.eB:
        problems.append(f"deg={F.degree} eB={inv.eB}")
    if F.coeffs[-1] != lead:
        problems.append(f"lead={F.coeffs[-1]} expected={lead}")
    if not all(c.is_integer() for c in F.coeffs):
        problems.append("non-integer coefficient")
    return ("fail", "; ".join(problems), "") if problems else ("pass", "", "")


def _tail(L):
    if L.n < 2:
        return None, ("skipped", "", "rank_below_2")
    try:
        return TailParams.from_lattice(L), None
    except UnsupportedShape:
        return None, ("skipped", "", "n0_below_n_minus_2")


def _closed_counts(L, table):
    t, skip = _tail(L)
    if skip:
        return skip
    for b in range(table.b_max + 1):
        bf = (table.total(L.n - 2, b), table.total(L.n - 1, b), table.total(L.n, b))
        cc = closed_counts(t, b)
        if bf != cc:
            return "fail", f"b={b} counts enumerated={bf} closed={cc}", ""
        for a, v in signed_closed_counts(t, b).items():
            if table.signed(a, b) != v:
                return "fail", f"b={b} signed a={a} enumerated={table.signed(a, b)} closed={v}", ""
    return "pass", "", ""


def _closed_coeffs(L, c):
    t, skip = _tail(L)
    if skip:
        return skip
    cl = closed_coefficients(t)
    if cl != c:
        return "fail", f"coefficients={_fmt(c)} closed={_fmt(cl)}", ""
    return "pass", "", ""


def _corollaries(L, table, c):
    ran = []
    for mode in applicable_modes(L):
        lo = low_order(L, table, mode)
        if lo != c[: len(lo)]:
            return "fail", f"mode={mode} corollary={_fmt(lo)} coefficients={_fmt(c[: len(lo)])}", ""
        ran.append(mode)
    return "pass", ",".join(ran), ""


def _density(L, k_max: int, naive_limit: int):
    gk_total = gk_invariant(L).total
    done = []
    for k in range(1, k_max + 1):
        try:
            exact = local_density(L, k)
        except PoleAtK:
            continue
        try:
            naive = [local_density_naive(L, k, N, naive_limit) for N in (gk_total + 1, gk_total + 2)]
        except GuardrailExceeded:
            continue
        if naive[0] != naive[1] or naive[0] != exact:
            return "fail", f"k={k} formula={exact} naive(N={gk_total + 1},{gk_total + 2})={naive[0]},{naive[1]}", ""
        done.append(f"k={k}:{exact}")
    if not done:
        return "skipped", "", "guardrail"
    return "pass", " ".join(done), ""


def check_lattice(
    L: QuadLattice, density: bool = False, k_max: int = 2, naive_limit: int = 10**6, b_cap: Optional[int] = None
) -> CheckReport:
    """Run every registered check on L; failures are recorded, never raised."""
    start = time.perf_counter()
    report = CheckReport(L.key())

    def add(name, outcome):
        status, details, reason = outcome
        report.checks.append(CheckResult(name, status, details, reason))

    try:
        table = count_table(L)
    except GuardrailExceeded as e:
        for name in CHECKS:
            add(name, ("skipped", str(e), "guardrail"))
        report.elapsed = time.perf_counter() - start
        return report

    add("oracle", _oracle(L, table))
    add("gk_drop", _gk_drop(L, table, b_cap))
    inv = b_invariants(L)
    try:
        F = siegel_poly(L, table)
    except AssertionError as e:  # InconsistentCounts
        for name in CHECKS[2:]:
            add(name, ("fail", f"siegel_poly: {e}", ""))
        report.elapsed = time.perf_counter() - start
        return report
    c = coefficients(L, table)
    report.series = {"n": L.n, "F": F.integer_coeffs(), "c": [x.pairs() for x in c], "eB": inv.eB, "zeta": inv.zetaB}
    add("two_route", _two_route(c, substitute_normalized(F)))
    add("functional_eq", _functional_eq(c, inv.zetaB))
    add("shape", _shape(F, L))
    add("closed_counts", _closed_counts(L, table))
    add("closed_coeffs", _closed_coeffs(L, c))
    add("corollaries", _corollaries(L, table, c))
    add("density", _density(L, k_max, naive_limit) if density else ("skipped", "", "not_requested"))
    report.elapsed = time.perf_counter() - start
    return report


@dataclass(frozen=True)
class GridSpec:
    primes: tuple[int, ...]
    n_range: tuple[int, ...] = (1, 2, 3)
    d_max: int = 3
    unit_classes: str = "canonical"  # canonical | all
    b_cap: Optional[int] = None
    checks: tuple[str, ...] = CHECKS
    jobs: int = 1
    seed: int = 0
    sample: Optional[int] = None
    density: bool = False
    tail_only: bool = True

    def __post_init__(self):
        if not self.primes:
            raise ValueError("GridSpec needs at least one prime")
        for p in self.primes:
            PrimeCtx(p)
        if not self.n_range or min(self.n_range) < 1:
            raise ValueError("n_range must be nonempty and positive")
        if self.d_max < 0:
            raise ValueError("d_max must be >= 0")
        if self.unit_classes not in ("canonical", "all"):
            raise ValueError("unit_classes must be 'canonical' or 'all'")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")


def grid_lattices(spec: GridSpec) -> list[QuadLattice]:
    """All grid points, deduplicated by canonical key and sorted by it.

    With ``tail_only`` the exponent pattern is (0,...,0,d1,d2) as in the
    closed-form regime; otherwise every nondecreasing exponent tuple up to
    ``d_max`` is included.
    """
    out: dict[str, QuadLattice] = {}
    for p in spec.primes:
        r = least_nonresidue(p)
        for n in spec.n_range:
            if spec.tail_only:
                tails = [(d1, d2) for d1 in range(spec.d_max + 1) for d2 in range(d1, spec.d_max + 1)]
                exps_list = [(0,) * (n - 2) + t for t in tails] if n >= 2 else [(d,) for d in range(spec.d_max + 1)]
            else:
                exps_list = list(itertools.combinations_with_replacement(range(spec.d_max + 1), n))
            for exps in exps_list:
                unit_set = (1, r) if spec.unit_classes == "canonical" else range(1, p)
                for units in itertools.product(unit_set, repeat=n):
                    L = QuadLattice.from_diag(p, list(zip(units, exps))).canonical()
                    out.setdefault(L.key(), L)
    lattices = [out[k] for k in sorted(out)]
    if spec.sample is not None and spec.sample < len(lattices):
        picked = sorted(random.Random(spec.seed).sample(range(len(lattices)), spec.sample))
        lattices = [lattices[i] for i in picked]
    return lattices


def _run_one(args) -> dict:
    L_json, density, b_cap = args
    L = QuadLattice.from_json(L_json)
    return check_lattice(L, density=density, b_cap=b_cap).to_json()


@dataclass
class GridSummary:
    total: int
    passed: int
    failed: int
    skipped: int
    per_check: dict

    def to_json(self) -> dict:
        return asdict(self)


def run_grid(spec: GridSpec, sink=None) -> tuple[GridSummary, list[dict]]:
    """Run check_lattice over the grid; returns (summary, failing reports).

    Reports are emitted to ``sink`` (a text stream) as JSONL in canonical key
    order regardless of how many worker processes were used.
    """
    lattices = grid_lattices(spec)
    work = [(L.to_json(), spec.density, spec.b_cap) for L in lattices]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            reports = list(pool.map(_run_one, work, chunksize=4))
    else:
        reports = [_run_one(w) for w in work]
    per_check = {name: {"pass": 0, "fail": 0, "skipped": 0} for name in spec.checks}
    failing = []
    n_fail = n_skip = 0
    for rep in reports:
        rep["checks"] = [c for c in rep["checks"] if c["name"] in spec.checks]
        statuses = [c["status"] for c in rep["checks"]]
        for c in rep["checks"]:
            per_check[c["name"]][c["status"]] += 1
        if "fail" in statuses:
            n_fail += 1
            failing.append(rep)
        elif all(s == "skipped" for s in statuses):
            n_skip += 1
        if sink is not None:
            sink.write(json.dumps(rep, sort_keys=True) + "\n")
    summary = GridSummary(len(reports), len(reports) - n_fail - n_skip, n_fail, n_skip, per_check)
    return summary, failing


