import io
import json

import pytest

from siegel.lattice import QuadLattice
from siegel.verify import CHECKS, GridSpec, check_lattice, grid_lattices, run_grid


def statuses(report):
    return {c.name: c.status for c in report.checks}


def test_every_check_reported_once():
    rep = check_lattice(QuadLattice.from_diag(3, [(1, 1), (1, 2)]))
    assert [c.name for c in rep.checks] == list(CHECKS)


def test_worked_example_passes():
    rep = check_lattice(QuadLattice.from_diag(3, [(1, 1), (1, 2)]))
    st = statuses(rep)
    assert st.pop("density") == "skipped"
    assert set(st.values()) == {"pass"}
    assert rep.series["F"] == [1, 9, 27]


def test_corank_three_skips_closed_forms_only():
    rep = check_lattice(QuadLattice.from_diag(3, [(1, 1), (1, 3), (1, 5)]))
    st = statuses(rep)
    for name in ("oracle", "closed_counts", "closed_coeffs"):
        assert st[name] == "skipped"
        assert next(c.reason for c in rep.checks if c.name == name) == "n0_below_n_minus_2"
    for name in ("gk_drop", "two_route", "functional_eq", "shape", "corollaries"):
        assert st[name] == "pass"


def test_unimodular_identity():
    rep = check_lattice(QuadLattice.from_diag(5, [(1, 0), (1, 0)]), density=True)
    assert not rep.failed
    assert rep.series["F"] == [1] and rep.series["eB"] == 0


def test_skips_carry_reason_codes():
    rep = check_lattice(QuadLattice.from_diag(3, [(1, 2)]))
    assert all(c.reason for c in rep.checks if c.status == "skipped")


def test_small_grid_has_no_failures():
    summary, failing = run_grid(GridSpec(primes=(3,), n_range=(1, 2), d_max=3))
    assert failing == [] and summary.failed == 0 and summary.total > 0


def test_grid_is_deterministic_across_worker_counts():
    spec = dict(primes=(3,), n_range=(2,), d_max=2)
    out1, out2 = io.StringIO(), io.StringIO()
    run_grid(GridSpec(jobs=1, **spec), sink=out1)
    run_grid(GridSpec(jobs=2, **spec), sink=out2)
    assert out1.getvalue() == out2.getvalue()
    keys = [json.loads(line)["key"] for line in out1.getvalue().splitlines()]
    assert keys == sorted(keys)


def test_grid_deduplicates_by_isometry_class():
    lats = grid_lattices(GridSpec(primes=(3,), n_range=(2,), d_max=1, unit_classes="all"))
    assert len({L.key() for L in lats}) == len(lats)
    # (0,0) and (1,1): one block, two determinant classes each; (0,1): two blocks, 2·2 classes
    assert len(lats) == 8


def test_sampling_is_seeded():
    spec = dict(primes=(3, 5), n_range=(2, 3), d_max=2, sample=5)
    a = [L.key() for L in grid_lattices(GridSpec(seed=1, **spec))]
    b = [L.key() for L in grid_lattices(GridSpec(seed=1, **spec))]
    assert a == b and len(a) == 5


def test_check_subset_and_density_grid():
    summary, _ = run_grid(GridSpec(primes=(3,), n_range=(1,), d_max=1, checks=("shape", "density"), density=True))
    assert set(summary.per_check) == {"shape", "density"}
    assert summary.per_check["density"]["pass"] == summary.total


@pytest.mark.parametrize(
    "kwargs",
    [dict(primes=()), dict(primes=(4,)), dict(primes=(3,), n_range=()), dict(primes=(3,), checks=("nope",))],
)
def test_grid_spec_validation(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)
