"""Grid runner, exponent fits, serialization determinism."""

import json
import math

import pytest

from matstat import counting, experiments
from matstat.counting import CountRecord
from matstat.experiments import (
    ExperimentSpec,
    compare_to_bound,
    fit_exponent,
    records_to_csv,
    records_to_json,
    run_grid,
    write_outputs,
)


def _rec(h, count, params="", kind="det", n=2):
    return CountRecord(n=n, h=h, kind=kind, params=params, count=count, elapsed_ms=1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(kind="nope", grid=(1,))
    with pytest.raises(ValueError):
        ExperimentSpec(kind="det", grid=())
    spec = ExperimentSpec(kind="det", grid=[2, 3], params={"d": 1})
    assert spec.grid == (2, 3)
    assert spec.canonical()["params"] == {"d": 1}


def test_run_grid_det_matches_direct():
    spec = ExperimentSpec(kind="det", n=2, grid=(1, 2), params={"d": 0}, parts=2)
    recs = run_grid(spec)
    assert [r.count for r in recs] == [
        counting.count_with_det(2, 1, 0),
        counting.count_with_det(2, 2, 0),
    ]
    assert recs[0].h == 1 and recs[0].kind == "det"


def test_run_grid_charpoly_and_max():
    from matstat.exact import MonicIntPoly

    spec = ExperimentSpec(
        kind="charpoly", n=2, grid=(1, 2), params={"f": [0, 0, 1]}
    )
    recs = run_grid(spec)
    assert recs[0].count == 9
    assert recs[1].count == counting.count_charpoly_fast2(2, MonicIntPoly((0, 0)))
    mx = run_grid(ExperimentSpec(kind="charpoly-max", n=2, grid=(2,)))
    f, c = counting.max_charpoly_count(2, 2)
    assert mx[0].count == c
    assert "argmax" in mx[0].params


def test_run_grid_det_trace_and_t2():
    base = run_grid(
        ExperimentSpec(kind="det-trace", n=3, grid=(1,), params={"d": 0, "t": 0})
    )
    assert base[0].count == 2223
    with_t2 = run_grid(
        ExperimentSpec(
            kind="det-trace", n=3, grid=(1,), params={"d": 0, "t": 0, "t2": 0}
        )
    )
    assert with_t2[0].count == counting.count_det_trace2(3, 1, 0, 0, 0)


def test_run_grid_bordered_census_shear_totient():
    recs = run_grid(ExperimentSpec(kind="singular-bordered", n=2, grid=(1, 2)))
    assert [r.count for r in recs] == [6, 20]
    assert "v=6" in recs[0].params

    cen = run_grid(
        ExperimentSpec(kind="kbad-census", n=3, grid=(6,), params={"K": 2})
    )
    assert cen[0].count == 720
    assert "t=3" in cen[0].params and "K=2" in cen[0].params

    sq = run_grid(
        ExperimentSpec(kind="kbad-census", n=3, grid=(20,), params={"K": "sqrt"})
    )
    assert "K=5" in sq[0].params  # ceil(sqrt(20))

    sh = run_grid(ExperimentSpec(kind="multdep-shear", n=2, grid=(2, 3, 4)))
    assert [r.count for r in sh] == [2, 3, 4]
    assert "witness=" in sh[0].params

    tv = run_grid(ExperimentSpec(kind="totient-v", n=1, grid=(5, 100)))
    assert [r.count for r in tv] == [4, 100]


def test_run_grid_centralizer():
    recs = run_grid(
        ExperimentSpec(
            kind="centralizer",
            n=2,
            grid=(1, 2),
            params={"matrix": [[1, 1], [0, 1]]},
        )
    )
    assert [r.count for r in recs] == [9, 25]


def test_fit_exponent_recovers_power_law():
    recs = [_rec(h, 7 * h**3) for h in (2, 4, 8, 16)]
    fit = fit_exponent(recs)
    assert abs(fit.slope - 3.0) < 1e-12
    assert abs(math.exp(fit.intercept) - 7.0) < 1e-9
    assert fit.max_residual < 1e-12
    assert fit.points == 4
    assert abs(fit.predicts(32) - 7 * 32**3) < 1e-6


def test_fit_exponent_validation():
    with pytest.raises(ValueError):
        fit_exponent([_rec(2, 5)])
    with pytest.raises(ValueError):
        fit_exponent([_rec(2, 5), _rec(3, 0)])
    with pytest.raises(ValueError):
        fit_exponent([_rec(2, 5), _rec(2, 6)])


def test_compare_to_bound():
    fit = fit_exponent([_rec(h, h**2) for h in (2, 4, 8)])
    assert compare_to_bound(fit, 2.5, 0.1, "upper") == "consistent"
    assert compare_to_bound(fit, 1.5, 0.1, "upper") == "inconsistent"
    assert compare_to_bound(fit, 2.0, 0.05, "two-sided") == "consistent"
    assert compare_to_bound(fit, 2.2, 0.05, "two-sided") == "inconsistent"
    with pytest.raises(ValueError):
        compare_to_bound(fit, 2.0, 0.1, "loose")


def test_csv_serialization():
    recs = [_rec(2, 33, params="d=0"), _rec(3, 10**30, params="a,b")]
    text = records_to_csv(recs)
    lines = text.strip().split("\r\n")
    assert lines[0] == "n,h,kind,params,count"
    assert lines[1] == "2,2,det,d=0,33"
    assert lines[2] == '2,3,det,"a,b",1000000000000000000000000000000'
    timed = records_to_csv(recs, include_timing=True)
    assert timed.splitlines()[0].endswith("elapsed_ms")


def test_json_serialization():
    recs = [_rec(2, 33, params="d=0")]
    data = json.loads(records_to_json(recs))
    assert data["records"][0]["count"] == "33"  # decimal string survives
    assert "elapsed_ms" not in data["records"][0]
    timed = json.loads(records_to_json(recs, include_timing=True))
    assert timed["records"][0]["elapsed_ms"] == 1.0


def test_write_outputs_and_manifest(tmp_path):
    spec = ExperimentSpec(kind="det", n=2, grid=(1, 2), params={"d": 0})
    recs = run_grid(spec)
    out = tmp_path / "results.csv"
    mpath = write_outputs(spec, recs, str(out), fmt="csv", elapsed_ms=12.5)
    assert out.exists()
    manifest = json.loads(open(mpath).read())
    assert manifest["spec"]["kind"] == "det"
    assert manifest["spec"]["grid"] == [1, 2]
    assert manifest["records"] == 2
    assert manifest["backend"] in ("numba", "numpy")
    assert manifest["versions"]["matstat"]


def test_outputs_byte_identical_across_threads(tmp_path):
    texts = {}
    for threads in (1, 4):
        spec = ExperimentSpec(
            kind="kbad-census",
            n=3,
            grid=(8, 12),
            params={"K": "sqrt"},
            parts=6,
            threads=threads,
        )
        recs = run_grid(spec)
        texts[threads] = (records_to_csv(recs), records_to_json(recs))
    assert texts[1] == texts[4]
