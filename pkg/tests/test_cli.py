"""End-to-end CLI invocations through main()."""

import json

import pytest

from matstat.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_count_det(capsys):
    rc, out, err = run(capsys, "count", "det", "--n", "2", "--H", "1", "--d", "0")
    assert rc == 0
    assert "det-count = 33" in out
    assert '"manifest"' in err


def test_count_charpoly(capsys):
    rc, out, _ = run(
        capsys, "count", "charpoly", "--n", "2", "--H", "1", "--f", "1,-2,1"
    )
    assert rc == 0
    assert "charpoly-count = 5" in out


def test_count_charpoly_rejects_nonmonic(capsys):
    with pytest.raises(SystemExit):
        run(capsys, "count", "charpoly", "--n", "2", "--H", "1", "--f", "1,-2,3")


def test_count_universe_json(capsys):
    rc, out, _ = run(
        capsys, "count", "universe", "--n", "2", "--H", "2", "--format", "json"
    )
    assert rc == 0
    assert json.loads(out.strip())["count"] == "625"


def test_count_dettrace_and_bordered(capsys):
    rc, out, _ = run(
        capsys, "count", "dettrace", "--n", "3", "--H", "1", "--d", "0", "--t", "0"
    )
    assert rc == 0 and "= 2223" in out
    rc, out, _ = run(capsys, "count", "bordered", "--n", "2", "--K", "2")
    assert rc == 0 and "bordered-u = 20" in out and "bordered-v = 20" in out


def test_count_centralizer_with_matrix_file(tmp_path, capsys):
    mfile = tmp_path / "m.json"
    mfile.write_text(json.dumps({"matrix": [[1, 1], [0, 1]]}))
    rc, out, _ = run(
        capsys, "count", "centralizer", "--matrix", str(mfile), "--H", "3"
    )
    assert rc == 0
    assert "centralizer-count = 49" in out


def test_multdep_check_and_rank(tmp_path, capsys):
    tfile = tmp_path / "pair.json"
    tfile.write_text(
        json.dumps({"matrices": [[[1, 1], [0, 1]], [[1, 2], [0, 1]]]})
    )
    rc, out, _ = run(
        capsys, "multdep", "check", "--tuple", str(tfile), "--bound", "4"
    )
    assert rc == 0
    assert "dependent = True" in out
    assert "witness =" in out
    rc, out, _ = run(
        capsys, "multdep", "check", "--tuple", str(tfile), "--k", "2,-1"
    )
    assert rc == 0 and "relation holds = True" in out
    rc, out, _ = run(
        capsys, "multdep", "check", "--tuple", str(tfile), "--k", "1,1"
    )
    assert rc == 1 and "relation holds = False" in out
    rc, out, _ = run(capsys, "multdep", "rank", "--tuple", str(tfile), "--bound", "4")
    assert rc == 0 and "rank = 1" in out


def test_multdep_word(tmp_path, capsys):
    tfile = tmp_path / "rot.json"
    tfile.write_text(json.dumps({"matrices": [[[0, -1], [1, 0]]]}))
    rc, out, _ = run(capsys, "multdep", "word", "--tuple", str(tfile), "--max-len", "4")
    assert rc == 0
    assert "A1^+1 A1^+1 A1^+1 A1^+1" in out


def test_multdep_construct_torsion(tmp_path, capsys):
    out_file = tmp_path / "torsion.json"
    rc, out, err = run(
        capsys, "multdep", "construct", "--mode", "torsion", "--orders", "3,4",
        "--out", str(out_file),
    )
    assert rc == 0
    data = json.loads(out_file.read_text())
    assert len(data["matrices"]) == 1
    assert len(data["matrices"][0]) == 4
    assert "identity exponent = 12" in err


def test_multdep_construct_even(tmp_path, capsys):
    blocks = tmp_path / "blocks.json"
    blocks.write_text(
        json.dumps(
            {"matrices": [[[1, 1], [0, 1]], [[1, 0], [1, 1]],
                          [[1, -1], [0, 1]], [[1, 0], [-1, 1]]]}
        )
    )
    rc, out, err = run(
        capsys, "multdep", "construct", "--mode", "even", "--blocks", str(blocks)
    )
    assert rc == 0
    built = json.loads(out.strip())
    assert len(built["matrices"]) == 4
    assert "relation = 1,-1,1,-1" in err


def test_lattice_dual_and_good(capsys):
    rc, out, _ = run(capsys, "lattice", "dual", "--vector", "1,0,5")
    assert rc == 0
    assert "gram det = 26" in out
    assert "volume identity holds = True" in out
    rc, out, _ = run(capsys, "lattice", "good", "--vector", "1,0,5", "--K", "4")
    assert rc == 0
    assert "verdict = bad" in out
    assert "minima squared = 1,26" in out


def test_lattice_census_json(capsys):
    rc, out, _ = run(
        capsys, "lattice", "census", "--t", "3", "--U", "6", "--K", "2",
        "--format", "json",
    )
    assert rc == 0
    data = json.loads(out.strip())
    assert data["count"] == "720"
    assert data["method"].startswith("kernel-")


def test_totient_and_nt(capsys):
    rc, out, _ = run(capsys, "totient", "v", "--n", "5")
    assert rc == 0 and "v(5) = 4" in out
    rc, out, _ = run(capsys, "totient", "w", "--n", "10")
    assert rc == 0 and "w(10) = 100" in out
    rc, out, _ = run(capsys, "nt", "smoothcount", "--Q", "6", "--U", "10")
    assert rc == 0 and "count = 7" in out
    rc, out, _ = run(capsys, "nt", "cyclotomic", "--k", "6")
    assert rc == 0 and "X^2-X+1" in out


def test_fit_writes_outputs(tmp_path, capsys):
    out_file = tmp_path / "fit.csv"
    rc, out, err = run(
        capsys, "fit", "--kind", "det", "--n", "2", "--grid", "2,4,8",
        "--d", "0", "--predicted", "3.0", "--tol", "1.0",
        "--out", str(out_file), "--parts", "2",
    )
    assert rc == 0
    assert out_file.exists()
    assert (tmp_path / "fit.csv.manifest.json").exists()
    assert "slope =" in err
    assert "verdict = consistent" in err
    header = out_file.read_text().splitlines()[0]
    assert header == "n,h,kind,params,count"


def test_fit_stdout_json(capsys):
    rc, out, err = run(
        capsys, "fit", "--kind", "totient-v", "--n", "1", "--grid", "10,100",
        "--format", "json",
    )
    assert rc == 0
    data = json.loads(out[: out.rindex("}") + 1])
    assert [r["count"] for r in data["records"]] == ["10", "100"]


def test_error_exit_code(capsys):
    rc, out, err = run(capsys, "count", "det", "--n", "0", "--H", "1")
    assert rc == 1
    assert "error:" in err
    rc, out, err = run(
        capsys, "count", "centralizer", "--matrix", "/nonexistent.json", "--H", "1"
    )
    assert rc == 1 and "error:" in err
