import io as stdio
import json
import math

import numpy as np
import pytest

from optproj import approximator, cli, io, objective, optimizer
from optproj.objective import DirectionSet


def run(argv):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = cli.main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_direction_file_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    for ds in (optimizer.exact_directions_2d(7), approximator.mc_directions(5, 9, 3),
               objective.with_optimal_scale(rng.normal(size=(4, 3)))):
        path = tmp_path / "d.json"
        io.save_direction_set(ds, path)
        back = io.load_direction_set(path)
        assert back.directions.tobytes() == ds.directions.tobytes()
        assert back.scale == ds.scale and back.kind == ds.kind


def test_direction_file_rejects_bad_input(tmp_path):
    good = io.direction_set_to_dict(optimizer.exact_directions_np(2))
    cases = [
        "{not json",
        json.dumps({**good, "schema_version": 2}),
        json.dumps({**good, "directions": [[1.0, 0.0], [0.0, 1.1]]}),
        json.dumps({**good, "n": 3}),
        json.dumps({k: v for k, v in good.items() if k != "scale"}),
    ]
    for text in cases:
        with pytest.raises(io.FileFormatError):
            io.loads_direction_set(text)


def test_direction_file_accepts_loose_unit_norm():
    doc = io.direction_set_to_dict(optimizer.exact_directions_np(2))
    doc["directions"][0][0] = 1.0 + 5e-10
    assert io.direction_set_from_dict(doc).n == 2


def test_sample_csv(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("a,b\n1,2\n3,4\n\n5,6\n")
    np.testing.assert_array_equal(io.load_sample(path), [[1, 2], [3, 4], [5, 6]])
    path.write_text("1,2\n3\n")
    with pytest.raises(io.FileFormatError, match="line 2"):
        io.load_sample(path)
    path.write_text("1,2\n3,x\n")
    with pytest.raises(io.FileFormatError, match="line 2"):
        io.load_sample(path)
    data = np.random.default_rng(0).normal(size=(5, 3))
    io.save_sample(data, path, header=["x", "y", "z"])
    assert io.load_sample(path).tobytes() == data.tobytes()


def test_parse_int_list():
    assert cli.parse_int_list("8,64") == [8, 64]
    assert cli.parse_int_list("3..5,9") == [3, 4, 5, 9]
    assert cli.parse_int_list("p,8", allow_p=True) == ["p", 8]
    for bad in ("", "5..3", "a", "0"):
        with pytest.raises(cli.UsageError):
            cli.parse_int_list(bad)


def test_optimize_2d(tmp_path):
    out = tmp_path / "d.json"
    code, text, _ = run(["optimize", "--dim", "2", "--num-directions", "3", "--out", str(out)])
    assert code == 0
    doc = json.loads(text)
    assert doc["ratio"] == pytest.approx(0.866025, abs=1e-6)
    u = io.load_direction_set(out).directions
    np.testing.assert_allclose(np.arctan2(u[:, 1], u[:, 0]), [0, math.pi / 3, 2 * math.pi / 3],
                               atol=1e-15)


def test_optimize_identity(tmp_path):
    code, text, _ = run(["optimize", "--dim", "4", "--num-directions", "4"])
    assert code == 0 and json.loads(text)["ratio"] == pytest.approx(0.5, abs=1e-15)


def test_optimize_ascent_deterministic_and_eval_fidelity(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["optimize", "--dim", "3", "--num-directions", "5", "--seed", "7", "--restarts", "2"]
    code1, text1, _ = run(argv + ["--out", str(a)])
    code2, text2, _ = run(argv + ["--out", str(b)])
    assert code1 == code2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert text1.replace(str(a), "") == text2.replace(str(b), "")
    doc = json.loads(text1)
    ratios = doc["trace"]["ratios"]
    assert all(y >= x for x, y in zip(ratios, ratios[1:]))
    code, text, _ = run(["eval", "--directions", str(a)])
    assert code == 0 and json.loads(text)["ratio"] == pytest.approx(doc["ratio"], abs=1e-12)


def test_eval_examples(tmp_path):
    path = tmp_path / "d.json"
    for ds, ratio, wce in [(optimizer.exact_directions_np(3), 1 / math.sqrt(3), None),
                           (DirectionSet([[1.0, 0.0]], 2.0), 0.0, 1.0),
                           (optimizer.exact_directions_2d(4), 0.92388, None)]:
        io.save_direction_set(ds, path)
        code, text, _ = run(["eval", "--directions", str(path)])
        doc = json.loads(text)
        assert code == 0 and doc["ratio"] == pytest.approx(ratio, abs=1e-5)
        if wce is not None:
            assert doc["worst_case_error"] == wce


def test_eval_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2")
    assert run(["eval", "--directions", str(path)])[0] == 2
    assert run(["eval", "--directions", str(tmp_path / "missing.json")])[0] == 2


def test_approx_norm_cmd(tmp_path):
    path = tmp_path / "d.json"
    io.save_direction_set(optimizer.exact_directions_2d(3), path)
    code, text, _ = run(["approx-norm", "--directions", str(path), "--x", "1,0"])
    assert code == 0 and json.loads(text)["estimate"] == pytest.approx(1.071797, abs=1e-6)
    vec = tmp_path / "v.csv"
    vec.write_text("3,4\n0,2\n")
    code, text, _ = run(["approx-norm", "--directions", str(path), "--vectors", str(vec)])
    assert code == 0 and len(json.loads(text)) == 2
    assert run(["approx-norm", "--directions", str(path), "--x", "1,0,0"])[0] == 2


def test_energy_cmd(tmp_path):
    rng = np.random.default_rng(4)
    x, y, z = tmp_path / "x.csv", tmp_path / "y.csv", tmp_path / "z.csv"
    io.save_sample(rng.normal(size=(40, 2)), x)
    io.save_sample(rng.normal(size=(30, 2)) + 1, y)
    io.save_sample(rng.normal(size=(30, 3)), z)
    for method in ("exact", "projected", "mc"):
        code, text, _ = run(["energy", "--x", str(x), "--y", str(x), "--method", method])
        doc = json.loads(text)
        assert code == 0 and abs(doc["statistic"]) <= 1e-10 and doc["elapsed_ms"] >= 0
    assert run(["energy", "--x", str(x), "--y", str(z)])[0] == 2
    u1, u2 = tmp_path / "u1.csv", tmp_path / "u2.csv"
    io.save_sample(rng.normal(size=(50, 1)), u1)
    io.save_sample(rng.normal(size=(60, 1)), u2)
    ex = json.loads(run(["energy", "--x", str(u1), "--y", str(u2), "--method", "exact"])[1])
    pr = json.loads(run(["energy", "--x", str(u1), "--y", str(u2), "--method", "projected"])[1])
    assert pr["statistic"] == pytest.approx(ex["statistic"], abs=1e-12)


def test_bench_cmd(tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(["bench", "mse", "--dim", "2", "--schemes", "optimal-2d,monte-carlo",
                      "--num-directions-list", "8,64", "--trials", "20",
                      "--test-vectors", "500", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scheme,p,n,trials,test_vectors,mse,seed"
    rows = [l.split(",") for l in lines[1:]]
    mse = {(r[0], int(r[2])): float(r[5]) for r in rows}
    for n in (8, 64):
        assert mse[("optimal-2d", n)] < mse[("monte-carlo", n)]
    code, text, _ = run(["bench", "mse", "--dim", "3..4", "--num-directions-list", "p",
                         "--schemes", "orthonormal", "--paper-protocol"])
    assert code == 0 and text.count("orthonormal,") == 2 and ",100," in text


def test_bench_invalid_pairing():
    code, _, err = run(["bench", "mse", "--dim", "3", "--num-directions-list", "8",
                        "--schemes", "optimal-2d"])
    assert code == 2 and "p = 2" in err
    code, text, _ = run(["bench", "mse", "--dim", "3", "--num-directions-list", "8",
                         "--schemes", "optimal-2d", "--skip-invalid"])
    assert code == 0 and text.strip() == "scheme,p,n,trials,test_vectors,mse,seed"
    assert run(["bench", "mse", "--dim", "2", "--num-directions-list", "8",
                "--schemes", "bogus"])[0] == 2


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["optimize", "--dim", "x", "--num-directions", "3"])[0] == 2
    assert run(["optimize", "--dim", "3", "--num-directions", "2"])[0] == 2
    assert run(["optimize", "--dim", "2", "--num-directions", "3", "--seed", "-1"])[0] == 2


def test_numeric_failure_exit_code(tmp_path):
    ds = approximator.mc_directions(3, 30, 0)
    path = tmp_path / "big.json"
    io.save_direction_set(ds, path)
    assert run(["eval", "--directions", str(path)])[0] == 3
