import json
import math

import numpy as np
import pytest
from conftest import WORKED_ATOMS, random_measure

from tcmp.analysis import CubicParams, harmonic_cubic_zeros
from tcmp.cli import dump_measure, dump_moments, main, parse_moments
from tcmp.polynomials import ZBAR, Z
from tcmp.rdis import InitialBlock, MomentTable, Rdis
from tcmp.solver import AtomicMeasure, ColumnRelation

WORKED_RELATION = {"k": 2, "coefficients": [
    {"n": 0, "m": 2, "re": 1, "im": 0},
    {"n": 0, "m": 1, "re": -3, "im": 0},
    {"n": 0, "m": 0, "re": -5, "im": 0},
]}


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out)


def entry(doc, i, j):
    (e,) = [e for e in doc["entries"] if (e["i"], e["j"]) == (i, j)]
    return complex(e["re"], e["im"])


def seven_atoms():
    zs = harmonic_cubic_zeros(CubicParams(-3, 2))
    return AtomicMeasure(zs.points, (1 / 7,) * 7)


@pytest.fixture
def worked_file(tmp_path, capsys):
    mfile = write(tmp_path / "mu.json", dump_measure(AtomicMeasure.from_pairs(WORKED_ATOMS)))
    out = tmp_path / "moments.json"
    assert main(["generate", "-i", mfile, "--degree", "6", "-o", str(out)]) == 0
    return out


def test_generate_worked(worked_file):
    doc = json.loads(worked_file.read_text())
    assert doc["degree"] == 6
    assert entry(doc, 1, 1) == pytest.approx(3)
    assert entry(doc, 2, 2) == pytest.approx(13)
    assert len(doc["entries"]) == 16


def test_generate_point_mass(tmp_path, capsys):
    f = write(tmp_path / "d.json", {"atoms": [{"re": 0, "im": 0, "weight": 1}]})
    code, out = run(capsys, "generate", "-i", f, "--degree", 4)
    doc = json.loads(out)
    assert code == 0
    assert entry(doc, 0, 0) == 1
    assert all(complex(e["re"], e["im"]) == 0 for e in doc["entries"] if (e["i"], e["j"]) != (0, 0))


def test_generate_symmetric_measure(tmp_path, capsys):
    f = write(tmp_path / "m.json", dump_measure(seven_atoms()))
    _, out = run(capsys, "generate", "-i", f, "--degree", 6)
    assert abs(entry(json.loads(out), 0, 1)) < 1e-15


def test_solve_worked(worked_file, capsys):
    doc = json.loads(worked_file.read_text())
    doc["relation"] = WORKED_RELATION
    f = write(worked_file, doc)
    code, rep = run_json(capsys, "solve", "-i", f)
    assert code == 0 and rep["status"] == "Solved"
    assert len(rep["measure"]["atoms"]) == 3
    code, out = run(capsys, "solve", "-i", f)
    assert code == 0 and "status: Solved" in out and "measure (3 atoms)" in out


def test_solve_worked_raw_perturbation(worked_file, capsys):
    # bumping one stored entry breaks the column relation in M(3) itself
    doc = json.loads(worked_file.read_text())
    doc["relation"] = WORKED_RELATION
    for e in doc["entries"]:
        if (e["i"], e["j"]) == (2, 2):
            e["re"] += 1
    code, _ = run(capsys, "solve", "-i", write(worked_file, doc))
    assert code == 5


def test_solve_consistent_perturbation(tmp_path, capsys):
    # the same bump applied to the initial block of a recursively extended table
    entries = InitialBlock.from_source(2, AtomicMeasure.from_pairs(WORKED_ATOMS)).entries()
    entries[(2, 2)] += 1
    P = Z**3 - Z**2 + 3 * Z + 5
    table = Rdis.from_entries(entries, P).table(6)
    rel = ColumnRelation(2, {(0, 2): 1, (0, 1): -3, (0, 0): -5})
    f = write(tmp_path / "p.json", dump_moments(table, rel))
    code, rep = run_json(capsys, "solve", "-i", f)
    assert code == 3 and rep["status"] == "Infeasible"
    assert rep["failed_test"]["name"] == "psd"


def test_solve_point_mass(tmp_path, capsys):
    doc = dump_moments(MomentTable(2, {(0, 0): 1, (0, 1): 0, (0, 2): 0, (1, 1): 0}))
    doc["relation"] = {"k": 0, "coefficients": []}
    code, rep = run_json(capsys, "solve", "-i", write(tmp_path / "d.json", doc))
    assert code == 0 and len(rep["measure"]["atoms"]) == 1


def test_roots(capsys):
    code, rep = run_json(capsys, "roots", "--t", 2, "--u", -1.25)
    assert code == 0 and rep["count"] == 3
    r = math.sqrt(13) / 2 * np.exp(0.25j * np.pi)
    got = [complex(p["re"], p["im"]) for p in rep["roots"]]
    for z in (0, r, -r):
        assert min(abs(g - z) for g in got) < 1e-9
    _, rep = run_json(capsys, "roots", "--t", -2, "--u", 1.25)
    assert rep["count"] == 7
    _, rep = run_json(capsys, "roots", "--a", 0, "--b", 0)
    assert rep["count"] == 1 and rep["roots"] == [{"re": 0.0, "im": 0.0}]


def test_check(tmp_path, capsys):
    mu = seven_atoms()
    good = write(tmp_path / "g.json", dump_moments(mu.table(6)))
    code, rep = run_json(capsys, "check", "-i", good, "--a", -3, "--b", 2)
    assert code == 0 and rep["verdict"] == "pass"
    bad = write(tmp_path / "b.json", dump_moments(mu.table(6).replace(2, 2, mu.moment(2, 2) + 1)))
    code, rep = run_json(capsys, "check", "-i", bad, "--a", -3, "--b", 2)
    assert code == 3 and rep["verdict"] == "fail"
    failed = [e for e in rep["equalities"] if not e["ok"]]
    assert len(failed) == 1 and failed[0]["residual"] == pytest.approx(1)
    short = write(tmp_path / "s.json", dump_moments(mu.table(4)))
    code, _ = run(capsys, "check", "-i", short, "--a", -3, "--b", 2)
    assert code == 2


def test_build_matrix(worked_file, capsys):
    code, rep = run_json(capsys, "build-matrix", "-i", worked_file, "--degree", 1)
    M = np.array(rep["re"]) + 1j * np.array(rep["im"])
    assert code == 0 and rep["basis"] == ["1", "z", "zb"]
    assert np.allclose(M, [[1, 0, 0], [0, 3, -1], [0, -1, 3]])
    assert rep["psd"]["is_psd"]


def test_xi(capsys):
    code, rep = run_json(capsys, "xi", "--h", "zb*z^2 - zb^2*z - 2*z + 2*zb", "--r", 3)
    assert code == 0 and rep["alpha_c"] == 1 and rep["xi"] == 3


def test_load_save_lossless():
    rng = np.random.default_rng(5)
    vals = rng.normal(size=40) * 10.0 ** rng.integers(-12, 12, size=40)
    upper = {}
    k = 0
    for d in range(7):
        for i in range(d // 2 + 1):
            upper[(i, d - i)] = complex(vals[k], 0 if i == d - i else vals[k + 1])
            k += 2
    upper[(0, 0)] = abs(upper[(0, 0)]) + 1
    table = MomentTable(6, upper)
    rel = ColumnRelation(2, {(0, 1): complex(vals[0], vals[1])})
    text = json.dumps(dump_moments(table, rel))
    back, rel2 = parse_moments(json.loads(text))
    assert back.upper == table.upper
    assert rel2.coefficients == rel.coefficients


def test_generate_solve_round_trip(tmp_path, capsys):
    rng = np.random.default_rng(77)
    for n in range(50):
        mu = random_measure(rng)
        mfile = write(tmp_path / f"m{n}.json", dump_measure(mu))
        code, out = run(capsys, "generate", "-i", mfile, "--degree", 2 * len(mu))
        assert code == 0
        code, rep = run_json(capsys, "solve", "-i", write(tmp_path / f"g{n}.json", json.loads(out)))
        assert code == 0, rep
        assert len(rep["measure"]["atoms"]) == len(mu)


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"degree": 2},
        {"degree": 1, "entries": [{"i": 0, "j": 0, "re": 1, "im": 0}]},
        {"degree": 0, "entries": [{"i": 0, "j": 0, "re": -1, "im": 0}]},
        {"degree": 0, "entries": [{"i": 0, "j": 0, "re": "x", "im": 0}]},
        {"degree": 2, "entries": [
            {"i": 0, "j": 0, "re": 1, "im": 0}, {"i": 0, "j": 1, "re": 1, "im": 1},
            {"i": 1, "j": 0, "re": 1, "im": 1}, {"i": 0, "j": 2, "re": 0, "im": 0},
            {"i": 1, "j": 1, "re": 2, "im": 0}]},
    ],
)
def test_malformed_moments(tmp_path, capsys, doc):
    code, _ = run(capsys, "solve", "-i", write(tmp_path / "x.json", doc))
    assert code == 2


def test_malformed_measure_and_args(tmp_path, capsys):
    f = write(tmp_path / "m.json", {"atoms": [{"re": 0, "im": 0, "weight": -1}]})
    assert run(capsys, "generate", "-i", f, "--degree", 2)[0] == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run(capsys, "generate", "-i", tmp_path / "junk.json", "--degree", 2)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 2
