import json

import pytest

from helperdmc import cli, repro
from helperdmc.repro import ReproRow


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ex1_path(tmp_path, capsys):
    path = tmp_path / "ex1.json"
    assert run(["examples", "export", "--which", "1", "--out", path], capsys)[0] == 0
    return path


@pytest.fixture
def bungi_dir(tmp_path, capsys):
    out = tmp_path / "bungi"
    assert run(["examples", "export", "--which", "bungi", "--eta", "1", "--out", out], capsys)[0] == 0
    return out


def test_capacity_mc(ex1_path, capsys, tmp_path):
    code, out, _ = run(["capacity", ex1_path, "--mode", "mc", "--t-size", "2", "--out", tmp_path / "c.csv"], capsys)
    assert code == 0 and out == "2.000000000\n"
    assert (tmp_path / "c.csv").read_text().startswith("mode,capacity_bits,final_gap,iterations\nmc,2.000000000,")


def test_capacity_modes(ex1_path, capsys):
    got = {m: run(["capacity", ex1_path, "--mode", m], capsys)[1].strip() for m in cli.MODES}
    assert got["sbs"] == "1.584962500"
    assert got["no-csi"] == "1.000000000"


def test_validate(ex1_path, tmp_path, capsys):
    code, out, _ = run(["validate", ex1_path], capsys)
    assert code == 0 and out.startswith("ok |X|=4")
    doc = json.loads(ex1_path.read_text())
    doc["w"][1][2][0] += 0.1
    bad = tmp_path / "broken.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(["validate", bad], capsys)
    assert code == 1 and "w[1][2]" in err and "sums to" in err
    assert run(["validate", tmp_path / "missing.json"], capsys)[0] == 1


def test_unknown_flag_is_rejected(ex1_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["capacity", str(ex1_path), "--mode", "mc", "--bogus"])
    assert exc.value.code != 0


def test_help_to_both(capsys, tmp_path):
    path = tmp_path / "ex3.json"
    run(["examples", "export", "--which", "3", "--out", path], capsys)
    assert run(["help-to-both", path, "--helper", "0,1,1,1"], capsys)[1] == "0.483458593\n"
    assert run(["help-to-both", path, "--helper", "0->0,1->0,2->1,3->1"], capsys)[1] == "0.500000000\n"
    assert run(["help-to-both", path, "--helper", "0,1"], capsys)[0] == 1


def test_bm_rate_and_sim(bungi_dir, capsys, tmp_path):
    code, out, _ = run(["bm-rate", bungi_dir / "bmspec.json"], capsys)
    assert code == 0 and "rate 1.000000000" in out
    argv = ["bm-sim", bungi_dir / "bmspec.json", "--n", "8", "--seed", "0", "1", "--trials", "10", "--eps", "3"]
    code, first, _ = run(argv + ["--out", tmp_path / "a.csv"], capsys)
    assert code == 0 and len(first.splitlines()) == 3
    assert run(argv + ["--threads", "3"], capsys)[1] == first
    assert (tmp_path / "a.csv").read_text() == first


def test_search_cap_exit_code(bungi_dir, capsys):
    code, _, err = run(["bm-sim", bungi_dir / "bmspec.json", "--n", "16", "--trials", "1"], capsys)
    assert code == 2 and "cap" in err


def test_config_precedence(bungi_dir, tmp_path, capsys, monkeypatch):
    argv = ["bm-sim", bungi_dir / "bmspec.json", "--n", "8", "--eps", "3"]
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"trials": 3, "eps": 0.01}))
    monkeypatch.setenv("HELPERDMC_CONFIG", str(conf))
    out = run(argv, capsys)[1]
    assert out.splitlines()[1].split(",")[2] == "3"  # trials from the file
    out = run(argv + ["--trials", "2"], capsys)[1]
    assert out.splitlines()[1].split(",")[2] == "2"  # the flag wins
    conf.write_text(json.dumps({"trails": 3}))
    assert run(argv, capsys)[0] == 1


def test_ex2_sim_and_duality(capsys):
    code, out, _ = run(["ex2-sim", "--eta", "4", "--n", "1000", "--seed", "1", "2"], capsys)
    assert code == 0 and out.splitlines()[1] == "4,1000,1,0,3.996000000"
    assert run(["duality", "--eta", "12"], capsys)[1] == "11.415281640\n"
    code, out, _ = run(["duality", "--eta", "2", "--exact"], capsys)
    assert code == 0 and len(out.splitlines()) == 65
    assert run(["duality", "--eta", "2", "--delta", "0.7"], capsys)[0] == 1


def test_repro_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(repro, "SECTIONS", (lambda: [ReproRow("X", 1.0, 2.0, 0.1, "fail")],))
    code, out, _ = run(["repro"], capsys)
    assert code == 3 and out.splitlines()[1].endswith(",fail")
