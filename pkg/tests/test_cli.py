import json

import pandas as pd
import pytest

from lonsim.cli import main
from lonsim.pipeline import artifact_digests, load_config, run_all

SMALL = {
    "problems": [
        {"kind": "npp", "dimensions": [6, 8, 10], "instances": 3},
        {"kind": "kp", "dimensions": [6, 8], "instances": 2},
    ],
    "sampler": {"n_iter": 30, "max_nimpr": 20, "basin_samples": 300},
    "sa": {"budget": 100, "n_runs": 10},
}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({**SMALL, "output": str(tmp_path / "out")}))
    return path


def run(*args):
    return main([*args, "-q"])


def test_generate_writes_one_file_per_instance(config, tmp_path):
    cfg = json.loads(config.read_text())
    cfg["problems"] = [{"kind": "npp", "dimensions": [8, 10], "instances": 3}]
    config.write_text(json.dumps(cfg))
    assert run("generate", "--config", str(config)) == 0
    files = sorted((tmp_path / "out" / "instances").rglob("*.json"))
    assert len(files) == 6
    first = [f.read_bytes() for f in files]
    assert run("generate", "--config", str(config)) == 0
    assert [f.read_bytes() for f in files] == first


def test_config_errors_exit_2(tmp_path, config):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problems": [{"kind": "tsp", "dimensions": [8], "instances": 1}]}))
    assert run("generate", "--config", str(bad)) == 2
    bad.write_text("{nope")
    assert run("generate", "--config", str(bad)) == 2
    assert run("generate", "--config", str(tmp_path / "missing.json")) == 2
    bad.write_text(json.dumps({"sampler": {"n_iter": 0}}))
    assert run("sample", "--config", str(bad)) == 2
    with pytest.raises(SystemExit):
        main(["generate", "--jobs", "0"])


def test_missing_upstream_exits_3(config, capsys):
    assert run("sim", "--config", str(config)) == 3
    assert "embed" in capsys.readouterr().err
    assert run("sample", "--config", str(config)) == 3


def test_full_pipeline_and_resume(config, tmp_path):
    out = tmp_path / "out"
    assert run("all", "--config", str(config)) == 0
    first = artifact_digests(out)
    ids = pd.read_csv(out / "embed" / "footprints.csv")["id"].tolist()
    assert len(ids) == 3 * 3 + 2 * 2
    sim = pd.read_csv(out / "sim" / "similarity.csv")
    assert list(sim.columns[1:]) == ids and sim["id"].tolist() == ids
    assert len(list((out / "lons").glob("*.json"))) == 3 * len(ids)
    perf = pd.read_csv(out / "eval" / "performance.csv")
    assert set(perf["provenance"]) == {"EXHAUSTIVE"} and len(perf) == 9
    manifest = json.loads((out / "report" / "manifest.json").read_text())
    assert manifest["digests"] == {k: v for k, v in first.items() if k != "report/manifest.json"}
    # resume from the middle: rerunning later stages reproduces every file
    for stage in ("features", "embed", "sim", "eval", "report"):
        assert run(stage, "--config", str(config)) == 0
    assert artifact_digests(out) == first


def test_seed_and_out_override(config, tmp_path):
    assert run("generate", "--config", str(config), "--seed", "7", "--out", str(tmp_path / "o7")) == 0
    assert run("generate", "--config", str(config), "--seed", "8", "--out", str(tmp_path / "o8")) == 0
    a = (tmp_path / "o7" / "instances" / "npp" / "6" / "0.json").read_text()
    b = (tmp_path / "o8" / "instances" / "npp" / "6" / "0.json").read_text()
    assert a != b


def test_verify_passes(config, capsys):
    assert run("verify", "--config", str(config)) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(l.startswith("PASS") for l in lines)


def test_parallel_run_matches_serial(tmp_path):
    a = load_config(None, {**SMALL, "output": str(tmp_path / "a")})
    b = load_config(None, {**SMALL, "output": str(tmp_path / "b")})
    run_all(a, jobs=1)
    run_all(b, jobs=3)
    assert artifact_digests(tmp_path / "a") == artifact_digests(tmp_path / "b")
