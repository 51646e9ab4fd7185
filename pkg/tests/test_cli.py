import json
import random
import subprocess
import sys
from fractions import Fraction as F

import pytest

from tverberg.cli import main
from tverberg.config import PerturbationMove, PointId, apply_move, build_configuration
from tverberg.hulls import IntersectionCertificate, verify_certificate
from tverberg.partitions import Partition


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def load(path):
    return json.loads(open(path).read())


def no_floats(node):
    if isinstance(node, float):
        return False
    if isinstance(node, dict):
        return all(no_floats(v) for v in node.values())
    if isinstance(node, list):
        return all(no_floats(v) for v in node)
    return True


@pytest.fixture
def crooked_file(tmp_path):
    cfg = build_configuration(2, 3)
    cfg = apply_move(cfg, PerturbationMove(PointId(0, 2), (F(-1), F(0)), F(2)))
    return write(tmp_path / "crooked.json", cfg.to_json())


def test_construct(tmp_path):
    out = tmp_path / "x.json"
    assert main(["construct", "--d", "3", "--r", "4", "-o", str(out)]) == 0
    data = load(out)
    assert data["d"] == 3 and len(data["heights"]) == 4
    assert sum(len(h) for h in data["heights"]) == 12
    assert main(["construct", "--d", "5", "--r", "3", "-o", str(out)]) == 0
    assert sum(len(h) for h in load(out)["heights"]) == 12
    assert main(["construct", "--d", "0", "--r", "2"]) == 2
    assert main(["construct", "--r", "2"]) == 2


def test_construct_with_heights_and_seed(tmp_path, monkeypatch):
    heights = write(tmp_path / "h.json", [["5/2", "1"], ["3", "2"], ["2", "1/3"]])
    out = tmp_path / "x.json"
    assert main(["construct", "--d", "2", "--r", "3", "--heights", heights, "-o", str(out)]) == 0
    assert load(out)["heights"][0] == ["5/2", "1"]
    bad = write(tmp_path / "bad.json", [["1", "2"], ["3", "2"], ["2", "1"]])
    assert main(["construct", "--d", "2", "--r", "3", "--heights", bad]) == 2
    monkeypatch.setenv("TVERBERG_SEED", "17")
    assert main(["construct", "--d", "2", "--r", "3", "--generic", "-o", str(out)]) == 0
    first = load(out)
    assert first["seed"] == 17
    assert main(["construct", "--d", "2", "--r", "3", "--generic", "--seed", "17",
                 "-o", str(out)]) == 0
    assert load(out) == first
    monkeypatch.setenv("TVERBERG_SEED", "x")
    assert main(["construct", "--d", "2", "--r", "3", "--generic"]) == 2


def test_perturb_recipe_mismatch(tmp_path):
    cfg = write(tmp_path / "x.json", build_configuration(5, 3).to_json())
    assert main(["perturb", "--recipe", "342", cfg]) == 2
    assert main(["perturb", "--recipe", "999", cfg]) == 2


def test_verify_counterexample(tmp_path, crooked_file):
    out = tmp_path / "r.json"
    assert main(["verify", crooked_file, "--k", "2", "-o", str(out)]) == 1
    rep = load(out)
    assert rep["bad"] == 1 and no_floats(rep)
    cfg = build_configuration(2, 3)
    cfg = apply_move(cfg, PerturbationMove(PointId(0, 2), (F(-1), F(0)), F(2)))
    for w in rep["bad_witnesses"]:
        masks = Partition.parse(w["partition"]).masks()
        for entry in w["tuples"]:
            sets = [[cfg.points[i] for i in range(6) if masks[j] >> i & 1] for j in entry["tuple"]]
            assert verify_certificate(sets, IntersectionCertificate.from_json(entry["certificate"]))
    m = rep["manifest"]
    assert m["command"] == "verify" and m["inputs"]["crooked.json"]
    assert m["version"] and m["started"] and m["shard"] == "0/1"


def test_verify_clean_configuration(tmp_path):
    cfg = write(tmp_path / "x.json", build_configuration(2, 3).to_json())
    out = tmp_path / "r.json"
    assert main(["verify", cfg, "--k", "2", "-o", str(out)]) == 0
    rep = load(out)
    assert rep["bad"] == 0 and rep["bad_witnesses"] == [] and rep["total"] == 90


def test_verify_usage_errors(tmp_path, crooked_file):
    assert main(["verify", crooked_file, "--k", "4"]) == 2
    assert main(["verify", crooked_file, "--k", "2", "--shard", "3/3"]) == 2
    assert main(["verify", crooked_file, "--k", "2", "--shard", "x"]) == 2
    assert main(["verify", crooked_file, "--k", "2", "--jobs", "0"]) == 2
    assert main(["verify", str(tmp_path / "missing.json"), "--k", "2"]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["verify", str(junk), "--k", "2"]) == 2
    assert main(["verify", crooked_file, "--k", "2", "-o", str(tmp_path / "no" / "r.json")]) == 2


def test_reports_identical_across_jobs(tmp_path, crooked_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", crooked_file, "--k", "2", "--reproducible", "-o", str(a)]) == 1
    assert main(["verify", crooked_file, "--k", "2", "--jobs", "3", "--reproducible",
                 "-o", str(b)]) == 1
    assert a.read_bytes() == b.read_bytes()


def test_shards_merge_to_full_report(tmp_path, crooked_file):
    paths = []
    for i in range(3):
        p = tmp_path / f"s{i}.json"
        main(["verify", crooked_file, "--k", "2", "--shard", f"{i}/3", "--reproducible",
              "-o", str(p)])
        paths.append(str(p))
    merged, full = tmp_path / "m.json", tmp_path / "f.json"
    assert main(["report-merge", *paths, "--reproducible", "-o", str(merged)]) == 1
    main(["verify", crooked_file, "--k", "2", "--reproducible", "-o", str(full)])
    m, f = load(merged), load(full)
    m.pop("manifest"), f.pop("manifest")
    assert m == f
    assert main(["report-merge", paths[0], paths[1]]) == 2


def test_merge_refuses_other_configuration(tmp_path, crooked_file):
    other = write(tmp_path / "o.json", build_configuration(2, 3).to_json())
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", crooked_file, "--k", "2", "--shard", "0/2", "-o", str(a)])
    main(["verify", other, "--k", "2", "--shard", "1/2", "-o", str(b)])
    assert main(["report-merge", str(a), str(b)]) == 2
    assert main(["report-merge", str(tmp_path / "crooked.json")]) == 2


def test_search(tmp_path):
    rng = random.Random(0)
    pts = [[f"{rng.randint(-50, 50)}/{rng.randint(1, 5)}" for _ in range(3)] for _ in range(13)]
    cloud = write(tmp_path / "c.json", {"d": 3, "points": pts})
    out = tmp_path / "s.json"
    assert main(["search", cloud, "--r", "4", "-o", str(out)]) == 0
    res = load(out)
    assert res["verdict"] == "found" and len(res["parts"]) == 4 and no_floats(res)
    tri = write(tmp_path / "t.json", {"d": 2, "points": [[0, 0], [1, 0], [0, 1]]})
    assert main(["search", tri, "--r", "2", "-o", str(out)]) == 1
    assert load(out)["verdict"] == "none"
    cfg = write(tmp_path / "x.json", build_configuration(2, 3).to_json())
    assert main(["search", cfg, "--r", "3", "--k", "2", "-o", str(out)]) == 1
    assert main(["search", cfg, "--r", "3", "--k", "4"]) == 2
    bad = write(tmp_path / "b.json", {"d": 2, "points": [[0.5, 1]]})
    assert main(["search", bad, "--r", "2"]) == 2


def test_weights(tmp_path):
    cfg = write(tmp_path / "x.json", build_configuration(2, 3).to_json())
    out = tmp_path / "w.json"
    assert main(["weights", cfg, "--k", "2", "-o", str(out)]) == 0
    rep = load(out)
    assert rep["partitions_checked"] == rep["partitions_total"] == 90
    assert rep["buba_violations"] == [] and rep["baba_violations"] == []
    assert [line["ray"] for line in rep["baba_rays"]] == [0, 1, 2]
    assert all(line["max_total"] <= line["bound"] == 1 for line in rep["baba_rays"])
    assert main(["weights", cfg, "--k", "2", "--sample", "0", "-o", str(out)]) == 0
    empty = load(out)
    assert empty["partitions_checked"] == 0 and empty["baba_rays"] == []
    assert main(["weights", cfg, "--k", "2", "--sample", "10", "-o", str(out)]) == 0
    assert load(out)["partitions_checked"] == 10
    assert main(["weights", cfg, "--k", "2", "--sample", "-1"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tverberg", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "tverberg", "frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
