import csv
import json

import pytest

from hyperbp import cli
from hyperbp.config import ConfigError, RunConfig, from_dict, load, validate


def write(tmp_path, text):
    p = tmp_path / "run.toml"
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def test_defaults():
    cfg = validate(RunConfig())
    assert (cfg.n, cfg.k, cfg.body.section_dim) == (3, 1, 2)
    assert cfg.body.lam == 0.02
    assert load(None).to_dict() == cfg.to_dict()


def test_toml_round_trip(tmp_path):
    cfg = load(write(tmp_path, '[body]\nn = 5\nsection_dim = 3\nlambda = 0.05\n[certify]\nseed = 11\n'))
    assert (cfg.n, cfg.k, cfg.body.lam, cfg.certify.seed) == (5, 2, 0.05, 11)


@pytest.mark.parametrize("data,msg", [
    ({"body": {"colour": 1}}, "unknown key"),
    ({"bodies": {}}, "unknown table"),
    ({"body": {"n": 3, "k": 2}}, "1 <= k <= n-2"),
    ({"body": {"n": 5, "k": 1, "section_dim": 3}}, "disagree"),
    ({"body": {"lambda": 0.9}}, "lambda"),
    ({"body": {"n": 2}}, "n must be"),
    ({"perturb": {"max_degree": 15}}, "even"),
    ({"certify": {"seed": -1}}, "seed"),
])
def test_invalid_configs(data, msg):
    with pytest.raises(ConfigError, match=msg):
        from_dict(data)


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load(str(tmp_path / "missing.toml"))
    with pytest.raises(ConfigError):
        load(write(tmp_path, "[body\n"))


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_invalid_k_exits_3(tmp_path):
    assert cli.main(["scan", "--n", "3", "--k", "2", "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    path = write(tmp_path, "[body]\nunknown = 1\n")
    assert cli.main(["construct", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_ball_scan(tmp_path):
    out = tmp_path / "scan"
    code = cli.main(["scan", "--body", "ball", "--n", "4", "--k", "2", "--out", str(out)])
    assert code == cli.EXIT_OK
    doc = json.loads((out / "scan.json").read_text())
    assert doc["ft_profile"]["min_value"] > 0
    assert doc["config"]["body"]["section_dim"] == 2
    assert "metadata" in doc and "elapsed_seconds" in doc["metadata"]
    with open(out / "ft_profile.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["angle_radians", "ft_value"]
    assert len(rows) == 1 + doc["config"]["scan"]["angle_count"]


def test_construct_artifacts(tmp_path):
    out = tmp_path / "c"
    assert cli.main(["construct", "--lambda", "0.1", "--out", str(out)]) == cli.EXIT_OK
    for name in ("L", "M"):
        with open(out / f"{name}_profile.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["phi_radians", "rho"]
        assert len(rows) == 1002
        side = json.loads((out / f"{name}_profile.json").read_text())
        assert side["n"] == 3 and "smoothness_class" in side
    doc = json.loads((out / "construct.json").read_text())
    assert doc["L_convexity"]["convex"]
    assert doc["M_half_height"] > 1


def test_construct_is_deterministic(tmp_path):
    out = tmp_path / "d"
    docs, csvs = [], []
    for _ in range(2):
        assert cli.main(["construct", "--out", str(out), "--seed", "3"]) == cli.EXIT_OK
        doc = json.loads((out / "construct.json").read_text())
        doc.pop("metadata")
        docs.append(cli.dumps(doc))
        csvs.append((out / "L_profile.csv").read_bytes())
    assert docs[0] == docs[1]
    assert csvs[0] == csvs[1]


def test_dumps_handles_numpy_and_nonfinite():
    import numpy as np

    s = cli.dumps({"a": np.float64(1.5), "b": np.array([1, 2]), "c": float("inf"), "d": np.bool_(True)})
    assert json.loads(s) == {"a": 1.5, "b": [1, 2], "c": "inf", "d": True}


def test_runtime_error_exits_1(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "scan", boom)
    assert cli.main(["scan", "--out", str(tmp_path)]) == cli.EXIT_ERROR


def test_overrides():
    args = cli.build_parser().parse_args(["certify", "--n", "5", "--section-dim", "3", "--planes", "7",
                                          "--tol", "1e-5", "--seed", "2"])
    cfg = cli.apply_overrides(validate(RunConfig()), args)
    assert (cfg.n, cfg.k, cfg.certify.plane_count, cfg.scan.ft_rtol, cfg.certify.seed) == (5, 2, 7, 1e-5, 2)
