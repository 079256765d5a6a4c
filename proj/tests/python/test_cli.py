import csv
import json
import math
import random
import subprocess

import pytest


def run(cli, *args):
    return subprocess.run([cli, *map(str, args)], capture_output=True, text=True)


TINY = {
    "scenario": {"n_defenders": 2, "n_attackers": 3},
    "reward": {"shaping_weight": 0.0},
    "train": {"total_steps": 1200, "hidden": [16], "batch_size": 16, "learning_starts": 200},
    "seeds": [3],
    "eval_every": 600,
    "eval_episodes": 2,
    "eval_difficulties": [0.95],
}


def write_config(path, **reward):
    cfg = json.loads(json.dumps(TINY))
    cfg["reward"].update(reward)
    path.write_text(json.dumps(cfg))
    return path


def test_help_lists_subcommands_and_flags(cli):
    r = run(cli, "--help")
    assert r.returncode == 0
    for name in ("train", "eval", "fit-pass-model", "solve-epv", "render-field", "replay", "curve"):
        assert name in r.stdout
    r = run(cli, "train", "--help")
    for flag in ("--config", "--out", "--seeds", "--baseline", "--jobs"):
        assert flag in r.stdout


def test_missing_config_names_the_path(cli, tmp_path):
    missing = tmp_path / "absent.json"
    r = run(cli, "train", "--config", missing, "--out", tmp_path / "out")
    assert r.returncode == 2
    assert "absent.json" in r.stderr


def test_unknown_flag_is_a_config_error(cli):
    assert run(cli, "train", "--nonsense").returncode == 2


def test_baseline_flag_equals_zero_weight(cli, tmp_path):
    shaped = write_config(tmp_path / "shaped.json", shaping_weight=0.05)
    plain = write_config(tmp_path / "plain.json", shaping_weight=0.0)
    a = run(cli, "train", "--config", shaped, "--out", tmp_path / "a", "--baseline")
    b = run(cli, "train", "--config", plain, "--out", tmp_path / "b")
    assert a.returncode == 0, a.stderr
    assert b.returncode == 0, b.stderr
    (run_a,) = (tmp_path / "a").iterdir()
    (run_b,) = (tmp_path / "b").iterdir()
    assert run_a.name == run_b.name
    assert (run_a / "metrics.jsonl").read_bytes() == (run_b / "metrics.jsonl").read_bytes()

    # eval reproduces the logged final evaluation
    r = run(cli, "eval", "--checkpoint", run_a / "final.json", "--difficulty", 0.95, "--episodes", 2)
    assert r.returncode == 0, r.stderr
    logged = [json.loads(line) for line in (run_a / "evaluations.jsonl").read_text().splitlines()]
    final = [row for row in logged if row["final"] and row["difficulty"] == 0.95]
    assert float(r.stdout.split()[-1]) == final[0]["mean_goal_difference"]

    r = run(cli, "curve", "--runs", tmp_path / "a", "--out", tmp_path / "curve.csv")
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader((tmp_path / "curve.csv").open()))
    assert [int(row["step"]) for row in rows][:2] == [0, 600]

    r = run(cli, "replay", "--checkpoint", run_a / "final.json", "--seed", 9, "--out", tmp_path / "ep.jsonl")
    assert r.returncode == 0, r.stderr
    frames = (tmp_path / "ep.jsonl").read_text().splitlines()
    assert "outcome" in json.loads(frames[-1])
    r = run(cli, "render-field", "--state", tmp_path / "ep.jsonl", "--frame", 0, "--what", "overlay",
            "--out", tmp_path / "f.svg")
    assert r.returncode == 0, r.stderr


def test_fit_pass_model_matches_logit(cli, tmp_path):
    sm = pytest.importorskip("statsmodels.api")
    rng = random.Random(11)
    xs, ks = [], []
    for _ in range(10000):
        x = rng.gauss(0.2, 1.0)
        p = 1 / (1 + math.exp(-(x - 0.2) / 0.45))
        xs.append(x)
        ks.append(int(rng.random() < p))
    events = tmp_path / "events.csv"
    events.write_text("x,k\n" + "".join(f"{x!r},{k}\n" for x, k in zip(xs, ks)))
    r = run(cli, "fit-pass-model", "--events", events, "--out", tmp_path / "fit.json")
    assert r.returncode == 0, r.stderr
    fit = json.loads((tmp_path / "fit.json").read_text())

    # logit(p) = b0 + b1 x with b1 = 1/sigma, b0 = -lambda/sigma
    b0, b1 = sm.Logit(ks, sm.add_constant(xs)).fit(disp=0, tol=1e-12).params
    assert fit["sigma"] == pytest.approx(1 / b1, rel=1e-6)
    assert fit["lambda"] == pytest.approx(-b0 / b1, rel=1e-6)
    assert fit["sigma"] == pytest.approx(0.45, rel=0.10)


def test_solve_and_render_are_deterministic(cli, tmp_path):
    for name in ("a", "b"):
        assert run(cli, "solve-epv", "--out", tmp_path / f"{name}.json").returncode == 0
        r = run(cli, "render-field", "--what", "epv", "--epv", tmp_path / f"{name}.json",
                "--out", tmp_path / f"{name}.ppm")
        assert r.returncode == 0, r.stderr
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()
    grid = json.loads((tmp_path / "a.json").read_text())
    assert grid["m"] > 0 and grid["n"] > 0
