"""Command line: exit codes, overrides, outputs, thread-cap handling."""

import os
import subprocess
import sys

import pytest

from glidepath.cli import cli_dispatch
from glidepath.config import parse_config

TINY = """\
[market]
model = cvm
[fund]
T = 1
[algo]
n_r = 400
N = 4
[run]
seed = 7
label = smoke
"""


def _clean_env(**extra):
    env = {k: v for k, v in os.environ.items() if k != "GLIDEPATH_THREADS"}
    env.update(extra)
    return env


def dispatch(args, env=None):
    """Run in-process with a controlled GLIDEPATH_THREADS."""
    old = os.environ.pop("GLIDEPATH_THREADS", None)
    if env is not None:
        os.environ["GLIDEPATH_THREADS"] = env
    try:
        return cli_dispatch(args)
    finally:
        os.environ.pop("GLIDEPATH_THREADS", None)
        if old is not None:
            os.environ["GLIDEPATH_THREADS"] = old


# --------------------------------------------------------------- exit codes

def test_usage_errors_exit_1(capsys):
    assert dispatch([]) == 1
    assert dispatch(["frob"]) == 1
    assert dispatch(["--bogus"]) == 1
    assert dispatch(["reproduce"]) == 1  # --target required
    capsys.readouterr()


def test_missing_config_exits_2(capsys):
    assert dispatch(["run", "--config", "/no/such/file.cfg"]) == 2
    err = capsys.readouterr().err
    assert "cannot read config" in err


def test_invalid_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[fund]\ngamma = 1\n")
    assert dispatch(["validate", "--config", str(bad)]) == 2
    assert "gamma" in capsys.readouterr().err


def test_invalid_thread_cap_exits_2(capsys):
    assert dispatch(["validate"], env="abc") == 2
    assert dispatch(["validate"], env="-1") == 2
    err = capsys.readouterr().err
    assert "GLIDEPATH_THREADS" in err
    # zero means automatic, not an error
    assert dispatch(["validate"], env="0") == 0
    capsys.readouterr()


def test_runtime_failure_exits_3(tmp_path, capsys):
    cfg = tmp_path / "t.cfg"
    cfg.write_text(TINY)
    rc = dispatch(["run", "--config", str(cfg),
                   "--out", "/proc/definitely/not/writable"])
    assert rc == 3
    capsys.readouterr()


def test_validate_echoes_resolved_config(capsys):
    assert dispatch(["validate"]) == 0
    out = capsys.readouterr().out
    cfg = parse_config(out)
    assert cfg == parse_config("")


def test_validate_applies_overrides(capsys):
    assert dispatch(["validate", "--model", "cvm", "--seed", "5",
                     "--no-contribution"]) == 0
    cfg = parse_config(capsys.readouterr().out)
    assert cfg.model == "cvm"
    assert cfg.seed == 5
    assert not cfg.contribution.enabled


# ---------------------------------------------------------------- run/sweep

def test_run_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "t.cfg"
    cfg.write_text(TINY)
    out = tmp_path / "out"
    assert dispatch(["run", "--config", str(cfg), "--out", str(out)]) == 0
    for name in ("strategy_path.csv", "terminal_stats.csv", "run_manifest"):
        assert (out / name).exists()
    # manifest reruns to the same numbers
    out2 = tmp_path / "out2"
    assert dispatch(["run", "--config", str(out / "run_manifest"),
                     "--out", str(out2)]) == 0
    assert ((out2 / "terminal_stats.csv").read_bytes()
            == (out / "terminal_stats.csv").read_bytes())
    capsys.readouterr()


def test_sweep_writes_combined_table(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(TINY + "[sweep]\naxis = mu\nvalues = 0.05 0.06\n")
    out = tmp_path / "out"
    assert dispatch(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "terminal_stats.csv").read_text().splitlines()
    assert len(rows) == 3
    assert "smoke[mu=0.05]" in rows[1]
    capsys.readouterr()


def test_sweep_without_section_fails_cleanly(tmp_path, capsys):
    cfg = tmp_path / "t.cfg"
    cfg.write_text(TINY)
    assert dispatch(["sweep", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2
    capsys.readouterr()


def test_reproduce_merton_smoke(tmp_path, capsys):
    out = tmp_path / "m"
    rc = dispatch(["reproduce", "--target", "merton", "--paths", "500",
                   "--horizon", "1", "--out", str(out)])
    assert rc == 0
    assert (out / "terminal_stats.csv").exists()
    capsys.readouterr()


def test_reproduce_rejects_unknown_target(capsys):
    assert dispatch(["reproduce", "--target", "frob"]) == 1
    capsys.readouterr()


# ------------------------------------------------------------- determinism

def test_thread_cap_does_not_change_results(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text(TINY)
    outs = []
    for name, threads in (("a", None), ("b", "1"), ("c", "2")):
        out = tmp_path / name
        env = _clean_env() if threads is None else _clean_env(
            GLIDEPATH_THREADS=threads)
        r = subprocess.run(
            [sys.executable, "-m", "glidepath", "run", "--config", str(cfg),
             "--out", str(out)],
            capture_output=True, text=True, env=env)
        assert r.returncode == 0, r.stderr
        outs.append(out)
    for name in ("strategy_path.csv", "terminal_stats.csv"):
        blobs = [(o / name).read_bytes() for o in outs]
        assert blobs[0] == blobs[1] == blobs[2]
