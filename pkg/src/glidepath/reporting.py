"""CSV and manifest serialization for completed runs.

All floats are written with 17 significant digits so files are bit-stable
for identical runs and round-trip through text without loss.
"""

from __future__ import annotations

import csv
import os

from ._version import __version__
from .errors import ParameterError
from .experiments import ScenarioResult, SweepResult, scatter_slice


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _normalize(results) -> list[ScenarioResult]:
    if isinstance(results, ScenarioResult):
        return [results]
    if isinstance(results, SweepResult):
        out = [c.result for c in results.cells if c.result is not None]
        if not out:
            raise ParameterError("sweep produced no successful cells to emit")
        return out
    out = list(results)
    if not out or not all(isinstance(r, ScenarioResult) for r in out):
        raise ParameterError("emit_results needs at least one scenario result")
    return out


def write_strategy_path(res: ScenarioResult, path: str) -> None:
    """Per-time means: t, mean_pi, mean_wealth, mean_contribution.

    One row per rebalance time t = 0..T-dt; wealth and contribution are the
    time-t (pre-step) means."""
    dt = res.surface.grid.dt
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "mean_pi", "mean_wealth", "mean_contribution"])
        for it in range(res.mean_pi.shape[0]):
            w.writerow([_fmt(it * dt), _fmt(res.mean_pi[it]),
                        _fmt(res.mean_wealth[it]),
                        _fmt(res.mean_contribution[it])])


def write_terminal_stats(results: list[ScenarioResult], path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "mean", "variance", "ce", "cv", "n", "seed"])
        for r in results:
            s = r.stats
            w.writerow([r.label, _fmt(s.mean), _fmt(s.variance), _fmt(s.ce),
                        _fmt(s.cv), s.n, r.seed])


def write_scatter(res: ScenarioResult, t: float, path: str,
                  vol_band: tuple[float, float] | None = None) -> None:
    if res.result is None:
        raise ParameterError(
            f"{res.label}: per-path arrays were dropped, cannot emit scatter")
    points = scatter_slice(res.result, t, vol_band)
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["wealth", "pi", "nu"])
        for row in points:
            w.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2])])


def write_manifest(path: str, config_doc: str | None, seed: int,
                   files: list[str], comments=()) -> None:
    """Resolved config plus version/seed header; itself a parseable config."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# glidepath {__version__}\n")
        fh.write(f"# seed {seed}\n")
        fh.write(f"# files: {', '.join(sorted(files))}\n")
        for line in comments:
            fh.write(f"# {line}\n")
        if config_doc is not None:
            fh.write(config_doc)


def emit_results(results, out_dir: str, *, config_doc: str | None = None,
                 scatter_times=(), vol_band: tuple[float, float] | None = None,
                 comments=()) -> list[str]:
    """Write the output files for one or more completed runs into out_dir.

    strategy_path.csv and scatter files describe the first result; the
    terminal stats table has one row per result.  Returns written paths.
    """
    runs = _normalize(results)
    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "strategy_path.csv")
    write_strategy_path(runs[0], path)
    written.append(path)

    path = os.path.join(out_dir, "terminal_stats.csv")
    write_terminal_stats(runs, path)
    written.append(path)

    for t in scatter_times:
        path = os.path.join(out_dir, f"scatter_t{t:g}.csv")
        write_scatter(runs[0], t, path, vol_band)
        written.append(path)

    manifest = os.path.join(out_dir, "run_manifest")
    write_manifest(manifest, config_doc, runs[0].seed,
                   [os.path.basename(p) for p in written], comments)
    written.append(manifest)
    return written


__all__ = ["emit_results", "write_strategy_path", "write_terminal_stats",
           "write_scatter", "write_manifest"]
