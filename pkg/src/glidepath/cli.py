"""Command-line interface: run, sweep, reproduce, validate.

Exit codes: 0 success, 1 usage, 2 configuration/validation failure,
3 runtime failure.  GLIDEPATH_THREADS caps the compute thread count
(0 or unset = automatic).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

from ._version import __version__
from .config import (RunConfig, apply_overrides, default_config, parse_config,
                     render_config)
from .errors import ConfigError, GlidepathError
from .experiments import (Scenario, ScenarioResult, run_prolongation,
                          run_scenario, run_sweep, scenario_with)
from .params import ConstantVol, HestonVol
from .reporting import emit_results, write_manifest, write_terminal_stats

_TARGETS = ("table6", "gamma", "contribution", "theta-shift", "merton",
            "heston", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")
_SHIFTED_THETA = 0.18 ** 2
_SCATTER_BAND = (0.01, 0.02)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="glidepath",
                     description="Pension glide-path solver and studies")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, helptext in (("run", "solve and evaluate one scenario"),
                           ("sweep", "run the configured parameter sweep"),
                           ("reproduce", "rebuild a study table or figure dataset"),
                           ("validate", "check a configuration and print it")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", metavar="PATH", help="configuration file")
        p.add_argument("--seed", type=int, metavar="U64")
        p.add_argument("--paths", type=int, metavar="N", help="path count override")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--model", choices=("cvm", "svm"))
        p.add_argument("--no-contribution", action="store_true")
        p.add_argument("--horizon", type=float, metavar="YEARS")
        if name == "reproduce":
            p.add_argument("--target", required=True, choices=_TARGETS)
    return parser


def _apply_thread_cap() -> None:
    raw = os.environ.get("GLIDEPATH_THREADS")
    if raw is None or raw.strip() == "":
        return
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"GLIDEPATH_THREADS: expected integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"GLIDEPATH_THREADS: must be >= 0, got {n}")
    if n > 0:
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _load_config(args) -> RunConfig:
    if args.config is None:
        cfg = default_config()
    else:
        try:
            with open(args.config, "r") as fh:
                doc = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        cfg = parse_config(doc)
    return apply_overrides(cfg, seed=args.seed, paths=args.paths, out=args.out,
                           model=args.model,
                           no_contribution=args.no_contribution,
                           horizon=args.horizon)


def _progress(msg: str) -> None:
    print(f"[glidepath] {msg}", flush=True)


def _run(sc: Scenario, keep_paths: bool = False) -> ScenarioResult:
    model = "svm" if sc.market.is_heston else "cvm"
    _progress(f"running {sc.label}: model={model} T={sc.fund.T:g} "
              f"n_r={sc.algo.n_r} seed={sc.seed}")
    return run_scenario(sc, keep_paths=keep_paths)


def _print_stats(results) -> None:
    print(f"{'label':<28} {'mean':>10} {'variance':>12} {'ce':>10} {'cv':>8}")
    for r in results:
        s = r.stats
        print(f"{r.label:<28} {s.mean:>10.4f} {s.variance:>12.4f} "
              f"{s.ce:>10.4f} {s.cv:>8.4f}")


def _cfg_for(sc: Scenario, out_dir: str) -> RunConfig:
    return RunConfig(market=sc.market, contribution=sc.contribution,
                     fund=sc.fund, algo=sc.algo, label=sc.label, seed=sc.seed,
                     out_dir=out_dir, regime_shift=sc.regime_shift)


def _force_model(sc: Scenario, model: str) -> Scenario:
    current = "svm" if sc.market.is_heston else "cvm"
    if current == model:
        return sc
    vol = HestonVol() if model == "svm" else ConstantVol()
    return replace(sc, market=replace(sc.market, vol_spec=vol))


@dataclass
class _Panel:
    name: str
    scenario: Scenario | None = None
    scatter_times: tuple = ()
    vol_band: tuple | None = None
    keep_paths: bool = False
    policy_from: str | None = None
    reuse: str | None = None


def _execute_panels(panels: list[_Panel], out: str, base_doc: str,
                    comments=()) -> int:
    results: dict[str, ScenarioResult] = {}
    scenarios: dict[str, Scenario] = {}
    ordered = []
    for p in panels:
        if p.reuse is not None:
            results[p.name] = results[p.reuse]
            scenarios[p.name] = scenarios[p.reuse]
        else:
            sc = p.scenario
            if p.policy_from is not None:
                sc = replace(sc, policy_source=results[p.policy_from].surface)
            results[p.name] = _run(sc, keep_paths=p.keep_paths)
            scenarios[p.name] = sc
        ordered.append((p, results[p.name]))

    if len(ordered) == 1:
        p, res = ordered[0]
        emit_results(res, out,
                     config_doc=render_config(_cfg_for(scenarios[p.name], out)),
                     scatter_times=p.scatter_times, vol_band=p.vol_band,
                     comments=comments)
    else:
        os.makedirs(out, exist_ok=True)
        for p, res in ordered:
            sub = os.path.join(out, p.name)
            emit_results(res, sub,
                         config_doc=render_config(_cfg_for(scenarios[p.name], sub)),
                         scatter_times=p.scatter_times, vol_band=p.vol_band)
        write_terminal_stats([r for _, r in ordered],
                             os.path.join(out, "terminal_stats.csv"))
        write_manifest(os.path.join(out, "run_manifest"), base_doc,
                       ordered[0][1].seed,
                       ["terminal_stats.csv"] + [p.name + "/" for p, _ in ordered],
                       comments)
    _print_stats([r for _, r in ordered])
    _progress(f"wrote results to {out}")
    return 0


def _labeled(sc: Scenario, label: str, **field_values) -> Scenario:
    for axis, v in field_values.items():
        sc = scenario_with(sc, axis, v)
    return replace(sc, label=label)


def _disabled_contribution(sc: Scenario) -> Scenario:
    return replace(sc, contribution=replace(sc.contribution, enabled=False))


def _target_panels(target: str, cfg: RunConfig, args) -> tuple[list[_Panel], list[str]]:
    base = cfg.scenario()
    svm = _force_model(base, "svm")
    cvm = _force_model(base, "cvm")
    comments = [f"reproduce target: {target}"]

    if target == "merton":
        return [_Panel("merton", replace(_disabled_contribution(cvm),
                                         label="merton"))], comments
    if target == "heston":
        return [_Panel("heston", replace(_disabled_contribution(svm),
                                         label="heston"))], comments
    if target == "table6":
        panels = [_Panel("cvm", replace(cvm, label="cvm"))]
        for rho in (0.9, 0.4, 0.0, -0.4, -0.9):
            panels.append(_Panel(f"rho_{rho:g}",
                                 _labeled(svm, f"svm_rho_{rho:g}", rho_S=rho)))
        return panels, comments
    if target in ("gamma", "fig5"):
        return [_Panel(f"gamma_{g:g}", _labeled(svm, f"gamma_{g:g}", gamma=g))
                for g in (0.5, 1.5, 2.0, 3.0, 6.0)], comments
    if target == "contribution":
        panels = []
        for s_c, m_c in ((0.0, 0.0), (0.0, 0.04), (0.1, 0.02), (0.1, 0.04),
                         (0.1, 0.06), (0.05, 0.04), (0.15, 0.04)):
            panels.append(_Panel(f"sC{s_c:g}_mC{m_c:g}",
                                 _labeled(svm, f"sC{s_c:g}_mC{m_c:g}",
                                          sigma_C=s_c, mu_C=m_c)))
        return panels, comments
    if target == "theta-shift":
        T = args.horizon if args.horizon is not None else 30.0
        n_r = args.paths if args.paths is not None else 20000
        sc = replace(svm,
                     fund=replace(svm.fund, T=T),
                     algo=replace(svm.algo, n_r=n_r, long_horizon_stepping=True),
                     label=f"theta_T{T:g}")
        shifted = replace(sc, regime_shift=(T / 2.0, _SHIFTED_THETA),
                          label=f"theta_T{T:g}_shifted")
        comments.append(f"long-run variance shifts to {_SHIFTED_THETA:g} at t={T / 2.0:g}")
        return [_Panel("noshift", sc),
                _Panel("shifted", shifted, policy_from="noshift")], comments
    if target == "fig2":
        return [_Panel("cvm", replace(cvm, label="cvm")),
                _Panel("svm", replace(svm, label="svm"))], comments
    if target == "fig3":
        return [_Panel("svm", replace(svm, label="svm"),
                       scatter_times=(5.0,), keep_paths=True),
                _Panel("svm_band", reuse="svm", scatter_times=(5.0,),
                       vol_band=_SCATTER_BAND),
                _Panel("cvm", replace(cvm, label="cvm"),
                       scatter_times=(5.0,), keep_paths=True)], comments
    if target == "fig4":
        panels = [_Panel(f"p0_{p:g}", _labeled(svm, f"p0_{p:g}", p0=p))
                  for p in (2.5, 5.0, 10.0)]
        panels.append(_Panel("c0_1", reuse="p0_5"))
        panels += [_Panel(f"c0_{c:g}", _labeled(svm, f"c0_{c:g}", c0=c))
                   for c in (0.5, 2.0)]
        return panels, comments
    if target == "fig6":
        return [_Panel(f"muC_{v:g}", _labeled(svm, f"muC_{v:g}", mu_C=v))
                for v in (0.02, 0.04, 0.06)], comments
    if target == "fig7":
        return [_Panel(f"sigmaC_{v:g}", _labeled(svm, f"sigmaC_{v:g}", sigma_C=v))
                for v in (0.05, 0.1, 0.15)], comments
    raise ConfigError(f"unknown reproduce target {target!r}")


def _cmd_run(args, cfg: RunConfig) -> int:
    if cfg.sweep_axis is not None:
        raise ConfigError("config has a [sweep] section; use the sweep subcommand")
    res = _run(cfg.scenario())
    emit_results(res, cfg.out_dir, config_doc=render_config(cfg))
    _print_stats([res])
    _progress(f"wrote results to {cfg.out_dir}")
    return 0


def _cmd_sweep(args, cfg: RunConfig) -> int:
    spec = cfg.sweep_spec()
    _progress(f"sweep over {spec.axis} = {list(spec.values)}")
    result = run_sweep(spec)
    for cell in result.cells:
        if cell.error is not None:
            print(f"[glidepath] cell {spec.axis}={cell.value:g} failed: "
                  f"{cell.error}", file=sys.stderr)
    ok = [c.result for c in result.cells if c.result is not None]
    if not ok:
        print("[glidepath] every sweep cell failed", file=sys.stderr)
        return 3
    emit_results(result, cfg.out_dir, config_doc=render_config(cfg))
    _print_stats(ok)
    _progress(f"wrote results to {cfg.out_dir}")
    return 0


def _cmd_validate(args, cfg: RunConfig) -> int:
    print(render_config(cfg), end="")
    return 0


def _cmd_reproduce(args, cfg: RunConfig) -> int:
    if args.target == "fig8":
        return _reproduce_fig8(args, cfg)
    panels, comments = _target_panels(args.target, cfg, args)
    return _execute_panels(panels, cfg.out_dir, render_config(cfg), comments)


def _reproduce_fig8(args, cfg: RunConfig) -> int:
    base = _force_model(cfg.scenario(), "svm")
    _progress(f"prolongation study: T={base.fund.T:g} vs T=30, n_r={base.algo.n_r}")
    report = run_prolongation(base)
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    for name, res in (("t10", report.short), ("t30", report.long)):
        sub = os.path.join(out, name)
        emit_results(res, sub, config_doc=render_config(cfg))
    comments = [
        "reproduce target: fig8",
        f"initial mean strategy T={base.fund.T:g}: {report.initial_pi_short:.6f}",
        f"initial mean strategy T=30: {report.initial_pi_long:.6f}",
        f"mean wealth-to-contribution ratio at year {report.ratio_year:g}: "
        f"{report.wealth_to_contribution:.6f}",
    ]
    write_terminal_stats([report.short, report.long],
                         os.path.join(out, "terminal_stats.csv"))
    write_manifest(os.path.join(out, "run_manifest"), render_config(cfg),
                   base.seed, ["terminal_stats.csv", "t10/", "t30/"], comments)
    _print_stats([report.short, report.long])
    _progress(f"wrote results to {out}")
    return 0


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate,
             "reproduce": _cmd_reproduce}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"glidepath: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        _apply_thread_cap()
        cfg = _load_config(args)
        return _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"glidepath: {exc}", file=sys.stderr)
        return 2
    except GlidepathError as exc:
        print(f"glidepath: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"glidepath: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
