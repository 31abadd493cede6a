"""INI-style run configuration: parsing, validation, rendering.

Grammar: sections [market], [contribution], [fund], [algo], [run] and the
optional [sweep], with the keys listed in _SECTION_KEYS.  Unknown sections
or keys are rejected.  An empty document resolves to the package defaults
(stochastic-vol market, active contribution).  Lines starting with # or ;
are comments; the manifest written next to results is itself a valid
document that re-parses to the resolved configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import configparser

from .errors import ConfigError, ParameterError
from .experiments import Scenario, SweepSpec
from .params import (AlgoParams, ConstantVol, ContributionParams, FundParams,
                     HestonVol, MarketParams, n_steps_for)
from .sde import require_feller

_MARKET_COMMON = ("model", "mu", "r", "S0")
_MARKET_CVM = ("sigma_S",)
_MARKET_SVM = ("nu0", "lambda", "theta", "sigma_nu", "rho_S")
_SECTION_KEYS = {
    "market": _MARKET_COMMON + _MARKET_CVM + _MARKET_SVM,
    "contribution": ("enabled", "c0", "mu_C", "sigma_C", "rho_C"),
    "fund": ("p0", "T", "gamma"),
    "algo": ("N", "n_r", "n_pi", "n_p", "pi_lo", "pi_hi", "q1", "q2",
             "long_horizon_stepping"),
    "run": ("label", "seed", "out_dir", "shift_time", "shift_theta"),
    "sweep": ("axis", "values"),
}
_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration, defaults applied and validated."""

    market: MarketParams
    contribution: ContributionParams
    fund: FundParams
    algo: AlgoParams
    label: str = "run"
    seed: int = 0
    out_dir: str = "glidepath_out"
    regime_shift: tuple[float, float] | None = None
    sweep_axis: str | None = None
    sweep_values: tuple | None = None

    @property
    def model(self) -> str:
        return "svm" if self.market.is_heston else "cvm"

    def scenario(self) -> Scenario:
        return Scenario(market=self.market, contribution=self.contribution,
                        fund=self.fund, algo=self.algo, label=self.label,
                        seed=self.seed, regime_shift=self.regime_shift)

    def sweep_spec(self) -> SweepSpec:
        if self.sweep_axis is None:
            raise ConfigError("configuration has no [sweep] section")
        return SweepSpec(base=self.scenario(), axis=self.sweep_axis,
                         values=self.sweep_values)


def default_config() -> RunConfig:
    return RunConfig(market=MarketParams(), contribution=ContributionParams(),
                     fund=FundParams(), algo=AlgoParams())


class _Section:
    """One parsed section with typed, key-blaming accessors."""

    def __init__(self, name: str, raw: dict):
        self.name = name
        self.raw = dict(raw)
        self.seen = set()

    def _get(self, key: str):
        self.seen.add(key)
        return self.raw.get(key)

    def value(self, key: str, kind, default):
        raw = self._get(key)
        if raw is None:
            return default
        try:
            return kind(raw)
        except (TypeError, ValueError):
            want = {float: "number", int: "integer"}.get(kind, kind.__name__)
            raise ConfigError(
                f"[{self.name}] {key}: expected {want}, got {raw!r}") from None

    def boolean(self, key: str, default: bool) -> bool:
        raw = self._get(key)
        if raw is None:
            return default
        try:
            return _BOOL[raw.strip().lower()]
        except KeyError:
            raise ConfigError(
                f"[{self.name}] {key}: expected true/false, got {raw!r}") from None

    def text(self, key: str, default: str) -> str:
        raw = self._get(key)
        return default if raw is None else raw.strip()

    def reject_unseen(self, allowed) -> None:
        unknown = [k for k in self.raw if k not in allowed]
        if unknown:
            raise ConfigError(f"[{self.name}] unknown key {unknown[0]!r}")
        # keys valid for the section but not for the chosen model
        stale = [k for k in self.raw if k not in self.seen]
        if stale:
            raise ConfigError(
                f"[{self.name}] key {stale[0]!r} does not apply to this model")


def parse_config(document: str) -> RunConfig:
    """Parse and validate a configuration document, applying defaults.

    Errors name the offending section and key.  Market-level consistency
    (excluded risk aversion, Feller condition, step-count integrality) is
    checked here so a parsed config is always runnable.
    """
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(document)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc

    for sec in cp.sections():
        if sec not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{sec}]")
    sections = {name: _Section(name, dict(cp[name]) if cp.has_section(name) else {})
                for name in _SECTION_KEYS}

    mk = sections["market"]
    model = mk.text("model", "svm").lower()
    if model not in ("svm", "cvm"):
        raise ConfigError(f"[market] model: expected svm or cvm, got {model!r}")
    try:
        if model == "cvm":
            vol = ConstantVol(sigma_S=mk.value("sigma_S", float, 0.13))
        else:
            vol = HestonVol(nu0=mk.value("nu0", float, 0.0169),
                            lam=mk.value("lambda", float, 5.0),
                            theta=mk.value("theta", float, 0.0169),
                            sigma_nu=mk.value("sigma_nu", float, 0.25),
                            rho_S=mk.value("rho_S", float, -0.4))
        market = MarketParams(mu=mk.value("mu", float, 0.06),
                              r=mk.value("r", float, 0.02),
                              vol_spec=vol,
                              S0=mk.value("S0", float, 1.0))
        mk.reject_unseen(_MARKET_COMMON + (_MARKET_CVM if model == "cvm"
                                           else _MARKET_SVM))
        if model == "svm":
            require_feller(market)

        cs = sections["contribution"]
        contribution = ContributionParams(
            enabled=cs.boolean("enabled", True),
            c0=cs.value("c0", float, 1.0),
            mu_C=cs.value("mu_C", float, 0.04),
            sigma_C=cs.value("sigma_C", float, 0.1),
            rho_C=cs.value("rho_C", float, 0.05))
        cs.reject_unseen(_SECTION_KEYS["contribution"])

        fs = sections["fund"]
        fund = FundParams(p0=fs.value("p0", float, 5.0),
                          T=fs.value("T", float, 10.0),
                          gamma=fs.value("gamma", float, 3.0))
        fs.reject_unseen(_SECTION_KEYS["fund"])

        al = sections["algo"]
        algo = AlgoParams(N=al.value("N", int, 20),
                          n_r=al.value("n_r", int, 50000),
                          n_pi=al.value("n_pi", int, 31),
                          n_p=al.value("n_p", int, 3),
                          pi_lo=al.value("pi_lo", float, -0.5),
                          pi_hi=al.value("pi_hi", float, 2.5),
                          q1=al.value("q1", float, 0.1),
                          q2=al.value("q2", float, 0.1),
                          long_horizon_stepping=al.boolean(
                              "long_horizon_stepping", False))
        al.reject_unseen(_SECTION_KEYS["algo"])
        n_steps_for(fund.T, algo.N)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    rn = sections["run"]
    label = rn.text("label", "run")
    seed = rn.value("seed", int, 0)
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"[run] seed: must be an unsigned 64-bit integer, got {seed}")
    out_dir = rn.text("out_dir", "glidepath_out")
    shift_time = rn.value("shift_time", float, None)
    shift_theta = rn.value("shift_theta", float, None)
    rn.reject_unseen(_SECTION_KEYS["run"])
    if (shift_time is None) != (shift_theta is None):
        raise ConfigError("[run] shift_time and shift_theta must be set together")
    regime_shift = None
    if shift_time is not None:
        if model == "cvm":
            raise ConfigError("[run] shift_time: regime shift needs model svm")
        if not 0.0 < shift_time < fund.T:
            raise ConfigError(
                f"[run] shift_time: must lie in (0, {fund.T:g}), got {shift_time:g}")
        if shift_theta <= 0:
            raise ConfigError("[run] shift_theta: must be > 0")
        regime_shift = (shift_time, shift_theta)

    sw = sections["sweep"]
    sweep_axis = sweep_values = None
    if cp.has_section("sweep"):
        sweep_axis = sw.text("axis", "")
        raw_values = sw.text("values", "")
        sw.reject_unseen(_SECTION_KEYS["sweep"])
        if not sweep_axis or not raw_values:
            raise ConfigError("[sweep] needs both axis and values")
        try:
            sweep_values = tuple(float(v) for v in raw_values.replace(",", " ").split())
        except ValueError:
            raise ConfigError(
                f"[sweep] values: expected numbers, got {raw_values!r}") from None
        if not sweep_values:
            raise ConfigError("[sweep] values: empty list")

    return RunConfig(market=market, contribution=contribution, fund=fund,
                     algo=algo, label=label, seed=seed, out_dir=out_dir,
                     regime_shift=regime_shift, sweep_axis=sweep_axis,
                     sweep_values=sweep_values)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.17g}"


def render_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig to a document that parses back identically."""
    m = cfg.market
    lines = ["[market]", f"model = {cfg.model}", f"mu = {_fmt(m.mu)}",
             f"r = {_fmt(m.r)}", f"S0 = {_fmt(m.S0)}"]
    if cfg.model == "cvm":
        lines.append(f"sigma_S = {_fmt(m.vol_spec.sigma_S)}")
    else:
        v = m.vol_spec
        lines += [f"nu0 = {_fmt(v.nu0)}", f"lambda = {_fmt(v.lam)}",
                  f"theta = {_fmt(v.theta)}", f"sigma_nu = {_fmt(v.sigma_nu)}",
                  f"rho_S = {_fmt(v.rho_S)}"]
    c = cfg.contribution
    lines += ["", "[contribution]", f"enabled = {_fmt(c.enabled)}",
              f"c0 = {_fmt(c.c0)}", f"mu_C = {_fmt(c.mu_C)}",
              f"sigma_C = {_fmt(c.sigma_C)}", f"rho_C = {_fmt(c.rho_C)}"]
    f = cfg.fund
    lines += ["", "[fund]", f"p0 = {_fmt(f.p0)}", f"T = {_fmt(f.T)}",
              f"gamma = {_fmt(f.gamma)}"]
    a = cfg.algo
    lines += ["", "[algo]", f"N = {a.N}", f"n_r = {a.n_r}", f"n_pi = {a.n_pi}",
              f"n_p = {a.n_p}", f"pi_lo = {_fmt(a.pi_lo)}",
              f"pi_hi = {_fmt(a.pi_hi)}", f"q1 = {_fmt(a.q1)}",
              f"q2 = {_fmt(a.q2)}",
              f"long_horizon_stepping = {_fmt(a.long_horizon_stepping)}"]
    lines += ["", "[run]", f"label = {cfg.label}", f"seed = {cfg.seed}",
              f"out_dir = {cfg.out_dir}"]
    if cfg.regime_shift is not None:
        lines += [f"shift_time = {_fmt(cfg.regime_shift[0])}",
                  f"shift_theta = {_fmt(cfg.regime_shift[1])}"]
    if cfg.sweep_axis is not None:
        lines += ["", "[sweep]", f"axis = {cfg.sweep_axis}",
                  "values = " + ", ".join(_fmt(v) for v in cfg.sweep_values)]
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: RunConfig, *, seed: int | None = None,
                    paths: int | None = None, out: str | None = None,
                    model: str | None = None, no_contribution: bool = False,
                    horizon: float | None = None) -> RunConfig:
    """Command-line overrides on a parsed config; same validation rules."""
    try:
        if seed is not None:
            if not 0 <= seed < 2 ** 64:
                raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {seed}")
            cfg = replace(cfg, seed=seed)
        if paths is not None:
            cfg = replace(cfg, algo=replace(cfg.algo, n_r=paths))
        if out is not None:
            cfg = replace(cfg, out_dir=out)
        if model is not None and model != cfg.model:
            vol = ConstantVol() if model == "cvm" else HestonVol()
            cfg = replace(cfg, market=replace(cfg.market, vol_spec=vol))
            if model == "cvm" and cfg.regime_shift is not None:
                raise ConfigError("--model cvm conflicts with the configured regime shift")
        if no_contribution:
            cfg = replace(cfg, contribution=replace(cfg.contribution, enabled=False))
        if horizon is not None:
            cfg = replace(cfg, fund=replace(cfg.fund, T=horizon))
            n_steps_for(horizon, cfg.algo.N)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


__all__ = ["RunConfig", "parse_config", "render_config", "default_config",
           "apply_overrides"]
