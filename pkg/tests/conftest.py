"""Shared fixtures: tiny scenario builders and the acceptance-line reporter.

The acceptance tests record one PASS/FAIL line per criterion; the lines are
replayed in a terminal section at the end of the run so they stay visible
even when pytest captures stdout.
"""

import numpy as np
import pytest

import glidepath as g


def pytest_configure(config):
    config._criterion_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def criterion(pytestconfig):
    """Recorder: criterion('3', ok, 'mean=26.72 ...') -> prints and stores."""

    def record(num, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
        pytestconfig._criterion_lines.append(line)
        print(line)
        return ok

    return record


# ---------------------------------------------------------------- builders

def cvm_market(**kw):
    return g.MarketParams(vol_spec=g.ConstantVol(), **kw)


def svm_market(**kw):
    vol = kw.pop("vol_spec", None) or g.HestonVol()
    return g.MarketParams(vol_spec=vol, **kw)


def tiny_scenario(model="cvm", *, n_r=800, N=4, T=1.0, seed=3,
                  enabled=True, label="tiny", **fund_kw):
    market = cvm_market() if model == "cvm" else svm_market()
    return g.Scenario(
        market=market,
        contribution=g.ContributionParams(enabled=enabled),
        fund=g.FundParams(T=T, **fund_kw),
        algo=g.AlgoParams(n_r=n_r, N=N),
        label=label,
        seed=seed,
    )


@pytest.fixture(scope="session")
def tiny_cvm_run():
    """One cached tiny CVM run shared by cheap contract tests."""
    return g.run_scenario(tiny_scenario("cvm"))


@pytest.fixture(scope="session")
def tiny_svm_run():
    return g.run_scenario(tiny_scenario("svm", n_r=1000, N=4, T=1.0, seed=5))
