from __future__ import annotations

import warnings

import pytest

from chbpwm import ChbTopology, ModulationConfig

# 3 * 2**11: divisible by 6 and fine enough for edge counts at M = 15
FAST_SPP = 6144


@pytest.fixture
def fast_config():
    def make(strategy="HIPWM_FMTCT", **kw):
        kw.setdefault("samples_per_period", FAST_SPP)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ModulationConfig.for_strategy(strategy, **kw)

    return make


@pytest.fixture
def reachable_topology():
    # smallest 5 V step at which every strategy reaches 220 V by Ma search alone
    return ChbTopology(vdc_per_cell=85.0)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_report(request):
    def report(criterion: int, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
