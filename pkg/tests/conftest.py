"""Shared fixtures: run each scenario once per session and reuse the
reports across the scenario regression tests and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from kerrspin.config import resolve
from kerrspin.reporting import ScenarioReport
from kerrspin.scenarios import SCENARIOS, run_scenario


@dataclass
class ScenarioRun:
    report: ScenarioReport
    elapsed_s: float
    out_dir: Path

    def check(self, name: str):
        for c in self.report.checks:
            if c.name == name:
                return c
        raise KeyError(name)


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory) -> dict[str, ScenarioRun]:
    root = tmp_path_factory.mktemp("scenario-artifacts")
    runs: dict[str, ScenarioRun] = {}
    for scenario_id in SCENARIOS:
        cfg = resolve(scenario_id)
        out_dir = root / scenario_id
        start = time.perf_counter()
        report = run_scenario(scenario_id, cfg, out_dir)
        runs[scenario_id] = ScenarioRun(
            report=report,
            elapsed_s=time.perf_counter() - start,
            out_dir=out_dir,
        )
    return runs
