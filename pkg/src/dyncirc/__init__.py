"""Measurement and reset elimination for dynamic quantum circuits."""

from __future__ import annotations

from dyncirc.circuit import (
    Branch,
    Circuit,
    CondGate,
    Gate,
    Measure,
    ProbGate,
    Reset,
    compile_shot,
    count_dynamic_ops,
)
from dyncirc.pcm import PassConfig, PassReport, run_baselines, run_pass
from dyncirc.qcp import TOP, AmplitudeTable
from dyncirc.qcp import run as analyze

__all__ = [
    "TOP",
    "AmplitudeTable",
    "Branch",
    "Circuit",
    "CondGate",
    "Gate",
    "Measure",
    "PassConfig",
    "PassReport",
    "ProbGate",
    "Reset",
    "analyze",
    "compile_shot",
    "count_dynamic_ops",
    "run_baselines",
    "run_pass",
]
