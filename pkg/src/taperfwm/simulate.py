"""Single-source run orchestration."""

from __future__ import annotations

from dataclasses import dataclass

from .config import SourceConfig, validate_config
from .jta import SimulationResult, evolve_jta
from .metrics import MetricsReport, compute_metrics
from .pumps import PumpTrace, initial_envelopes, propagate_pumps


class ValidationFailure(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class RunOutput:
    cfg: SourceConfig
    pump_trace: PumpTrace
    result: SimulationResult
    metrics: MetricsReport


def run_source(cfg: SourceConfig, keep_pump_trace: bool = False) -> RunOutput:
    """Validate, propagate the pumps, evolve the JTA and compute metrics."""
    rep = validate_config(cfg)
    if not rep.ok:
        raise ValidationFailure(rep.errors)
    env0 = initial_envelopes(cfg)
    trace = propagate_pumps(cfg, env0)
    result = evolve_jta(cfg, trace)
    metrics = compute_metrics(result, cfg)
    return RunOutput(
        cfg=cfg,
        pump_trace=trace if keep_pump_trace else None,
        result=result,
        metrics=metrics,
    )
