"""Monte Carlo model of the three-stage homodyne noise calibration.

Stages, each a zero-mean Gaussian record with variance (units of N0):

1. electrical only (LO off, neighbours dark):          nu_el
2. shot + electrical (LO on):                          1 + nu_el
3. crosstalk + shot + electrical (neighbours lit):     1 + nu_el + eta * t * eps

``eps`` is input-referred so the same value feeds the key-rate formulas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, InsufficientDataError, ParameterError


class Stage(enum.IntEnum):
    ELECTRICAL_ONLY = 0
    SHOT_PLUS_ELECTRICAL = 1
    CROSSTALK_PLUS_SHOT_PLUS_ELECTRICAL = 2


@dataclass(frozen=True)
class MeasurementConfig:
    n_samples: int
    shot_variance_n0: float = 1.0
    nu_el: float = 0.08
    eta: float = 0.7
    t: float = 0.2
    eps_planted: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")
        if not self.shot_variance_n0 > 0.0:
            raise ParameterError(f"shot_variance_n0 must be > 0, got {self.shot_variance_n0}")
        if self.nu_el < 0.0 or self.eps_planted < 0.0:
            raise ParameterError("nu_el and eps_planted must be >= 0")
        if not (0.0 < self.eta <= 1.0 and 0.0 < self.t <= 1.0):
            raise ParameterError("eta and t must lie in (0, 1]")

    def stage_variance(self, stage: Stage) -> float:
        """Population variance of a stage, arbitrary electrical units."""
        snu = {
            Stage.ELECTRICAL_ONLY: self.nu_el,
            Stage.SHOT_PLUS_ELECTRICAL: 1.0 + self.nu_el,
            Stage.CROSSTALK_PLUS_SHOT_PLUS_ELECTRICAL:
                1.0 + self.nu_el + self.eta * self.t * self.eps_planted,
        }[Stage(stage)]
        return snu * self.shot_variance_n0


@dataclass(frozen=True)
class StageSamples:
    stage: Stage
    samples: np.ndarray


def _stage_rng(seed: int, stage: Stage) -> np.random.Generator:
    # One independent stream per (seed, stage).
    return np.random.default_rng(np.random.SeedSequence([seed, int(stage)]))


def simulate_stage(cfg: MeasurementConfig, stage: Stage) -> StageSamples:
    stage = Stage(stage)
    sigma = math.sqrt(cfg.stage_variance(stage))
    samples = _stage_rng(cfg.seed, stage).standard_normal(cfg.n_samples) * sigma
    return StageSamples(stage, samples)


def estimate_variance(samples: StageSamples | np.ndarray) -> float:
    x = samples.samples if isinstance(samples, StageSamples) else np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {x.size}")
    return float(np.var(x, ddof=1))


@dataclass(frozen=True)
class ExcessNoiseEstimate:
    eps: float
    n0: float
    nu_el: float
    # Stage-3 variance did not exceed stage 2; eps reported as 0.
    clamped: bool


def estimate_excess_noise(v_el_hat: float, v_shot_hat: float, v_total_hat: float,
                          eta: float, t: float) -> ExcessNoiseEstimate:
    n0 = v_shot_hat - v_el_hat
    if not n0 > 0.0:
        raise CalibrationError(
            f"shot noise not resolved: v_shot={v_shot_hat} <= v_el={v_el_hat}")
    if not (0.0 < eta <= 1.0 and 0.0 < t <= 1.0):
        raise ParameterError("eta and t must lie in (0, 1]")
    excess = v_total_hat - v_shot_hat
    clamped = excess < 0.0
    eps = 0.0 if clamped else excess / (eta * t * n0)
    return ExcessNoiseEstimate(eps, n0, v_el_hat / n0, clamped)


def excess_noise_stderr(cfg: MeasurementConfig) -> float:
    """Delta-method standard error of the eps estimate for ``cfg``.

    Each stage variance estimate has variance 2 sigma^4 / (n - 1) and the
    stages are independent.
    """
    v1, v2, v3 = (cfg.stage_variance(s) for s in Stage)
    k = cfg.eta * cfg.t
    n0 = v2 - v1
    excess = v3 - v2
    grad = (excess / (k * n0 ** 2),
            -(n0 + excess) / (k * n0 ** 2),
            1.0 / (k * n0))
    var = sum(g * g * 2.0 * v * v / (cfg.n_samples - 1) for g, v in zip(grad, (v1, v2, v3)))
    return math.sqrt(var)


@dataclass(frozen=True)
class CalibrationReport:
    config: MeasurementConfig
    variances: tuple[float, float, float]
    estimate: ExcessNoiseEstimate
    stderr_eps: float
    stderr_n0: float
    stderr_nu_el: float

    def to_dict(self) -> dict:
        cfg, est = self.config, self.estimate
        return {
            "n_samples": cfg.n_samples,
            "seed": cfg.seed,
            "eta": cfg.eta,
            "t": cfg.t,
            "stage_variances": {s.name.lower(): v for s, v in zip(Stage, self.variances)},
            "nu_el_snu": {"planted": cfg.nu_el, "estimated": est.nu_el, "stderr": self.stderr_nu_el},
            "n0": {"planted": cfg.shot_variance_n0, "estimated": est.n0, "stderr": self.stderr_n0},
            "eps_snu": {"planted": cfg.eps_planted, "estimated": est.eps,
                        "stderr": self.stderr_eps, "clamped": est.clamped},
        }


def run_calibration(cfg: MeasurementConfig) -> CalibrationReport:
    """Simulate all three stages and estimate (nu_el, N0, eps)."""
    v_el, v_shot, v_tot = (estimate_variance(simulate_stage(cfg, s)) for s in Stage)
    est = estimate_excess_noise(v_el, v_shot, v_tot, cfg.eta, cfg.t)
    v1, v2, _ = (cfg.stage_variance(s) for s in Stage)
    dof = cfg.n_samples - 1
    se_n0 = math.sqrt(2.0 * (v1 * v1 + v2 * v2) / dof)
    n0 = v2 - v1
    # nu_el = v1 / (v2 - v1)
    se_nu = math.sqrt((v2 / n0 ** 2) ** 2 * 2 * v1 * v1 / dof
                      + (v1 / n0 ** 2) ** 2 * 2 * v2 * v2 / dof)
    return CalibrationReport(cfg, (v_el, v_shot, v_tot), est,
                             excess_noise_stderr(cfg), se_n0, se_nu)
