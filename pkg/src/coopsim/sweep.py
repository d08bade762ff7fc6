"""Full factorial sweep, behavioral-target measurement, and robustness trials.

Standard two-actor measurement protocol (noise off, adjustment dynamics,
deterministic; every number below is a protocol constant documented in
:class:`SweepProtocol`):

1. *Emergence run* -- both actors open at cooperation 0.5 against a lower
   starting norm of 0.2 (a cooperative opening: current behavior sits above
   the historical reference).  Baselines adapt slowly; reciprocity either
   amplifies the opening into a sustained climb or the system relaxes back
   toward the norm.  Target 1 passes when the mean action over the last
   five warm-up periods exceeds the 0.5 starting level by at least 0.05.
   Target 5 compares whole-run mean cooperation across trust/reciprocity
   variants of the same run.

2. *Forgiveness run* -- flat warm-up at 0.5 with k-window moving-average
   baselines; at the defection period the partner is scripted one period to
   0.0 (-0.5 stimulus) and pinned back at 0.5 afterwards.  Target 2 checks
   the gated response to the defection is negative; target 3 checks the
   observer's cooperation signal about the defector returns within
   tolerance inside 2k periods; target 6 checks every recorded bounded
   response against the +/-1 envelope.

3. *Differentiation pair* -- the forgiveness run at dependency 0.8 versus
   0.2; target 4 passes when the high-dependency response magnitude exceeds
   the low-dependency one by more than 1.5x.

Cells are pure functions of (configuration, protocol): aggregates are
independent of execution order and worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from multiprocessing import Pool
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .params import ReciprocityParams, TrustParams, reciprocity_sensitivity
from .rng import derive_seed, uniform
from .scenario import ScenarioConfig, SimConfig, symmetric_matrix
from .simulation import Trajectory, run
from .stats import (
    StatsSummary,
    bootstrap_ci,
    cohens_d,
    effect_size_label,
    paired_ttest,
    summarize_sample,
    wilcoxon_signed_rank,
)

GRID_KEYS = ("rho0", "eta", "kappa", "memory_k", "lambda_r", "t0", "d")

NO_RECOVERY = -1

#: Acceptance thresholds per behavioral target (rate of configurations).
TARGET_THRESHOLDS = {
    "t1": 0.85,
    "t2": 1.00,
    "t3": 0.80,
    "t4": 0.90,
    "t5": 0.90,
    "t6": 1.00,
}

TARGET_NAMES = {
    "t1": "Cooperation emergence",
    "t2": "Defection punishment",
    "t3": "Forgiveness dynamics",
    "t4": "Asymmetric differentiation",
    "t5": "Trust-reciprocity interaction",
    "t6": "Bounded responses",
}


@dataclass(frozen=True)
class SweepCell:
    """One parameter configuration of the two-actor protocol."""

    rho0: float = 1.0
    eta: float = 1.0
    kappa: float = 1.0
    memory_k: int = 5
    lambda_r: float = 1.0
    t0: float = 0.7
    d: float = 0.8


REFERENCE_CELL = SweepCell()


@dataclass(frozen=True)
class ParameterGrid:
    """Cartesian product of per-parameter levels, row-major in GRID_KEYS order."""

    levels: dict[str, tuple[float, ...]]

    def __post_init__(self) -> None:
        clean: dict[str, tuple[float, ...]] = {}
        for key in self.levels:
            if key not in GRID_KEYS:
                raise ConfigurationError(
                    f"unknown grid parameter {key!r}; expected one of {GRID_KEYS}"
                )
        for key in GRID_KEYS:
            if key in self.levels:
                vals = tuple(self.levels[key])
                if not vals:
                    raise ConfigurationError(f"grid parameter {key!r} has no levels")
                clean[key] = vals
        if not clean:
            raise ConfigurationError("grid defines no parameters")
        object.__setattr__(self, "levels", clean)

    @property
    def size(self) -> int:
        size = 1
        for vals in self.levels.values():
            size *= len(vals)
        return size

    def cell(self, index: int) -> SweepCell:
        if not 0 <= index < self.size:
            raise IndexError(index)
        chosen = {}
        rem = index
        for key in reversed(list(self.levels)):
            vals = self.levels[key]
            rem, pos = divmod(rem, len(vals))
            chosen[key] = vals[pos]
        if "memory_k" in chosen:
            chosen["memory_k"] = int(chosen["memory_k"])
        return replace(REFERENCE_CELL, **chosen)

    def rho0_extremes(self) -> tuple[float, float]:
        vals = self.levels.get("rho0", (REFERENCE_CELL.rho0,))
        return min(vals), max(vals)


FULL_GRID = ParameterGrid(
    {
        "rho0": (0.2, 0.4, 0.6, 0.8, 1.0),
        "eta": (0.5, 0.75, 1.0, 1.25, 1.5),
        "kappa": (0.5, 1.0, 1.5, 2.0, 3.0),
        "memory_k": (1, 2, 4, 8, 16),
        "t0": (0.3, 0.5, 0.7, 0.85, 0.95),
        "d": (0.2, 0.4, 0.6, 0.8, 1.0),
    }
)

WEIGHT_GRID = ParameterGrid(
    {
        "rho0": (0.5, 0.875, 1.25, 1.625, 2.0),
        "eta": (0.8, 1.1, 1.4, 1.7, 2.0),
        "kappa": (0.5, 0.875, 1.25, 1.625, 2.0),
        "memory_k": (1, 5, 10, 15, 20),
        "lambda_r": (0.5, 0.875, 1.25, 1.625, 2.0),
        "t0": (0.3, 0.45, 0.6, 0.75, 0.9),
    }
)

SMOKE_GRID = ParameterGrid(
    {
        "rho0": (0.2, 0.6, 1.0),
        "eta": (0.5, 1.0, 1.5),
        "kappa": (0.5, 1.5, 3.0),
        "memory_k": (1, 4, 16),
        "t0": (0.3, 0.7, 0.95),
        "d": (0.2, 0.6, 1.0),
    }
)

BUILTIN_GRIDS = {"full": FULL_GRID, "weights": WEIGHT_GRID, "smoke": SMOKE_GRID}


@dataclass(frozen=True)
class SweepProtocol:
    """Constants of the standard two-actor measurement protocol.

    The dynamics rates are protocol-level calibrations, not scenario
    defaults: the emergence run uses a faster adjustment rate, a token
    reversion cost, and slow norm adaptation so that a cooperative opening
    either compounds or dies out within the 30-period warm-up window.
    """

    warmup: int = 30
    start_action: float = 0.5
    start_norm: float = 0.2
    adjust_rate: float = 0.30
    decay: float = 0.005
    baseline_rate: float = 0.04
    emergence_margin: float = 0.05
    steady_window: int = 5
    defection: float = -0.5
    recovery_window_pad: int = 5
    recovery_tol_frac: float = 0.02
    recovery_sustain: int = 3
    diff_high: float = 0.8
    diff_low: float = 0.2
    t4_ratio: float = 1.5
    t5_high_trust: float = 0.9
    t5_low_trust: float = 0.3


@dataclass(frozen=True)
class CellResult:
    """Per-configuration measurements and target verdicts."""

    index: int
    cell: SweepCell
    t1: bool
    t2: bool
    t3: bool
    t4: bool
    t5: bool
    t6: bool
    steady_level: float
    coop_mean: float
    coop_t5_high: float
    coop_t5_low_trust: float
    coop_t5_low_rho: float
    tau_f: int
    response_high: float
    response_low: float
    ratio: float
    rho_ratio_error: float
    max_abs_response: float

    @property
    def all_targets(self) -> bool:
        return self.t1 and self.t2 and self.t3 and self.t4 and self.t5 and self.t6


def _trust_params(cell: SweepCell, trust: TrustParams) -> TrustParams:
    return replace(trust, t0=cell.t0)


def _emergence_scenario(cell: SweepCell, protocol: SweepProtocol,
                        trust: TrustParams) -> ScenarioConfig:
    return ScenarioConfig(
        labels=("A", "B"),
        d=symmetric_matrix(2, cell.d),
        recip=ReciprocityParams(rho0=cell.rho0, eta=cell.eta, kappa=cell.kappa,
                                memory_k=cell.memory_k, lambda_r=cell.lambda_r,
                                omega_amp=1.0),
        trust=_trust_params(cell, trust),
        a_max=(1.0, 1.0),
        a_init=(protocol.start_action, protocol.start_action),
        baseline_init=(protocol.start_norm, protocol.start_norm),
        baseline_mode="adaptive",
    )


def _forgiveness_scenario(cell: SweepCell, protocol: SweepProtocol,
                          trust: TrustParams) -> ScenarioConfig:
    return ScenarioConfig(
        labels=("A", "B"),
        d=symmetric_matrix(2, cell.d),
        recip=ReciprocityParams(rho0=cell.rho0, eta=cell.eta, kappa=cell.kappa,
                                memory_k=cell.memory_k, lambda_r=cell.lambda_r,
                                omega_amp=1.0),
        trust=_trust_params(cell, trust),
        a_max=(1.0, 1.0),
        a_init=(protocol.start_action, protocol.start_action),
        baseline_init=(protocol.start_action, protocol.start_action),
        baseline_mode="moving_average",
    )


def _protocol_sim(protocol: SweepProtocol, horizon: int) -> SimConfig:
    return SimConfig(
        horizon=horizon, mode="adjustment",
        adjust_rate=protocol.adjust_rate, decay=protocol.decay,
        baseline_rate=protocol.baseline_rate, noise_sigma=0.0, seed=0,
    )


def _run_emergence(cell: SweepCell, protocol: SweepProtocol,
                   trust: TrustParams) -> Trajectory:
    scenario = _emergence_scenario(cell, protocol, trust)
    return run(scenario, _protocol_sim(protocol, protocol.warmup))


def _run_forgiveness(cell: SweepCell, protocol: SweepProtocol,
                     trust: TrustParams) -> tuple[Trajectory, int]:
    """Forgiveness stimulus run; returns (trajectory, defection period)."""
    scenario = _forgiveness_scenario(cell, protocol, trust)
    t_star = protocol.warmup + 1
    horizon = t_star + 2 * cell.memory_k + protocol.recovery_window_pad
    level = protocol.start_action
    script = {1: {p: (level + protocol.defection if p == t_star else level)
                  for p in range(1, horizon + 1)}}
    traj = run(scenario, _protocol_sim(protocol, horizon), script=script)
    return traj, t_star


def signal_recovery_time(
    signals: Sequence[float],
    t_star: int,
    tol: float,
    sustain: int,
) -> int:
    """Periods from the defection until the signal settles within tolerance.

    ``signals`` is the per-period series of the observer's cooperation
    signal about the defector (1-indexed by position + 1).  Recovery is the
    first period r >= t_star with |signal| < tol sustained for ``sustain``
    consecutive periods; returns r - t_star, or NO_RECOVERY if the series
    never settles within the horizon.
    """
    n = len(signals)
    for r in range(t_star, n - sustain + 2):
        if all(abs(signals[r - 1 + j]) < tol for j in range(sustain)):
            return r - t_star
    return NO_RECOVERY


def measure_forgiveness_time(
    cell: SweepCell,
    protocol: SweepProtocol = SweepProtocol(),
    trust: TrustParams = TrustParams(),
    defection: Optional[float] = None,
) -> int:
    """Forgiveness time of the standard protocol at the given configuration."""
    if defection is not None:
        protocol = replace(protocol, defection=defection)
    if protocol.defection == 0.0:
        return 0
    traj, t_star = _run_forgiveness(cell, protocol, trust)
    tol = protocol.recovery_tol_frac * 1.0
    return signal_recovery_time(
        traj.signal[:, 0, 1].tolist(), t_star, tol, protocol.recovery_sustain
    )


def measure_cell(
    index: int,
    cell: SweepCell,
    protocol: SweepProtocol = SweepProtocol(),
    trust: TrustParams = TrustParams(),
    rho0_extremes: tuple[float, float] = (0.2, 1.0),
) -> CellResult:
    """Run the full protocol for one configuration and score all six targets."""
    max_abs = 0.0

    def track(traj: Trajectory) -> Trajectory:
        nonlocal max_abs
        phi = np.abs(np.tanh(cell.kappa * traj.signal))
        max_abs = max(max_abs, float(phi.max()))
        return traj

    # Target 1 + coop level: emergence run.
    emergence = track(_run_emergence(cell, protocol, trust))
    steady = float(emergence.actions[-protocol.steady_window :].mean())
    t1 = steady >= protocol.start_action + protocol.emergence_margin
    coop_mean = float(emergence.actions.mean())

    # Target 5: trust/reciprocity variants of the emergence run.
    rho_lo, rho_hi = rho0_extremes

    def variant(t0: float, rho0: float) -> float:
        v = replace(cell, t0=t0, rho0=rho0)
        return float(track(_run_emergence(v, protocol, trust)).actions.mean())

    coop_hh = variant(protocol.t5_high_trust, rho_hi)
    coop_lh = variant(protocol.t5_low_trust, rho_hi)
    coop_hl = variant(protocol.t5_high_trust, rho_lo)
    t5 = coop_hh > coop_lh and coop_hh > coop_hl

    # Targets 2, 3: forgiveness stimulus run.
    forgiveness, t_star = _run_forgiveness(cell, protocol, trust)
    track(forgiveness)
    response_at_defection = float(forgiveness.recip_term[t_star - 1, 0, 1])
    t2 = response_at_defection < 0.0
    tol = protocol.recovery_tol_frac * 1.0
    tau_f = signal_recovery_time(
        forgiveness.signal[:, 0, 1].tolist(), t_star, tol, protocol.recovery_sustain
    )
    t3 = tau_f != NO_RECOVERY and tau_f <= 2 * cell.memory_k

    # Target 4: dependency differentiation pair.
    resp = {}
    for d_level in (protocol.diff_high, protocol.diff_low):
        traj, ts = _run_forgiveness(replace(cell, d=d_level), protocol, trust)
        track(traj)
        resp[d_level] = abs(float(traj.recip_term[ts - 1, 0, 1]))
    response_high = resp[protocol.diff_high]
    response_low = resp[protocol.diff_low]
    ratio = response_high / response_low if response_low > 0 else math.inf
    t4 = ratio > protocol.t4_ratio

    # Sensitivity-ratio identity: the rho component of the ratio is exactly
    # (diff_high / diff_low) ** eta.
    rho_hi_s = reciprocity_sensitivity(cell.rho0, protocol.diff_high, cell.eta)
    rho_lo_s = reciprocity_sensitivity(cell.rho0, protocol.diff_low, cell.eta)
    expected = (protocol.diff_high / protocol.diff_low) ** cell.eta
    rho_ratio_error = abs(rho_hi_s / rho_lo_s - expected) if rho_lo_s > 0 else math.inf

    t6 = max_abs <= 1.0

    return CellResult(
        index=index, cell=cell,
        t1=t1, t2=t2, t3=t3, t4=t4, t5=t5, t6=t6,
        steady_level=steady, coop_mean=coop_mean,
        coop_t5_high=coop_hh, coop_t5_low_trust=coop_lh, coop_t5_low_rho=coop_hl,
        tau_f=tau_f,
        response_high=response_high, response_low=response_low, ratio=ratio,
        rho_ratio_error=rho_ratio_error, max_abs_response=max_abs,
    )


def _measure_indexed(args) -> CellResult:
    index, cell, protocol, trust, extremes = args
    return measure_cell(index, cell, protocol, trust, extremes)


def run_sweep(
    grid: ParameterGrid,
    protocol: SweepProtocol = SweepProtocol(),
    trust: TrustParams = TrustParams(),
    processes: Optional[int] = None,
) -> list[CellResult]:
    """Measure every configuration of the grid; results ordered by index."""
    extremes = grid.rho0_extremes()
    jobs = [(i, grid.cell(i), protocol, trust, extremes) for i in range(grid.size)]
    if processes is not None and processes <= 1:
        results = [_measure_indexed(j) for j in jobs]
    else:
        with Pool(processes=processes) as pool:
            results = pool.map(_measure_indexed, jobs, chunksize=64)
    results.sort(key=lambda r: r.index)
    return results


@dataclass(frozen=True)
class TargetReport:
    """Achievement rates per behavioral target against their thresholds."""

    rows: tuple[dict, ...]

    @property
    def all_pass(self) -> bool:
        return all(r["pass"] for r in self.rows)

    def row(self, target: str) -> dict:
        for r in self.rows:
            if r["target"] == target:
                return r
        raise KeyError(target)


def measure_targets(
    results: Sequence[CellResult],
    thresholds: dict[str, float] = TARGET_THRESHOLDS,
) -> TargetReport:
    total = len(results)
    rows = []
    for key in ("t1", "t2", "t3", "t4", "t5", "t6"):
        achieved = sum(1 for r in results if getattr(r, key))
        rate = achieved / total if total else 0.0
        rows.append(
            {
                "target": key,
                "name": TARGET_NAMES[key],
                "achieved": achieved,
                "total": total,
                "rate": rate,
                "threshold": thresholds[key],
                "pass": rate >= thresholds[key],
            }
        )
    return TargetReport(rows=tuple(rows))


def differentiation_stats(results: Sequence[CellResult], seed: int = 0) -> StatsSummary:
    """Paired high-vs-low dependency analysis across the grid.

    The t test and effect size compare the per-cell response magnitudes;
    the Wilcoxon test checks the ratio distribution against the 1.5
    differentiation threshold (one sided); the bootstrap interval covers
    the mean ratio.
    """
    high = [r.response_high for r in results]
    low = [r.response_low for r in results]
    ratios = [r.ratio for r in results if math.isfinite(r.ratio)]
    t, df, p, _ = paired_ttest(high, low)
    d, _ = cohens_d(high, low)
    lo, hi = bootstrap_ci(ratios, seed=seed)
    w_stat, w_p, _ = wilcoxon_signed_rank(ratios, 1.5)
    arr = np.asarray(ratios)
    return StatsSummary(
        mean=float(arr.mean()), sd=float(arr.std(ddof=1)),
        t_stat=t, df=df, p_value=p, cohens_d=d,
        ci_lo=lo, ci_hi=hi, wilcoxon_stat=w_stat, wilcoxon_p=w_p,
    )


# Real-valued trust-block fields perturbed in robustness trials.
_TRUST_PERTURB_FIELDS = (
    "t0", "lambda_plus", "lambda_minus", "xi", "mu_r", "delta_r",
    "t_max", "theta_r", "lambda_t",
)
# Legal ranges used for clamping perturbed values.
_TRUST_RANGES = {
    "t0": (0.0, 1.0),
    "lambda_plus": (1e-6, 0.999999),
    "lambda_minus": (1e-6, 0.999999),
    "xi": (0.0, math.inf),
    "mu_r": (1e-6, 0.999999),
    "delta_r": (1e-6, 0.999999),
    "t_max": (1e-6, 1.0),
    "theta_r": (0.0, 1.0),
    "lambda_t": (0.0, math.inf),
}
_CELL_PERTURB_FIELDS = ("rho0", "eta", "kappa", "lambda_r", "t0", "d")
_CELL_RANGES = {
    "rho0": (0.0, math.inf),
    "eta": (0.0, math.inf),
    "kappa": (1e-9, math.inf),
    "lambda_r": (0.0, math.inf),
    "t0": (0.0, 1.0),
    "d": (0.0, 1.0),
}


@dataclass(frozen=True)
class MonteCarloTrial:
    trial: int
    all_targets: bool
    ratio: float
    clamped: tuple[str, ...]


@dataclass(frozen=True)
class MonteCarloReport:
    trials: tuple[MonteCarloTrial, ...]
    perturb: float
    seed: int

    @property
    def n(self) -> int:
        return len(self.trials)

    @property
    def all_targets_rate(self) -> float:
        return sum(1 for t in self.trials if t.all_targets) / self.n

    @property
    def ratios(self) -> np.ndarray:
        return np.array([t.ratio for t in self.trials])

    @property
    def ratio_threshold_rate(self) -> float:
        return float((self.ratios >= 1.5).mean())

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min())

    @property
    def clamped_trials(self) -> int:
        return sum(1 for t in self.trials if t.clamped)


def _perturb_value(value, lo, hi, eps):
    raw = value * (1.0 + eps)
    clamped = min(hi, max(lo, raw))
    return clamped, clamped != raw


def monte_carlo_trial(
    trial: int,
    base_cell: SweepCell,
    base_trust: TrustParams,
    protocol: SweepProtocol,
    perturb: float,
    seed: int,
    rho0_extremes: tuple[float, float],
) -> MonteCarloTrial:
    """One robustness trial: every real-valued parameter scaled by U(1-p, 1+p).

    The memory window is an integer and is left untouched.  Perturbed
    values that leave their legal range are clamped and flagged.
    """
    trial_seed = derive_seed(seed, trial)
    clamped: list[str] = []
    stream = 0

    def eps() -> float:
        nonlocal stream
        u = uniform(trial_seed, stream, trial)
        stream += 1
        return (2.0 * u - 1.0) * perturb

    cell_kwargs = {}
    for name in _CELL_PERTURB_FIELDS:
        lo, hi = _CELL_RANGES[name]
        val, was_clamped = _perturb_value(getattr(base_cell, name), lo, hi, eps())
        cell_kwargs[name] = val
        if was_clamped:
            clamped.append(name)
    cell = replace(base_cell, **cell_kwargs)

    trust_kwargs = {}
    for name in _TRUST_PERTURB_FIELDS:
        if name == "t0":
            continue  # coupled to the cell's t0
        lo, hi = _TRUST_RANGES[name]
        val, was_clamped = _perturb_value(getattr(base_trust, name), lo, hi, eps())
        trust_kwargs[name] = val
        if was_clamped:
            clamped.append(f"trust.{name}")
    trust = replace(base_trust, **trust_kwargs)

    result = measure_cell(trial, cell, protocol, trust, rho0_extremes)
    return MonteCarloTrial(
        trial=trial, all_targets=result.all_targets, ratio=result.ratio,
        clamped=tuple(clamped),
    )


def _mc_indexed(args) -> MonteCarloTrial:
    return monte_carlo_trial(*args)


def monte_carlo(
    base_cell: SweepCell = REFERENCE_CELL,
    trials: int = 2000,
    perturb: float = 0.15,
    seed: int = 42,
    protocol: SweepProtocol = SweepProtocol(),
    base_trust: TrustParams = TrustParams(),
    processes: Optional[int] = None,
    rho0_extremes: tuple[float, float] = (0.2, 1.0),
) -> MonteCarloReport:
    """Robustness analysis around the reference configuration."""
    jobs = [
        (t, base_cell, base_trust, protocol, perturb, seed, rho0_extremes)
        for t in range(trials)
    ]
    if processes is not None and processes <= 1:
        out = [_mc_indexed(j) for j in jobs]
    else:
        with Pool(processes=processes) as pool:
            out = pool.map(_mc_indexed, jobs, chunksize=32)
    out.sort(key=lambda t: t.trial)
    return MonteCarloReport(trials=tuple(out), perturb=perturb, seed=seed)
