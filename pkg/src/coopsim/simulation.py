"""Sequential repeated-interaction engine.

Each period: observe partners' actions against per-actor baselines, form
cooperation signals, record the trust-gated reciprocity terms, update the
two-layer trust state, then advance actions by the selected rule:

- ``adjustment`` mode moves each action by the sum of its gated
  reciprocity terms at the adjustment rate, minus mean reversion toward
  the actor's prevailing norm, plus optional Gaussian noise and scheduled
  shocks, clipped to bounds:

      a_i' = clip(a_i + adjust_rate * sum_j term_ij
                  - decay * (a_i - norm_i) + noise + shock)

- ``best_response`` mode replaces the action update with a fresh
  equilibrium solve given the current history and trust.

Reference levels.  The *cooperation signal* recorded per dyad and driving
the trust/reputation updates is always the canonical bounded-memory
observation: deviation from the k-window moving average of the observed
actor's own history (the configured initial baseline until history
exists).  The *action rule's* driving signal follows the scenario's
``baseline_mode``: the same windowed signal, the deviation from the slowly
adapting per-actor norm, or the deviation from a fixed reference.  The
norm -- also the anchor of the mean-reversion term -- moves toward the
latest actions at ``baseline_rate`` each period (rate 0 pins it).  Noise
comes from the counter-based generator, one stream per actor, counter =
period, so runs are bit-reproducible and order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import ConfigurationError, UndefinedBaselineError
from .reciprocity import History, moving_average
from .rng import normal
from .scenario import ScenarioConfig, SimConfig


@dataclass
class Trajectory:
    """Recorded per-period state of one run.

    Arrays are indexed by period-1 on the first axis.  ``trust`` and
    ``reputation`` hold the start-of-period states (the values in force
    when that period's signals were observed); ``signal[t, i, j]`` is i's
    view of j, and ``recip_term`` the corresponding gated reciprocity term
    that drives the next action update.
    """

    labels: tuple[str, ...]
    actions: np.ndarray
    baselines: np.ndarray  # windowed signal baselines in force each period
    norms: np.ndarray  # adaptive per-actor norms (mean-reversion anchors)
    trust: np.ndarray
    reputation: np.ndarray
    signal: np.ndarray  # canonical windowed cooperation signals
    recip_term: np.ndarray  # gated terms on the action rule's driving signal
    converged: np.ndarray  # best-response mode solve status per period

    @property
    def horizon(self) -> int:
        return self.actions.shape[0]

    @property
    def n(self) -> int:
        return self.actions.shape[1]


class _EngineState:
    """Mutable state threaded through one run; single-writer by design."""

    def __init__(self, scenario: ScenarioConfig):
        n = scenario.n
        self.actions = np.array(scenario.a_init, dtype=float)
        self.adaptive_baseline = np.array(scenario.baseline_init, dtype=float)
        self.history = History(n, pre=scenario.pre_history)
        self.trust = np.full((n, n), scenario.trust.t0, dtype=float)
        np.fill_diagonal(self.trust, 1.0)
        self.reputation = np.zeros((n, n), dtype=float)


def _windowed_baselines(state: _EngineState, scenario: ScenarioConfig, t: int) -> np.ndarray:
    """Moving-average baseline per observed actor (pre-history included);
    the configured initial level before any history exists."""
    n = scenario.n
    k = scenario.recip.memory_k
    out = np.empty(n)
    for j in range(n):
        try:
            out[j] = moving_average(state.history, j, t, k)
        except UndefinedBaselineError:
            out[j] = scenario.baseline_init[j]
    return out


def _rule_baselines(state: _EngineState, scenario: ScenarioConfig,
                    windowed: np.ndarray) -> np.ndarray:
    """Baseline for the action rule's driving signal, per baseline_mode."""
    if scenario.baseline_mode == "fixed":
        return np.array(scenario.baseline_init, dtype=float)
    if scenario.baseline_mode == "adaptive":
        return state.adaptive_baseline.copy()
    return windowed


def _update_trust_matrices(
    state: _EngineState, s: np.ndarray, scenario: ScenarioConfig
) -> None:
    """Vectorized two-layer update: reputation, then ceiling, then trust."""
    p = scenario.trust
    d = scenario.d.values
    rep = state.reputation
    tr = state.trust

    if p.deadband > 0.0:
        s = np.where(np.abs(s) <= p.deadband, 0.0, s)
    violating = s < 0.0
    rep_next = np.where(
        violating,
        rep + p.mu_r * (-s) * (1.0 - rep),
        rep * (1.0 - p.delta_r),
    )
    np.clip(rep_next, 0.0, 1.0, out=rep_next)

    ceiling = np.minimum(p.t_max, 1.0 - p.theta_r * rep_next)
    building = s > 0.0
    dt = np.where(
        building,
        p.lambda_plus * s * np.maximum(0.0, ceiling - tr),
        p.lambda_minus * s * tr * (1.0 + p.xi * d),
    )
    tr_next = np.clip(tr + dt, 0.0, ceiling)

    mask = ~np.eye(scenario.n, dtype=bool)
    rep[mask] = rep_next[mask]
    tr[mask] = tr_next[mask]


def run(
    scenario: ScenarioConfig,
    sim: SimConfig,
    solver=None,
    script: Optional[Mapping[int, Mapping[int, float]]] = None,
) -> Trajectory:
    """Simulate one full trajectory.

    ``script`` optionally pins actors to fixed actions: ``{actor: {period:
    value}}`` overrides the dynamics (and suppresses that actor's noise for
    the scripted period); the validation protocol uses this to inject
    controlled defection stimuli.
    """
    n = scenario.n
    if scenario.econ.n != n:
        raise ConfigurationError("economy parameters do not match the actor count")
    if sim.mode == "best_response" and solver is None:
        from .solver import SolverConfig

        solver = SolverConfig()
    for shock in sim.shocks:
        if not 0 <= shock.actor < n:
            raise ConfigurationError(f"shock targets unknown actor {shock.actor}")
        if shock.period > sim.horizon:
            raise ConfigurationError(
                f"shock at period {shock.period} is beyond the horizon {sim.horizon}"
            )

    horizon = sim.horizon
    state = _EngineState(scenario)
    a_max = np.array(scenario.a_max, dtype=float)
    d = scenario.d.values
    recip = scenario.recip
    with np.errstate(divide="ignore"):
        rho = np.where(d > 0.0, recip.rho0 * d**recip.eta,
                       recip.rho0 if recip.eta == 0.0 else 0.0)
    gate = recip.lambda_r * (1.0 + recip.omega_amp * d) * rho
    off_diag = ~np.eye(n, dtype=bool)

    shocks_by_period: dict[int, list] = {}
    for shock in sim.shocks:
        shocks_by_period.setdefault(shock.period, []).append(shock)

    # Period-1 actions may themselves be scripted or shocked.
    if script:
        for i, per in script.items():
            if 1 in per:
                state.actions[i] = per[1]
    for shock in shocks_by_period.get(1, ()):
        state.actions[shock.actor] += shock.delta
    np.clip(state.actions, 0.0, a_max, out=state.actions)

    traj = Trajectory(
        labels=scenario.labels,
        actions=np.zeros((horizon, n)),
        baselines=np.zeros((horizon, n)),
        norms=np.zeros((horizon, n)),
        trust=np.zeros((horizon, n, n)),
        reputation=np.zeros((horizon, n, n)),
        signal=np.zeros((horizon, n, n)),
        recip_term=np.zeros((horizon, n, n)),
        converged=np.ones(horizon, dtype=bool),
    )

    for t in range(1, horizon + 1):
        b_win = _windowed_baselines(state, scenario, t)
        s_win = np.tile(state.actions - b_win, (n, 1))  # s[i, j] = a_j - baseline_j
        np.fill_diagonal(s_win, 0.0)
        b_rule = _rule_baselines(state, scenario, b_win)
        s_rule = np.tile(state.actions - b_rule, (n, 1))
        np.fill_diagonal(s_rule, 0.0)
        term = gate * state.trust * np.tanh(recip.kappa * s_rule)
        np.fill_diagonal(term, 0.0)

        idx = t - 1
        traj.actions[idx] = state.actions
        traj.baselines[idx] = b_win
        traj.norms[idx] = state.adaptive_baseline
        traj.trust[idx] = state.trust
        traj.reputation[idx] = state.reputation
        traj.signal[idx] = s_win
        traj.recip_term[idx] = term

        _update_trust_matrices(state, s_win, scenario)

        if t == horizon:
            break

        if sim.mode == "adjustment":
            push = sim.adjust_rate * term.sum(axis=1)
            pull = sim.decay * (state.actions - state.adaptive_baseline)
            nxt = state.actions + push - pull
            if sim.noise_sigma > 0.0:
                nxt = nxt + sim.noise_sigma * np.array(
                    [normal(sim.seed, i, t + 1) for i in range(n)]
                )
        else:
            from .solver import solve_equilibrium

            # History through period t is available when choosing t+1 actions.
            state.history.append(state.actions)
            result = solve_equilibrium(
                scenario, state.history, state.trust, solver,
                warm_start=state.actions, period=t + 1,
            )
            traj.converged[idx + 1] = result.converged
            nxt = np.array(result.actions, dtype=float)

        for shock in shocks_by_period.get(t + 1, ()):
            nxt[shock.actor] += shock.delta
        if script:
            for i, per in script.items():
                if t + 1 in per:
                    nxt[i] = per[t + 1]
        np.clip(nxt, 0.0, a_max, out=nxt)

        if sim.mode == "adjustment":
            state.history.append(state.actions)
        state.adaptive_baseline += sim.baseline_rate * (
            state.actions - state.adaptive_baseline
        )
        state.actions = nxt

    return traj


def step_best_response(
    scenario: ScenarioConfig,
    actions,
    trust,
    history: Optional[History] = None,
    solver=None,
    period: int = 1,
):
    """Single best-response step: the period equilibrium from a warm start."""
    from .solver import SolverConfig, solve_equilibrium

    if solver is None:
        solver = SolverConfig()
    return solve_equilibrium(
        scenario, history, np.asarray(trust, dtype=float), solver,
        warm_start=actions, period=period,
    )


def step_adjustment(
    scenario: ScenarioConfig, sim: SimConfig, actions, baselines, trust,
    norms=None,
) -> np.ndarray:
    """Single adjustment-rule step from explicit state (no noise, no shocks).

    ``baselines`` are the signal baselines; ``norms`` are the
    mean-reversion anchors (defaulting to the baselines).  Exposed for
    direct verification of the update formula; the engine loop applies
    exactly this arithmetic.
    """
    n = scenario.n
    a = np.asarray(actions, dtype=float)
    b = np.asarray(baselines, dtype=float)
    anchors = b if norms is None else np.asarray(norms, dtype=float)
    tr = np.asarray(trust, dtype=float)
    d = scenario.d.values
    recip = scenario.recip
    rho = np.where(d > 0.0, recip.rho0 * d**recip.eta,
                   recip.rho0 if recip.eta == 0.0 else 0.0)
    gate = recip.lambda_r * (1.0 + recip.omega_amp * d) * rho
    s = np.tile(a - b, (n, 1))
    np.fill_diagonal(s, 0.0)
    term = gate * tr * np.tanh(recip.kappa * s)
    np.fill_diagonal(term, 0.0)
    nxt = a + sim.adjust_rate * term.sum(axis=1) - sim.decay * (a - anchors)
    return np.clip(nxt, 0.0, np.array(scenario.a_max))
