"""Iterative best-response solver for reciprocity-augmented equilibria.

Each iteration evaluates every actor's best response on a finite action
grid against the partners' previous-iterate actions (simultaneous/Jacobi
updates, which preserve symmetry exactly), starting from the previous
period's profile, until the sup-norm action change drops below tolerance.
Non-convergence returns the last iterate, flagged.

Best-response objective.  The literal reciprocity term of the period
utility depends only on partners' signals, so it is a constant in the
optimizer's own action and cannot move equilibria.  What makes conditional
cooperation strategically relevant is that an actor's own deviation from
its recent average is the signal partners reciprocate next.  The solver
therefore evaluates the reciprocity component at the candidate action's
own signal:

    objective(a_i) = pi_i(a) + sum_j D_ij (1 + lambda_t T_ij) pi_j(a)
                     + sum_j lambda_r T_ij (1 + omega D_ij) rho_ij
                           * tanh(kappa * (a_i - own_avg_i))

whose marginal at the neutral point is lambda_r * T * (1 + omega D) * rho
* kappa -- the anticipated-reciprocity margin that the cooperation
threshold ``critical_rho`` is built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import UndefinedBaselineError
from .reciprocity import History, moving_average
from .scenario import ScenarioConfig
from .utility import individual_value, private_payoff, team_utility

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    """Iteration and grid controls for one equilibrium solve.

    ``refine`` adds a golden-section pass in the +/- one-step bracket of
    the grid winner; the refined action therefore always agrees with the
    grid argmax within one step.
    """

    max_iters: int = 100
    tol: float = 1e-6
    grid_points: int = 201
    refine: bool = False

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.grid_points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.grid_points}")


@dataclass(frozen=True)
class EquilibriumResult:
    actions: tuple[float, ...]
    converged: bool
    iterations: int
    residual: float


def argmax_on_grid(fn, grid: Sequence[float]) -> float:
    """Grid point maximizing ``fn``; ties break toward the smallest action."""
    best_x = None
    best_v = -math.inf
    for x in grid:
        v = fn(x)
        if v > best_v + 1e-12:
            best_v = v
            best_x = x
    return float(best_x)


def _own_averages(
    scenario: ScenarioConfig, history: Optional[History], period: int
) -> np.ndarray:
    """Each actor's recent-average action, the reference for its own signal."""
    n = scenario.n
    k = scenario.recip.memory_k
    out = np.array(scenario.baseline_init, dtype=float)
    if history is not None:
        t = min(period, len(history) + 1)
        for j in range(n):
            try:
                out[j] = moving_average(history, j, t, k)
            except UndefinedBaselineError:
                pass
    return out


def _anticipation_gate(i: int, scenario: ScenarioConfig, trust_row: np.ndarray) -> float:
    """Total weight on the anticipated own-signal response for actor i."""
    recip = scenario.recip
    d = scenario.d.values
    gate = 0.0
    for j in range(scenario.n):
        if j == i:
            continue
        gate += (
            recip.lambda_r
            * float(trust_row[j])
            * (1.0 + recip.omega_amp * d[i, j])
            * recip.sensitivity(d[i, j])
        )
    return gate


def _objective(
    i: int,
    a_i: float,
    actions: np.ndarray,
    own_avg: float,
    trust_row: np.ndarray,
    scenario: ScenarioConfig,
) -> float:
    """Scalar best-response objective (reference path, used by the oracle)."""
    a = actions.copy()
    a[i] = a_i
    tr = scenario.trust
    d = scenario.d.values
    if scenario.team is not None and i in scenario.team.members:
        total = team_utility(i, a, scenario.team)
    else:
        total = private_payoff(i, a, scenario.econ)
        for j in range(scenario.n):
            if j == i:
                continue
            total += d[i, j] * (1.0 + tr.lambda_t * float(trust_row[j])) * private_payoff(
                j, a, scenario.econ
            )
    total += _anticipation_gate(i, scenario, trust_row) * math.tanh(
        scenario.recip.kappa * (a_i - own_avg)
    )
    return total


def _objective_grid(
    i: int,
    grid: np.ndarray,
    actions: np.ndarray,
    own_avg: float,
    trust_row: np.ndarray,
    scenario: ScenarioConfig,
) -> np.ndarray:
    """Vectorized objective over a candidate grid for actor i."""
    econ = scenario.econ
    tr = scenario.trust
    d = scenario.d.values
    n = scenario.n
    others = [j for j in range(n) if j != i]

    if scenario.team is not None and i in scenario.team.members:
        team = scenario.team
        member_sum = sum(actions[m] for m in team.members if m != i)
        efforts = member_sum + grid
        q = team.omega_prod * efforts**team.beta_team
        pos = team.members.index(i)
        theta_i = team.loyalty[pos]
        total = q / len(team.members) - team.unit_cost * (1.0 - team.phi_c * theta_i) * grid
        mates = [m for m in team.members if m != i]
        if mates:
            mate_sum = q / len(team.members) * len(mates) - team.unit_cost * sum(
                actions[m] for m in mates
            )
            if team.teammate_payoff == "mean":
                mate_sum = mate_sum / len(mates)
            total = total + team.phi_b * theta_i * mate_sum
    else:
        if econ.value_form == "logarithmic":
            f_own = econ.theta_v * np.log1p(grid)
        else:
            f_own = grid**econ.power_beta
        f_others = sum(individual_value(actions[j], econ) for j in others)
        if econ.gamma > 0.0 and all(actions[j] > 0.0 for j in others):
            prod_others = 1.0
            for j in others:
                prod_others *= actions[j]
            synergy = econ.gamma * (grid * prod_others) ** (1.0 / n)
        else:
            synergy = np.zeros_like(grid)
        pi_own = econ.endowments[i] - grid + f_own + econ.alpha[i] * synergy
        total = pi_own
        for j in others:
            pi_j = (
                econ.endowments[j]
                - actions[j]
                + individual_value(actions[j], econ)
                + econ.alpha[j] * synergy
            )
            total = total + d[i, j] * (1.0 + tr.lambda_t * float(trust_row[j])) * pi_j

    total = total + _anticipation_gate(i, scenario, trust_row) * np.tanh(
        scenario.recip.kappa * (grid - own_avg)
    )
    return total


def _golden_refine(fn, lo: float, hi: float, iters: int = 60) -> float:
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    e = a + _INV_GOLDEN * (b - a)
    fc, fe = fn(c), fn(e)
    for _ in range(iters):
        if fc > fe:
            b, e, fe = e, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_GOLDEN * (b - a)
            fe = fn(e)
        if b - a < 1e-12 * max(1.0, abs(b)):
            break
    return 0.5 * (a + b)


def _best_response_value(
    i: int,
    actions: np.ndarray,
    own_avg: float,
    trust_row: np.ndarray,
    scenario: ScenarioConfig,
    grid: np.ndarray,
    refine: bool,
) -> float:
    values = _objective_grid(i, grid, actions, own_avg, trust_row, scenario)
    # Smallest maximizing grid point (tie-break toward less action).
    best = float(values.max())
    idx = int(np.nonzero(values > best - 1e-12)[0][0])
    x = float(grid[idx])
    if not refine:
        return x
    lo = float(grid[max(0, idx - 1)])
    hi = float(grid[min(len(grid) - 1, idx + 1)])
    xr = _golden_refine(
        lambda v: _objective(i, v, actions, own_avg, trust_row, scenario), lo, hi
    )
    return xr if _objective(i, xr, actions, own_avg, trust_row, scenario) >= best else x


def best_response(
    i: int,
    actions: Sequence[float],
    scenario: ScenarioConfig,
    trust: np.ndarray,
    history: Optional[History] = None,
    solver: SolverConfig = SolverConfig(),
    period: int = 1,
) -> float:
    """Best response of actor i to the given partner actions."""
    arr = np.asarray(actions, dtype=float)
    own_avg = float(_own_averages(scenario, history, period)[i])
    grid = np.linspace(0.0, scenario.a_max[i], solver.grid_points)
    return _best_response_value(i, arr, own_avg, trust[i], scenario, grid, solver.refine)


def solve_equilibrium(
    scenario: ScenarioConfig,
    history: Optional[History],
    trust: np.ndarray,
    solver: SolverConfig = SolverConfig(),
    warm_start: Optional[Sequence[float]] = None,
    period: int = 1,
) -> EquilibriumResult:
    """Iterate simultaneous best responses until the profile settles."""
    n = scenario.n
    actions = np.array(
        warm_start if warm_start is not None else scenario.a_init, dtype=float
    )
    own_avg = _own_averages(scenario, history, period)
    grids = [np.linspace(0.0, scenario.a_max[i], solver.grid_points) for i in range(n)]

    residual = math.inf
    for it in range(1, solver.max_iters + 1):
        nxt = np.empty(n)
        for i in range(n):
            nxt[i] = _best_response_value(
                i, actions, float(own_avg[i]), trust[i], scenario, grids[i], solver.refine
            )
        residual = float(np.max(np.abs(nxt - actions)))
        actions = nxt
        if residual < solver.tol:
            return EquilibriumResult(tuple(actions), True, it, residual)
    return EquilibriumResult(tuple(actions), False, solver.max_iters, residual)


def critical_rho(
    c_prime: float,
    lambda_r: float,
    t_star: float,
    omega_amp: float,
    d_ij: float,
    kappa: float,
) -> float:
    """Critical base reciprocity for a cooperative equilibrium to exist.

        rho* = c' / (lambda_r * T* * (1 + omega * D) * kappa)

    where c' is the marginal cost of cooperation at the interior solution:
    above rho*, the anticipated-reciprocity margin at a neutral signal
    exceeds the marginal cost and cooperation is incentive compatible.
    """
    denom = lambda_r * t_star * (1.0 + omega_amp * d_ij) * kappa
    if denom <= 0:
        raise ZeroDivisionError("critical threshold undefined: zero marginal reciprocity")
    return c_prime / denom


def exhaustive_nash(
    scenario: ScenarioConfig,
    trust: np.ndarray,
    grid_points: int,
    history: Optional[History] = None,
    period: int = 1,
    tol: float = 1e-9,
) -> list[tuple[float, float]]:
    """All pure Nash profiles of the discretized two-actor game (oracle).

    Brute force over the joint grid using the scalar objective: a profile
    is Nash when neither actor gains more than ``tol`` from any unilateral
    grid deviation.
    """
    if scenario.n != 2:
        raise ValueError("exhaustive search oracle is implemented for 2 actors")
    own_avg = _own_averages(scenario, history, period)
    g0 = np.linspace(0.0, scenario.a_max[0], grid_points)
    g1 = np.linspace(0.0, scenario.a_max[1], grid_points)
    pay0 = np.empty((grid_points, grid_points))
    pay1 = np.empty((grid_points, grid_points))
    for r, a0 in enumerate(g0):
        for c, a1 in enumerate(g1):
            prof = np.array([a0, a1])
            pay0[r, c] = _objective(0, a0, prof, own_avg[0], trust[0], scenario)
            pay1[r, c] = _objective(1, a1, prof, own_avg[1], trust[1], scenario)
    best0 = pay0.max(axis=0)
    best1 = pay1.max(axis=1)
    out = []
    for r in range(grid_points):
        for c in range(grid_points):
            if pay0[r, c] >= best0[c] - tol and pay1[r, c] >= best1[r] - tol:
                out.append((float(g0[r]), float(g1[c])))
    return out


@dataclass(frozen=True)
class CrossPartialResult:
    estimate: float
    corners_converged: bool
    dt: float
    drho: float


def cross_partial_check(
    t0: float = 0.7,
    rho0: float = 1.0,
    d: float = 0.5,
    dt: float = 0.05,
    drho: float = 0.05,
    lambda_r: float = 1.0,
    solver: Optional[SolverConfig] = None,
) -> CrossPartialResult:
    """Central finite-difference estimate of d2 a* / dT drho at a reference point.

    Four equilibrium solves at (T0 +/- dt, rho0 +/- drho) on the two-actor
    reference configuration; any unconverged corner flags the check
    inconclusive.  With the reciprocity channel off (lambda_r = 0) the
    estimate is numerically zero.
    """
    from .scenario import reference_scenario

    if solver is None:
        # Refinement introduces float-level jitter between Jacobi sweeps, so
        # the convergence tolerance stays comfortably above it.
        solver = SolverConfig(grid_points=4001, refine=True, tol=1e-6)

    def corner(t: float, r: float) -> tuple[float, bool]:
        scen = reference_scenario(
            rho0=r, t0=t, d=d, kappa=0.5, theta_v=10.0, a_max=40.0, lambda_r=lambda_r
        )
        trust = np.full((2, 2), t)
        np.fill_diagonal(trust, 1.0)
        res = solve_equilibrium(scen, None, trust, solver, warm_start=scen.a_init)
        return res.actions[0], res.converged

    app, ok1 = corner(t0 + dt, rho0 + drho)
    apm, ok2 = corner(t0 + dt, rho0 - drho)
    amp, ok3 = corner(t0 - dt, rho0 + drho)
    amm, ok4 = corner(t0 - dt, rho0 - drho)
    estimate = (app - apm - amp + amm) / (4.0 * dt * drho)
    return CrossPartialResult(
        estimate=estimate, corners_converged=ok1 and ok2 and ok3 and ok4,
        dt=dt, drho=drho,
    )
