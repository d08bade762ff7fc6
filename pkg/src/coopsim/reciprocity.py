"""History tracking, cooperation signals, and the bounded reciprocity response.

The conditional-cooperation chain is:

    signal   s_ij = a_j - baseline_j            (deviation from expectations)
    response phi(s) = tanh(kappa * s)           (bounded in (-1, 1))
    weighted R_ij = rho_ij * phi(s)             (sensitivity-scaled response)
    gated    lambda_r * T_ij * (1 + omega * D_ij) * rho_ij * phi(s)

The baseline can be a k-window moving average of the partner's own recent
actions (self-referential norms), a slowly adapting per-actor baseline, or
a fixed reference level; the simulation engine selects the strategy per
scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import UndefinedBaselineError


class History:
    """Append-only per-actor action history with windowed mean queries.

    One entry per completed period, in period order.  Window queries for
    period ``t`` only ever read periods strictly before ``t``; the current
    period's actions are not part of any baseline.  A scenario may seed
    pre-period-1 rows (periods 0, -1, ...) so the window is populated from
    the start; real periods stay 1-indexed.
    """

    def __init__(self, n_actors: int, pre: Sequence[Sequence[float]] = ()):
        self._n = n_actors
        self._rows: list[tuple[float, ...]] = []
        for row in pre:
            self.append(row)
        self._pre = len(self._rows)

    @property
    def n_actors(self) -> int:
        return self._n

    def __len__(self) -> int:
        """Completed real periods (pre-history excluded)."""
        return len(self._rows) - self._pre

    def append(self, actions) -> None:
        row = tuple(float(a) for a in actions)
        if len(row) != self._n:
            raise ValueError(f"expected {self._n} actions, got {len(row)}")
        self._rows.append(row)

    def action(self, actor: int, period: int) -> float:
        """Action of ``actor`` at 1-indexed ``period`` (<= 0 reads pre-history)."""
        return self._rows[period - 1 + self._pre][actor]

    def window(self, actor: int, t: int, k: int) -> list[float]:
        """Actions of ``actor`` over periods max(1 - pre, t-k) .. t-1."""
        if t > len(self) + 1:
            raise ValueError(f"period {t} not reached yet (history has {len(self)})")
        lo = max(1 - self._pre, t - k)
        return [self._rows[p - 1 + self._pre][actor] for p in range(lo, t)]


def moving_average(history: History, actor: int, t: int, k: int) -> float:
    """Mean of ``actor``'s actions over the most recent ``k`` periods before ``t``.

    For t <= k the window simply contains all available history.  At t = 1
    there is no history at all and the baseline is undefined; callers
    substitute the configured initial baseline.
    """
    if k < 1:
        raise ValueError(f"window length must be >= 1, got {k}")
    win = history.window(actor, t, k) if t >= 1 else []
    if not win:
        raise UndefinedBaselineError(
            f"no history before period {t}; use the configured initial baseline"
        )
    return sum(win) / len(win)


@dataclass(frozen=True)
class CooperationSignal:
    """Observed deviation of actor ``observed`` from its baseline, in action units."""

    value: float
    observer: int
    observed: int
    period: int


def cooperation_signal(a_j_t: float, baseline: float) -> float:
    """Signed deviation from the baseline: positive is cooperation, negative defection."""
    return a_j_t - baseline


def bounded_response(s: float, kappa: float) -> float:
    """Bounded response tanh(kappa * s): odd, strictly monotone, range (-1, 1).

    Saturation is asymptotic, never clamped, so the strict bound |phi| < 1
    holds for every finite signal.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    return math.tanh(kappa * s)


def reciprocity_response(rho_ij: float, s: float, kappa: float) -> float:
    """Sensitivity-weighted bounded response rho_ij * tanh(kappa * s).

    This is the behavioral response function, not the reputation state
    variable; the two are tracked separately.
    """
    if rho_ij < 0:
        raise ValueError(f"rho_ij must be >= 0, got {rho_ij}")
    return rho_ij * bounded_response(s, kappa)


def gated_reciprocity_term(
    t_ij: float,
    d_ij: float,
    omega_amp: float,
    lambda_r: float,
    rho_ij: float,
    s: float,
    kappa: float,
) -> float:
    """Trust-gated, dependency-amplified reciprocity term.

        lambda_r * T_ij * (1 + omega * D_ij) * rho_ij * tanh(kappa * s)

    Zero trust closes the gate entirely regardless of the signal.
    """
    if not 0.0 <= t_ij <= 1.0:
        raise ValueError(f"T_ij must lie in [0, 1], got {t_ij}")
    return lambda_r * t_ij * (1.0 + omega_amp * d_ij) * reciprocity_response(rho_ij, s, kappa)
