"""Value creation, private payoffs, and the four-component modular utility.

The complete per-actor utility decomposes additively:

    total = base + interdep + trust_mod + recip_mod

    base      = e_i - a_i + f_i(a_i) + alpha_i * (V(a) - sum_j f_j(a_j))
    interdep  = sum_{j != i} D_ij * base_j
    trust_mod = lambda_t * sum_{j != i} T_ij * D_ij * base_j
    recip_mod = sum_{j != i} lambda_r * T_ij * (1 + omega * D_ij) * rho_ij
                    * tanh(kappa * s_ij)

Setting lambda_r = 0 switches conditional cooperation off (trust-augmented
model); additionally setting lambda_t = 0 leaves the bare
interdependence-augmented payoff.  The optional team-production utility is
a separate mode, not a fifth component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError
from .params import EconomyParams, InterdependenceMatrix, ReciprocityParams, TeamParams, TrustParams
from .reciprocity import gated_reciprocity_term


@dataclass(frozen=True)
class ActionProfile:
    """Joint action vector with per-actor upper bounds."""

    a: tuple[float, ...]
    a_max: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "a_max", tuple(float(x) for x in self.a_max))
        if len(self.a) != len(self.a_max):
            raise ConfigurationError("action profile and bounds must have the same length")
        for x, m in zip(self.a, self.a_max):
            if not math.isfinite(x) or x < 0 or x > m:
                raise ConfigurationError(f"action {x} outside [0, {m}]")


@dataclass(frozen=True)
class UtilityBreakdown:
    """Per-component decomposition of a single actor's utility."""

    base: float
    interdep: float
    trust_mod: float
    recip_mod: float

    @property
    def total(self) -> float:
        return self.base + self.interdep + self.trust_mod + self.recip_mod


def individual_value(a_i: float, econ: EconomyParams) -> float:
    """Individual value f(a): theta_v * ln(1 + a) or a ** power_beta."""
    if a_i < 0:
        raise ValueError(f"action must be >= 0, got {a_i}")
    if econ.value_form == "logarithmic":
        return econ.theta_v * math.log1p(a_i)
    return a_i**econ.power_beta


def value_creation(a: Sequence[float], econ: EconomyParams) -> float:
    """Total value: sum of individual values plus geometric-mean synergy.

        V(a) = sum_i f_i(a_i) + gamma * (prod_i a_i) ** (1/N)

    The synergy term vanishes whenever any actor contributes nothing, so
    joint value above the sum of parts requires everyone's participation.
    """
    arr = [float(x) for x in a]
    total = sum(individual_value(x, econ) for x in arr)
    if econ.gamma > 0.0 and all(x > 0.0 for x in arr):
        log_mean = sum(math.log(x) for x in arr) / len(arr)
        total += econ.gamma * math.exp(log_mean)
    return total


def private_payoff(i: int, a: Sequence[float], econ: EconomyParams) -> float:
    """Appropriated payoff of actor i.

        pi_i = e_i - a_i + f_i(a_i) + alpha_i * (V(a) - sum_j f_j(a_j))

    Actors keep their endowment net of investment, appropriate their own
    value creation, and split the synergy surplus by bargaining share.
    """
    arr = [float(x) for x in a]
    synergy = value_creation(arr, econ) - sum(individual_value(x, econ) for x in arr)
    return (
        econ.endowments[i]
        - arr[i]
        + individual_value(arr[i], econ)
        + econ.alpha[i] * synergy
    )


def complete_utility(
    i: int,
    a: Sequence[float],
    d: InterdependenceMatrix,
    trust_to: Sequence[float],
    signals: Sequence[float],
    econ: EconomyParams,
    recip: ReciprocityParams,
    tr: TrustParams,
) -> UtilityBreakdown:
    """Evaluate the full modular utility of actor i.

    ``trust_to[j]`` is i's immediate trust in j and ``signals[j]`` is i's
    observed cooperation signal about j (both ignored at j = i).  A missing
    dyad state (NaN trust) is a configuration error.
    """
    n = d.n
    if len(trust_to) != n or len(signals) != n:
        raise ConfigurationError("trust and signal vectors must cover every actor")
    base = private_payoff(i, a, econ)
    interdep = 0.0
    trust_mod = 0.0
    recip_mod = 0.0
    for j in range(n):
        if j == i:
            continue
        t_ij = float(trust_to[j])
        if math.isnan(t_ij):
            raise ConfigurationError(f"missing dyad trust state for pair ({i}, {j})")
        pi_j = private_payoff(j, a, econ)
        d_ij = d[i, j]
        interdep += d_ij * pi_j
        trust_mod += tr.lambda_t * t_ij * d_ij * pi_j
        recip_mod += gated_reciprocity_term(
            t_ij, d_ij, recip.omega_amp, recip.lambda_r,
            recip.sensitivity(d_ij), float(signals[j]), recip.kappa,
        )
    return UtilityBreakdown(base=base, interdep=interdep, trust_mod=trust_mod, recip_mod=recip_mod)


def team_utility(i: int, a: Sequence[float], team: TeamParams) -> float:
    """Loyalty-moderated team-member utility.

        U_i = (1/n) * Q - c * (1 - phi_c * theta_i) * a_i
              + phi_b * theta_i * teammates_payoff

    with team production Q = omega_prod * (sum of member efforts) ** beta_team
    and teammates_payoff the aggregate (sum by default, optionally mean) of
    the other members' share-minus-own-cost payoffs.
    """
    if i not in team.members:
        raise ValueError(f"actor {i} is not a member of the team")
    arr = [float(x) for x in a]
    n = len(team.members)
    effort_total = sum(arr[m] for m in team.members)
    q = team.omega_prod * effort_total**team.beta_team
    pos = team.members.index(i)
    theta_i = team.loyalty[pos]
    own = q / n - team.unit_cost * (1.0 - team.phi_c * theta_i) * arr[i]
    teammates = [q / n - team.unit_cost * arr[m] for m in team.members if m != i]
    if not teammates:
        aggregate = 0.0
    elif team.teammate_payoff == "mean":
        aggregate = sum(teammates) / len(teammates)
    else:
        aggregate = sum(teammates)
    return own + team.phi_b * theta_i * aggregate
