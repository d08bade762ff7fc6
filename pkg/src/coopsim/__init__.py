"""Deterministic simulation, equilibrium solving, and validation harness for
reciprocity-augmented strategic coopetition among interdependent actors."""

from .errors import ConfigurationError, DependencyTableError, UndefinedBaselineError
from .params import (
    ActorId,
    DependencyEntry,
    EconomyParams,
    InterdependenceMatrix,
    ReciprocityParams,
    TeamParams,
    TrustParams,
    compute_interdependence,
    reciprocity_sensitivity,
)
from .reciprocity import (
    CooperationSignal,
    History,
    bounded_response,
    cooperation_signal,
    gated_reciprocity_term,
    moving_average,
    reciprocity_response,
)
from .scenario import ScenarioConfig, Shock, SimConfig, pd_scenario, reference_scenario
from .simulation import Trajectory, run, step_adjustment
from .solver import (
    EquilibriumResult,
    SolverConfig,
    best_response,
    critical_rho,
    cross_partial_check,
    exhaustive_nash,
    solve_equilibrium,
)
from .trust import DyadState, negativity_ratio, trust_ceiling, update_trust
from .utility import (
    ActionProfile,
    UtilityBreakdown,
    complete_utility,
    individual_value,
    private_payoff,
    team_utility,
    value_creation,
)

__version__ = "0.1.0"
