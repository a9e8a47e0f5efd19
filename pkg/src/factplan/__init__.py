"""Multi-agent sampling-based motion planning with factorized roadmaps.

Agents are discs in the unit square moving along straight joint
interpolations. The planners grow roadmaps whose nodes carry whole
agent subsets; splitting hyperedges hand a coarse block over to finer
independent blocks, and the best solution is assembled by a refinement-
ordered dynamic program. The analysis module quantifies when the
factorized construction needs fewer samples than the joint one.
"""

from .analysis import (
    GainInputs,
    GainReport,
    composition_epsilon,
    fact_prm_star_samples,
    factorization_gain,
    gain_grid,
    linf_dispersion,
    prm_star_joint_samples,
    sufficient_samples,
)
from .bench import (
    ALGORITHMS,
    BenchConfig,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    TrialReport,
    bundled_scenario_names,
    emit_results,
    load_bundled,
    load_scenario,
    run_benchmark,
    run_trial,
    summarize,
)
from .core import (
    AgentSet,
    BlockConfig,
    BlockGroup,
    Partition,
    enumerate_partitions,
    join,
    per_agent_cost,
    powerset_groups,
    project,
)
from .environment import DIM, Environment, SamplingError, Transition
from .factorization import (
    Cone,
    ConeHeuristic,
    FactorizationHeuristic,
    NeverFactorize,
    StraightLineIndependence,
    cone_distance,
    cone_region,
    factorize,
    make_heuristic,
)
from .geometry import Rect
from .hypergraph import (
    GraphStats,
    HyperEdge,
    HyperPath,
    PlanHypergraph,
    connection_radius,
)
from .planners import (
    PlannerParams,
    PlanResult,
    SetupError,
    run_fact_sba,
    run_prm_star,
    run_sba,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AgentSet",
    "BenchConfig",
    "BlockConfig",
    "BlockGroup",
    "Cone",
    "ConeHeuristic",
    "DIM",
    "Environment",
    "FactorizationHeuristic",
    "GainInputs",
    "GainReport",
    "GraphStats",
    "HyperEdge",
    "HyperPath",
    "NeverFactorize",
    "Partition",
    "PlanHypergraph",
    "PlanResult",
    "PlannerParams",
    "Rect",
    "SamplingError",
    "Scenario",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SetupError",
    "StraightLineIndependence",
    "Transition",
    "TrialReport",
    "bundled_scenario_names",
    "composition_epsilon",
    "cone_distance",
    "cone_region",
    "connection_radius",
    "emit_results",
    "enumerate_partitions",
    "fact_prm_star_samples",
    "factorization_gain",
    "factorize",
    "gain_grid",
    "join",
    "linf_dispersion",
    "load_bundled",
    "load_scenario",
    "make_heuristic",
    "per_agent_cost",
    "powerset_groups",
    "prm_star_joint_samples",
    "project",
    "run_benchmark",
    "run_fact_sba",
    "run_prm_star",
    "run_sba",
    "run_trial",
    "summarize",
    "sufficient_samples",
]
