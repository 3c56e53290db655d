"""Relatedness, complexity, and diversification-strategy toolkit.

Pipeline: a location x activity table becomes a revealed-specialization
matrix, a proximity network between activities, per-location relatedness
densities, spectral complexity scores (and the nonlinear fitness variant),
strategic-frontier diagrams, and exact/simulated diversification strategies
on the thresholded activity graph — plus a workspace/CLI/HTTP layer to serve
it all.
"""
from .data import (
    ActivityMatrix,
    EntryExitRecord,
    IndicatorVector,
    LoadReport,
    SpatialGraph,
    parse_adjacency,
    parse_indicator_table,
    parse_trade_table,
    snapshot_diff,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    DisconnectedSpecializationError,
    EmptyDatasetError,
    InfeasibleTargetError,
    MissingIndicatorError,
    ParseError,
    UnknownIdError,
    WorkspaceError,
    WorkspaceRebuildingError,
)
from .frontier import (
    ActivityValueVector,
    DiagramPoint,
    FrontierDiagram,
    LocationDiagram,
    Thresholds,
    activity_value,
    frontier_diagram,
    location_diagram,
    pareto_front,
    pci_values,
)
from .metrics import (
    ComplexityScores,
    DensityMatrix,
    FitnessScores,
    Margins,
    ProximityNetwork,
    RcaMatrix,
    SpecializationMatrix,
    binarize,
    eci_pci,
    fitness_complexity,
    margins,
    proximity,
    rca,
    relatedness_density,
)
from .spatial import (
    GeoDensityMatrix,
    GradientVector,
    LiftReport,
    complexity_gradient,
    entry_lift,
    neighbor_density,
)
from .strategy import (
    ActivityGraph,
    OptimalTable,
    Policy,
    PortfolioSchedule,
    PortfolioSplit,
    SimulationStats,
    StrategyEvaluation,
    TargetClassification,
    build_activity_graph,
    classify_targets,
    entry_probability,
    expected_completion,
    load_instance,
    optimal_policy,
    portfolio_split,
    simulate,
)
from .synth import (
    PanelConfig,
    diversification_step,
    nested_noise_matrix,
    random_connected_specialization,
)
from .workspace import (
    IndicatorsUnavailableError,
    Workspace,
    WorkspaceParams,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
