from .common import (
    PlannerConfig,
    PlannerError,
    PlanResult,
    Stats,
    SubBoundWarning,
    connection_radius,
    default_eta,
    default_k0,
    default_k0_rrt,
    k0_bound,
    knn_count,
    neighborhood,
    prepare_samples,
)
from .fmt import fmt_plan
from .graph import disk_graph_shortest_path
from .prm import prm_star_plan
from .rrt import rrt_star_plan

__all__ = [
    "PlannerConfig",
    "PlannerError",
    "PlanResult",
    "Stats",
    "SubBoundWarning",
    "connection_radius",
    "default_eta",
    "default_k0",
    "default_k0_rrt",
    "disk_graph_shortest_path",
    "fmt_plan",
    "k0_bound",
    "knn_count",
    "neighborhood",
    "prepare_samples",
    "prm_star_plan",
    "rrt_star_plan",
]
