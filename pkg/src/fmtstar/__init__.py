"""Fast Marching Tree (FMT*) motion planning.

The package plans straight-line paths for a point robot in the unit cube
with axis-aligned box obstacles. It ships FMT* (radial and k-nearest),
PRM* and RRT* baselines, brute-force oracles, benchmark environments and a
sweep harness.
"""

from .costs import CostModel, QuadratureRule, metric_ball_volume, pair_cost, path_cost
from .geometry import (
    Aabb,
    GoalRegion,
    World,
    clearance,
    free_space_measure,
    inflate_obstacles,
    segment_collision_free,
    unit_ball_volume,
)
from .neighbors import build_index, knn_neighbors, mutual_knn_neighbors, radius_neighbors
from .planners import (
    PlannerConfig,
    PlanResult,
    Stats,
    connection_radius,
    disk_graph_shortest_path,
    fmt_plan,
    knn_count,
    prm_star_plan,
    rrt_star_plan,
)
from .problem import ProblemDef
from .sampling import DensitySpec, SampleSet, make_rng, sample_density, sample_free

__version__ = "0.1.0"
