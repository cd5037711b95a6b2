"""Plan through the 5D recursive maze, then shortcut the path.

The maze's recursion gives a lower bound L5 on any solution. Raw k-nearest
FMT* paths sit well above it; the shortcut heuristic pulls them close
while spending a small fraction of the planner's collision checks.
"""

from fmtstar.costs import path_cost
from fmtstar.environments import MazeSpec, maze_lower_bound, recursive_maze
from fmtstar.planners import PlannerConfig, Stats, fmt_plan
from fmtstar.smoothing import SmoothParams, adaptive_shortcut

spec = MazeSpec(dim=5)
problem = recursive_maze(spec)
bound = maze_lower_bound(spec)
print(f"L5 = {bound:.4f}")

for seed in range(3):
    res = fmt_plan(problem, n=4000, seed=seed, config=PlannerConfig(variant="knn"))
    if not res.success:
        print(f"seed {seed}: no path")
        continue
    st = Stats()
    params = SmoothParams(seed=seed, max_checks=int(0.18 * res.stats.collision_checks))
    path = adaptive_shortcut(res.path, problem.world, problem.cost, params, stats=st)
    smoothed = path_cost(problem.cost, path)
    extra = st.smoothing_collision_checks / res.stats.collision_checks
    print(f"seed {seed}: raw {res.cost / bound:.3f} L5, smoothed {smoothed / bound:.3f} L5, extra checks {extra:.1%}")
