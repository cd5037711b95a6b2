"""FMT* against PRM* and RRT* on the bug trap.

FMT* and PRM* share one sample set, so their costs and collision checks
are directly comparable: PRM* is never costlier, FMT* checks far fewer
edges. RRT* gets the same budget as iterations.
"""

from fmtstar.environments import bug_trap_2d
from fmtstar.planners import PlannerConfig, fmt_plan, prepare_samples, prm_star_plan, rrt_star_plan

problem = bug_trap_2d()
cfg = PlannerConfig()

print(f"{'n':>6} {'algo':>5} {'cost':>8} {'checks':>8} {'ms':>8}")
for n in (500, 1000, 2000, 4000):
    samples = prepare_samples(problem, None, n, seed=0, config=cfg)
    runs = {
        "fmt": fmt_plan(problem, samples, cfg),
        "prm": prm_star_plan(problem, samples, cfg),
        "rrt": rrt_star_plan(problem, cfg, seed=0, n_iterations=n),
    }
    for name, res in runs.items():
        cost = f"{res.cost:8.4f}" if res.success else "    fail"
        print(f"{n:>6} {name:>5} {cost} {res.stats.collision_checks:>8} {res.stats.wall_time * 1e3:>8.1f}")
