"""Planning under a spatially varying cost.

A block across the straight line costs 2x or 4x per unit length. At 2x
the planner goes through it; at 4x it walks around.
"""

from fmtstar.environments import block_occupancy, cost_field_demo, crosses_block
from fmtstar.oracles import complete_graph_oracle
from fmtstar.planners import fmt_plan

for kind in ("high-cost-block", "higher-cost-block"):
    problem = cost_field_demo(kind)
    ref_cost, ref_path = complete_graph_oracle(problem)
    res = fmt_plan(problem, n=2000, seed=0)
    route = "through" if crosses_block(res.path) else "around"
    ref_route = "through" if crosses_block(ref_path) else "around"
    print(f"{kind}: FMT* cost {res.cost:.4f} ({route}, {block_occupancy(res.path):.3f} inside block); "
          f"reference {ref_cost:.4f} ({ref_route})")
