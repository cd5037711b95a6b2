"""Planning queries and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .costs import CostModel
from .geometry import GeometryError, GoalRegion, World, as_point, point_free
from .sampling import DensitySpec


class ProblemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProblemDef:
    world: World
    x_init: np.ndarray
    goal: GoalRegion
    cost: CostModel = field(default_factory=CostModel.euclidean)
    sampling: DensitySpec = field(default_factory=DensitySpec.uniform)
    name: str = "problem"
    provenance: dict | None = None

    def __post_init__(self):
        try:
            x0 = as_point(self.x_init, self.world.dim)
        except GeometryError as exc:
            raise ProblemError(str(exc)) from exc
        if np.any(x0 < 0) or np.any(x0 > 1):
            raise ProblemError("x_init lies outside the unit cube")
        if self.goal.dim != self.world.dim:
            raise ProblemError("goal dimension differs from the world")
        if not point_free(x0, self.world):
            raise ProblemError("x_init is in collision")
        if self.cost.kind == "weighted" and self.cost.weights.shape[0] != self.world.dim:
            raise ProblemError("metric weights do not match the world dimension")
        object.__setattr__(self, "x_init", x0)

    @property
    def dim(self) -> int:
        return self.world.dim

    @property
    def wrap(self):
        return self.cost.wrapped

    def to_dict(self) -> dict:
        out = self.world.to_dict()
        out["x_init"] = self.x_init.tolist()
        out["goal"] = self.goal.to_dict()
        out["cost"] = self.cost.to_dict()
        out["sampling"] = self.sampling.to_dict()
        out["name"] = self.name
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemDef":
        try:
            world = World.from_dict(data)
            return cls(
                world,
                data["x_init"],
                GoalRegion.from_dict(data["goal"]),
                CostModel.from_dict(data.get("cost")),
                DensitySpec.from_dict(data.get("sampling")),
                data.get("name", "problem"),
                data.get("provenance"),
            )
        except KeyError as exc:
            raise ProblemError(f"problem JSON is missing {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "ProblemDef":
        return cls.from_dict(json.loads(Path(path).read_text()))
