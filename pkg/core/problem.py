import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional, Tuple

import numpy as np

from core.boundary import BoundaryCurve
from core.energy import DofVector, EnergyModel, Mode
from core.errors import ContractError
from core.quadrature import QuadratureRule
from core.spline import BSplineCurve2, KnotVector
from core.surface import Surface

DEFAULT_ORDER = 11
DEFAULT_DEGREE = 2


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Surface, two boundaries and the discretisation of the connecting curve"""
    surface: Surface
    c1: BoundaryCurve
    c2: BoundaryCurve
    mode: Mode
    order: int
    knots: KnotVector
    candidate_index: int = 0
    shift: Tuple[float, float] = (0.0, 0.0)
    swapped: bool = False

    def __post_init__(self):
        if self.order < 3:
            raise ContractError(f"order must be at least 3, got {self.order}")
        if self.knots.n_basis != self.order:
            raise ContractError(f"knot vector carries {self.knots.n_basis} controls, order is {self.order}")
        if Mode.for_boundaries(self.c1, self.c2) is not self.mode:
            raise ContractError(f"mode {self.mode.value} does not match the boundary kinds")
        for name, boundary in (("c1", self.c1), ("c2", self.c2)):
            if boundary.closed:
                ends = boundary.evaluate(np.array([0.0, 1.0]))
                gap = self.surface.point(ends[:, 0], ends[:, 1])
                if np.linalg.norm(gap[0] - gap[1]) > 1e-9:
                    raise ContractError(f"{name} is marked closed but its ends differ on the surface")

    @classmethod
    def between(cls, surface: Surface, c1: BoundaryCurve, c2: BoundaryCurve,
                order: int = DEFAULT_ORDER, degree: int = DEFAULT_DEGREE) -> 'ProblemSpec':
        """Infer the mode; a point-to-curve problem always keeps the point as c1"""
        swapped = c2.is_point and not c1.is_point
        if swapped:
            c1, c2 = c2, c1
        return cls(surface, c1, c2, Mode.for_boundaries(c1, c2), order,
                   KnotVector.uniform(order, degree), swapped=swapped)

    def with_order(self, order: int) -> 'ProblemSpec':
        return replace(self, order=order, knots=KnotVector.uniform(order, self.knots.degree))

    def energy_model(self, quad: Optional[QuadratureRule] = None) -> EnergyModel:
        return EnergyModel(self.surface, self.c1, self.c2, self.knots, self.mode, quad)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and damping of the Newton solve and the trimming loop"""
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    max_iters: int = 200
    armijo_slope: float = 1e-4
    backtrack_ratio: float = 0.5
    max_backtracks: int = 40
    trim_max_rounds: int = 8
    fd_hessian_step: float = 1e-6

    def __post_init__(self):
        for name in ("grad_tol", "step_tol", "armijo_slope", "fd_hessian_step"):
            if not getattr(self, name) > 0:
                raise ContractError(f"{name} must be positive")
        if not 0 < self.backtrack_ratio < 1:
            raise ContractError("backtrack_ratio must lie in (0, 1)")
        for name in ("max_iters", "max_backtracks", "trim_max_rounds"):
            if getattr(self, name) < 0:
                raise ContractError(f"{name} must be nonnegative")

    def with_overrides(self, **overrides) -> 'SolverConfig':
        """Copy with the given fields replaced; None values are ignored"""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ContractError(f"unknown solver settings: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return asdict(self)

    @staticmethod
    def from_dict(data: dict):
        """Create SolverConfig from dictionary"""
        return SolverConfig().with_overrides(**data)


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of one solve: the curve, its measures and how it was obtained"""
    curve: BSplineCurve2
    dof: DofVector
    length: float
    energy: float
    grad_norm: float
    iterations: int
    trim_rounds: int = 0
    candidate_index: int = 0
    converged: bool = False
    problem: Optional[ProblemSpec] = None
    initial_energy: float = math.nan
    trim_failed: bool = False
    saddle: bool = False
    degenerate: bool = False
    candidate_lengths: Tuple[Optional[float], ...] = ()
    candidate_curves: Tuple[Optional[BSplineCurve2], ...] = ()
    # x ranges of the solved curve kept by each trimming round
    trimmed_ranges: Tuple[Tuple[float, float], ...] = ()
    failure: Optional[str] = None

    @property
    def order(self) -> int:
        return len(self.curve.control)

    def diagnostics(self) -> dict:
        """Short record used when reporting failed candidates"""
        return {
            "candidate_index": self.candidate_index,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "trim_failed": self.trim_failed,
            "failure": self.failure,
        }

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return {
            "order": self.order,
            "length": self.length,
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "trim_rounds": self.trim_rounds,
            "candidate_index": self.candidate_index,
            "converged": self.converged,
            "trim_failed": self.trim_failed,
            "saddle": self.saddle,
            "degenerate": self.degenerate,
            "s": self.dof.s,
            "t": self.dof.t,
            "candidate_lengths": list(self.candidate_lengths),
            "trimmed_ranges": [list(r) for r in self.trimmed_ranges],
            "failure": self.failure,
        }
