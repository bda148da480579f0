import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from core.errors import ContractError
from core.spline import KnotVector

WEIGHT_SUM_TOL = 1e-14


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights over [start, end]; weights are normalised to sum to 1"""
    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]
    degree: int
    start: float = 0.0
    end: float = 1.0

    def __post_init__(self):
        if len(self.nodes) != len(self.weights) or not self.nodes:
            raise ContractError("quadrature needs matching, nonempty node and weight lists")
        if min(self.weights) <= 0:
            raise ContractError("quadrature weights must be positive")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_SUM_TOL:
            raise ContractError("quadrature weights must sum to 1")
        if min(self.nodes) < self.start or max(self.nodes) > self.end:
            raise ContractError("quadrature nodes must lie inside the integration interval")

    @classmethod
    def gauss_legendre(cls, knots: KnotVector, points_per_span: Optional[int] = None) -> 'QuadratureRule':
        """Composite Gauss-Legendre rule, one panel per knot span (2 * degree + 1 nodes by default)"""
        m = points_per_span or 2 * knots.degree + 1
        x, w = np.polynomial.legendre.leggauss(m)
        breaks = knots.breakpoints
        nodes, weights = [], []
        for left, right in zip(breaks[:-1], breaks[1:]):
            nodes.append(left + 0.5 * (x + 1.0) * (right - left))
            weights.append(0.5 * w * (right - left))
        weights = np.concatenate(weights)
        weights /= weights.sum()
        return cls(tuple(np.concatenate(nodes)), tuple(weights), 2 * m - 1, float(breaks[0]), float(breaks[-1]))

    @cached_property
    def node_array(self) -> np.ndarray:
        return np.array(self.nodes)

    @cached_property
    def weight_array(self) -> np.ndarray:
        return np.array(self.weights)

    @property
    def width(self) -> float:
        return self.end - self.start

    def integrate(self, values: np.ndarray) -> float:
        """Approximate the integral over [start, end] from values at the nodes"""
        return float(self.width * (self.weight_array @ values))
