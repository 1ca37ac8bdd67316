#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import functools

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from numpy.polynomial.legendre import leggauss

from .LegendreBasis import LegendreBasis
from .UniformParameter import UniformParameter
from .utils import DimensionMismatchError, evaluateAt, overrides


class ExpectationEngine(ABC):
    """
    Approximates expectations over a uniform parameter by a weighted sum over nodes: E[g] = sum_j w_j g(x_j).
    Engines are immutable and all reductions are carried out in a fixed order.
    """

    @abstractmethod
    def rule(self, param: UniformParameter) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the (M, d) nodes and the M weights used for the given parameter."""

    def expect(self, param: UniformParameter, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Returns E[g] as a vector. g receives an (M, d) array and returns (M,) or (M, n) values."""
        nodes, weights = self.rule(param)
        return weights @ evaluateAt(g, nodes)


@functools.lru_cache(maxsize=64)
def _tensorGaussLegendre(pointsPerDim: int, bounds: Tuple[Tuple[float, float], ...]) -> Tuple[np.ndarray, np.ndarray]:
    points, weights = leggauss(pointsPerDim)
    weights = weights / 2.0

    param = UniformParameter(bounds)
    pointGrids = np.meshgrid(*([points] * param.dims), indexing='ij')
    weightGrids = np.meshgrid(*([weights] * param.dims), indexing='ij')
    standard = np.stack([grid.reshape(-1) for grid in pointGrids], axis=1)
    tensorWeights = np.prod(np.stack([grid.reshape(-1) for grid in weightGrids], axis=1), axis=1)

    nodes = param.fromStandard(standard)
    nodes.setflags(write=False)
    tensorWeights.setflags(write=False)
    return nodes, tensorWeights


class QuadratureEngine(ExpectationEngine):
    """Tensor Gauss-Legendre rule, exact for polynomials of degree <= 2m - 1 in every component."""

    def __init__(self, points: int):
        if points < 1:
            raise ValueError("Quadrature needs at least one point per dimension!")
        self.points = int(points)

    @classmethod
    def forOrder(cls, order: int) -> 'QuadratureEngine':
        """Rule with 2 order + 4 points, exact for every product of polynomials arising up to the given order."""
        return cls(2 * order + 4)

    def __repr__(self) -> str:
        return f"QuadratureEngine(points={self.points})"

    @overrides(ExpectationEngine)
    def rule(self, param: UniformParameter) -> Tuple[np.ndarray, np.ndarray]:
        return _tensorGaussLegendre(self.points, param.bounds)


class MonteCarloEngine(ExpectationEngine):
    """Equally weighted i.i.d. samples. The seed fully determines the sample stream."""

    def __init__(self, samples: int, seed: int = 0):
        if samples < 1:
            raise ValueError("Monte Carlo needs at least one sample!")
        self.samples = int(samples)
        self.seed = int(seed)

    def __repr__(self) -> str:
        return f"MonteCarloEngine(samples={self.samples}, seed={self.seed})"

    @overrides(ExpectationEngine)
    def rule(self, param: UniformParameter) -> Tuple[np.ndarray, np.ndarray]:
        nodes = param.sample(np.random.default_rng(self.seed), self.samples)
        return nodes, np.full(self.samples, 1.0 / self.samples)

    def standardErrors(self, param: UniformParameter, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Standard errors of the estimates returned by expect."""
        nodes, _ = self.rule(param)
        values = evaluateAt(g, nodes)
        if self.samples < 2:
            return np.full(values.shape[1], np.inf)
        return values.std(axis=0, ddof=1) / np.sqrt(self.samples)


class WeightedGridEngine(ExpectationEngine):
    """User-supplied nodes with positive weights summing to one."""

    def __init__(self, nodes, weights):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes.reshape(-1, 1)
        weights = np.asarray(weights, dtype=float).reshape(-1)

        if nodes.ndim != 2 or nodes.shape[0] != weights.size or weights.size == 0:
            raise DimensionMismatchError(f"Got {weights.size} weights for nodes of shape {nodes.shape}!")
        if np.any(weights <= 0):
            raise ValueError("All weights of a weighted grid must be positive!")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"The weights of a weighted grid must sum up to 1 but sum up to {weights.sum()!r}!")

        self.nodes = nodes
        self.weights = weights
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def fromCsv(cls, path: str) -> 'WeightedGridEngine':
        """Reads rows 'x_1, ..., x_d, w'. Lines starting with # are ignored."""
        table = np.loadtxt(path, delimiter=',', comments='#', ndmin=2)
        if table.shape[1] < 2:
            raise DimensionMismatchError(f"Weighted grid file '{path}' needs at least one node column and weights!")
        return cls(table[:, :-1], table[:, -1])

    def __repr__(self) -> str:
        return f"WeightedGridEngine(nodes={self.nodes.shape[0]}, dims={self.nodes.shape[1]})"

    @overrides(ExpectationEngine)
    def rule(self, param: UniformParameter) -> Tuple[np.ndarray, np.ndarray]:
        if self.nodes.shape[1] != param.dims:
            raise DimensionMismatchError(
                f"Grid has {self.nodes.shape[1]} dimensions but the parameter has {param.dims}!"
            )
        return self.nodes, self.weights


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of f together with the cross projection R = E[f Phi_1^T]."""

    # fmt: off
    mean       : np.ndarray  # (n,)
    second     : np.ndarray  # (n, n)
    covariance : np.ndarray  # (n, n)
    cross      : np.ndarray  # (n, N)
    # fmt: on

    @property
    def outputs(self) -> int:
        return self.mean.size

    @classmethod
    def fromMoments(cls, mean, second, cross) -> 'MomentSet':
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        second = np.atleast_2d(np.asarray(second, dtype=float))
        cross = np.asarray(cross, dtype=float).reshape(mean.size, -1)
        if second.shape != (mean.size, mean.size):
            raise DimensionMismatchError(f"Second moment of shape {second.shape} does not fit a mean of size {mean.size}!")
        second = (second + second.T) / 2
        return cls(mean, second, second - np.outer(mean, mean), cross)


def weightedMoments(values: np.ndarray, weights: np.ndarray, phi: Optional[np.ndarray] = None) -> MomentSet:
    """Moments of sampled values (M, n) for the given weights. phi are the (M, N + 1) basis values, if any."""
    mean = weights @ values
    second = values.T @ (weights[:, None] * values)
    centered = values - mean
    covariance = centered.T @ (weights[:, None] * centered)
    if phi is None:
        cross = np.zeros((values.shape[1], 0))
    else:
        cross = values.T @ (weights[:, None] * phi[:, 1:])

    # fmt: off
    return MomentSet(
        mean       = mean,
        second     = (second + second.T) / 2,
        covariance = (covariance + covariance.T) / 2,
        cross      = cross,
    )
    # fmt: on


def momentsOf(
    engine: ExpectationEngine,
    param: UniformParameter,
    basis: LegendreBasis,
    f: Callable[[np.ndarray], np.ndarray],
) -> MomentSet:
    """Computes E[f], E[f f^T], the covariance Q and R = E[f Phi_1^T] in a single pass over the engine's nodes."""
    if basis.dims != param.dims:
        raise DimensionMismatchError(f"Basis has {basis.dims} dimensions but the parameter has {param.dims}!")

    nodes, weights = engine.rule(param)
    return weightedMoments(evaluateAt(f, nodes), weights, basis.evaluate(nodes))
