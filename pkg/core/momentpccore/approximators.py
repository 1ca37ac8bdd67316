#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Baseline coefficient solvers: Galerkin projection, stochastic collocation and least squares."""

from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .ExpectationEngine import ExpectationEngine
from .LagrangeBasis import LagrangeBasis, defaultCollocationNodes
from .LegendreBasis import LegendreBasis
from .PCExpansion import PCExpansion, SCInterpolant
from .UniformParameter import UniformParameter
from .utils import DimensionMismatchError, IllConditionedError, asPoints, evaluateAt


DEFAULT_LS_SEED = 20230517
CONDITION_LIMIT = 1e12


def solveGP(engine: ExpectationEngine, basis: LegendreBasis, f: Callable[[np.ndarray], np.ndarray]) -> PCExpansion:
    """Galerkin projection F = E[f Phi^T] W^-1. The first column is the engine's estimate of E[f]."""
    nodes, weights = engine.rule(basis.param)
    values = evaluateAt(f, nodes)
    projections = values.T @ (weights[:, None] * basis.evaluate(nodes))
    return PCExpansion(basis, projections / basis.norms)


def solveSC(nodes, f: Callable[[np.ndarray], np.ndarray], param: Optional[UniformParameter] = None) -> SCInterpolant:
    """
    Lagrange interpolation of f over the given nodes. The parameter only determines the density used for
    moments of the interpolant and defaults to [-1, 1]^d.
    """
    lagrange = LagrangeBasis(nodes)
    if param is None:
        param = UniformParameter.standard(lagrange.dims)
    return SCInterpolant(param, lagrange, evaluateAt(f, np.asarray(lagrange.nodes)).T)


def defaultSCNodes(param: UniformParameter, order: int) -> np.ndarray:
    """order + 1 Gauss-Legendre nodes per component so that the interpolant has degree order."""
    return defaultCollocationNodes(param, order + 1)


def defaultLSGrid(basis: LegendreBasis, seed: int = DEFAULT_LS_SEED) -> np.ndarray:
    """2 (N + 1) i.i.d. uniform samples drawn from a generator seeded with the given seed."""
    return basis.param.sample(np.random.default_rng(seed), 2 * basis.size)


def _normalEquations(phi: np.ndarray, weights: np.ndarray, conditionLimit: float, name: str) -> tuple:
    gram = phi.T @ (weights[:, None] * phi)
    gram = (gram + gram.T) / 2
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > conditionLimit:
        raise IllConditionedError(
            f"The matrix {name} has a condition number of {condition:.3e}, which exceeds the limit of "
            f"{conditionLimit:.1e}. Use more or better distributed grid points!",
            condition=condition,
        )
    try:
        return scipy.linalg.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exception:
        raise IllConditionedError(f"The matrix {name} is not positive definite!", condition=condition) from exception


def gridWeights(grid: np.ndarray, weights=None) -> np.ndarray:
    if weights is None:
        return np.ones(grid.shape[0])
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if weights.size != grid.shape[0]:
        raise DimensionMismatchError(f"Got {weights.size} weights for {grid.shape[0]} grid points!")
    if np.any(weights <= 0):
        raise ValueError("Grid weights must be positive!")
    return weights


def solveLS(
    grid,
    basis: LegendreBasis,
    f: Callable[[np.ndarray], np.ndarray],
    weights=None,
    conditionLimit: float = CONDITION_LIMIT,
) -> PCExpansion:
    """
    Least squares fit F_LS = H_1^T H_2^-1 with H_1 = sum_i w_i Phi(x_i) f(x_i)^T and H_2 = sum_i w_i Phi(x_i) Phi(x_i)^T.
    Without weights, all w_i are one.
    """
    grid = asPoints(grid, basis.dims)
    if grid.shape[0] < basis.size:
        raise IllConditionedError(
            f"Least squares needs at least {basis.size} grid points but got only {grid.shape[0]}!",
            condition=float('inf'),
        )

    weights = gridWeights(grid, weights)
    phi = basis.evaluate(grid)
    factor = _normalEquations(phi, weights, conditionLimit, "H_2")
    h1 = phi.T @ (weights[:, None] * evaluateAt(f, grid))
    return PCExpansion(basis, scipy.linalg.cho_solve(factor, h1).T)


def gridResidual(grid, expansion: PCExpansion, f: Callable[[np.ndarray], np.ndarray], weights=None) -> float:
    """The least squares objective sum_i w_i |F Phi(x_i) - f(x_i)|^2."""
    grid = asPoints(grid, expansion.basis.dims)
    weights = gridWeights(grid, weights)
    errors = expansion.evaluate(grid) - evaluateAt(f, grid)
    return float(weights @ np.sum(errors**2, axis=1))
