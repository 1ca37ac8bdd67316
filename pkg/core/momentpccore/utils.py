#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import importlib
import sys
import types

from typing import Any, Callable, Optional, Sequence, Union

import numpy as np


MACHINE_EPSILON = 2.0**-52


class MomentPCError(Exception):
    """Base exception for the momentpccore module."""


class DimensionMismatchError(MomentPCError, ValueError):
    """Exception for points, coefficients, or functions whose shapes do not fit the basis."""


class EvaluationError(MomentPCError):
    """Exception for functions returning non-finite values. The offending point is stored in 'node'."""

    def __init__(self, message: str, node: Optional[np.ndarray] = None):
        super().__init__(message)
        self.node = node


class IntegrationError(EvaluationError):
    """Exception for time integration stages with non-finite values. The failing stage is stored in 'stage'."""

    def __init__(self, message: str, stage: int, node: Optional[np.ndarray] = None):
        super().__init__(message, node=node)
        self.stage = stage


class CoincidentNodesError(MomentPCError, ValueError):
    """Exception for interpolation nodes which are not (component-wise) distinct."""


class IllConditionedError(MomentPCError):
    """Exception for normal equations or data matrices whose condition number exceeds the allowed limit."""

    def __init__(self, message: str, condition: float = float('inf')):
        super().__init__(message)
        self.condition = condition


class RankDeficientWindowError(IllConditionedError):
    """Exception for time windows that can not determine a state transition matrix."""


class NotPositiveSemidefiniteError(MomentPCError):
    """Exception for covariance matrices with significantly negative eigenvalues."""


class SingularCovarianceError(MomentPCError):
    """Exception for singular covariance factors when regularization was disabled."""

    def __init__(self, message: str, directions: Optional[np.ndarray] = None):
        super().__init__(message)
        self.directions = directions


class InfeasibleError(MomentPCError):
    """Exception for matrices violating U U^T = I or bases with fewer non-constant terms than outputs."""


class ConfigurationError(MomentPCError):
    """Exception for invalid experiment configurations."""


def overrides(parentClass):
    """Simple decorator that checks that a method with the same name exists in the parent class"""

    def overrider(method):
        assert method.__name__ in dir(parentClass)
        assert callable(getattr(parentClass, method.__name__))
        return method

    return overrider


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-major flattening, i.e., the columns of the matrix are stacked on top of each other."""
    return np.asarray(matrix, dtype=float).reshape(-1, order='F')


def unvec(vector: np.ndarray, rows: int) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    if vector.ndim != 1 or rows <= 0 or vector.size % rows != 0:
        raise DimensionMismatchError(f"Vector of shape {vector.shape} can not be reshaped into {rows} rows!")
    return vector.reshape((rows, vector.size // rows), order='F')


def floorError(error: float, floor: float = MACHINE_EPSILON) -> float:
    """Absolute errors are lower bounded by the machine precision for display."""
    return max(abs(float(error)), floor)


def asPoints(points: Union[Sequence[float], np.ndarray], dims: int) -> np.ndarray:
    """
    Returns an (M, dims) array. A single point may be given as a flat sequence of length dims.
    For dims == 1, a flat sequence of length M is interpreted as M scalar points.
    """
    array = np.asarray(points, dtype=float)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    elif array.ndim == 1:
        array = array.reshape(1, -1) if array.size == dims else array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[1] != dims:
        raise DimensionMismatchError(f"Expected points with {dims} components but got shape {array.shape}!")
    return array


def evaluateAt(function: Callable[[np.ndarray], Any], points: np.ndarray) -> np.ndarray:
    """
    Evaluates a vectorized function at an (M, d) array of points and returns the values as an (M, n) array.
    Raises EvaluationError carrying the first point with a non-finite value.
    """
    values = np.asarray(function(points), dtype=float)
    if values.ndim == 0:
        values = np.full((points.shape[0], 1), float(values))
    elif values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2 or values.shape[0] != points.shape[0]:
        raise DimensionMismatchError(
            f"Function returned values of shape {values.shape} for {points.shape[0]} evaluation points!"
        )

    finite = np.isfinite(values).all(axis=1)
    if not finite.all():
        node = points[int(np.argmin(finite))]
        raise EvaluationError(f"Function returned a non-finite value at {node.tolist()}!", node=node)
    return values


def getModule(module: Union[str, types.ModuleType]) -> Optional[types.ModuleType]:
    if isinstance(module, types.ModuleType):
        return module

    if module not in sys.modules:
        try:
            importlib.import_module(module)
        except ImportError:
            pass
    return sys.modules[module] if module in sys.modules else None


def resolveCallable(path: str) -> Callable:
    """Resolves 'package.module:attribute' into the referenced callable."""
    moduleName, _, attribute = path.partition(':')
    if not moduleName or not attribute:
        raise ConfigurationError(f"Expected 'module:callable' but got '{path}'!")

    module = getModule(moduleName)
    if module is None:
        raise ConfigurationError(f"Module '{moduleName}' could not be imported!")

    result = module
    for name in attribute.split('.'):
        if not hasattr(result, name):
            raise ConfigurationError(f"Module '{moduleName}' has no attribute '{attribute}'!")
        result = getattr(result, name)

    if not callable(result):
        raise ConfigurationError(f"'{path}' is not callable!")
    return result
