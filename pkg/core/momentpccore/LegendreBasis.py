#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from typing import List, Tuple

import numpy as np

from .UniformParameter import UniformParameter
from .utils import DimensionMismatchError, asPoints


MultiIndex = Tuple[int, ...]


def basisSize(dims: int, order: int) -> int:
    """Number of d-variate polynomials with total degree <= order, i.e., (d + order)! / (d! order!)."""
    size = 1
    for i in range(1, dims + 1):
        size = size * (order + i) // i
    return size


def totalDegreeIndices(dims: int, order: int) -> List[MultiIndex]:
    """
    Returns all multi-indexes with total degree <= order in graded lexicographic order:
    sorted by total degree first and, for equal degrees, by descending exponents from the first
    component on, e.g., for two dimensions: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
    This ordering fixes the meaning of the columns of all coefficient matrices.
    """
    if dims < 1:
        raise ValueError("The number of dimensions must be positive!")
    if order < 0:
        raise ValueError("The approximation order must not be negative!")

    def withDegree(remainingDims: int, degree: int) -> List[MultiIndex]:
        if remainingDims == 1:
            return [(degree,)]
        return [
            (first,) + rest for first in range(degree, -1, -1) for rest in withDegree(remainingDims - 1, degree - first)
        ]

    return [index for degree in range(order + 1) for index in withDegree(dims, degree)]


def legendreTable(xi: np.ndarray, order: int) -> np.ndarray:
    """
    Evaluates the Legendre polynomials P_0 ... P_order at the given standardized points via the recurrence
    (k + 1) P_{k+1} = (2k + 1) xi P_k - k P_{k-1}. Returns an array of shape xi.shape + (order + 1,).
    """
    xi = np.asarray(xi, dtype=float)
    table = np.empty(xi.shape + (order + 1,))
    table[..., 0] = 1.0
    if order >= 1:
        table[..., 1] = xi
    for k in range(1, order):
        table[..., k + 1] = ((2 * k + 1) * xi * table[..., k] - k * table[..., k - 1]) / (k + 1)
    return table


class LegendreBasis:
    """
    Total-degree basis of products of univariate Legendre polynomials, each mapped affinely onto the
    interval of its parameter component. The basis is orthogonal with respect to the uniform density and
    immutable after construction.
    """

    def __init__(self, param: UniformParameter, order: int):
        if order < 0:
            raise ValueError("The approximation order must not be negative!")

        # fmt: off
        self.param   = param
        self.order   = int(order)
        self.indices = tuple(totalDegreeIndices(param.dims, self.order))
        self.norms   = np.array([np.prod([1.0 / (2 * k + 1) for k in index]) for index in self.indices])
        self._exponents = np.array(self.indices, dtype=int).reshape(len(self.indices), param.dims)
        # fmt: on

        self.norms.setflags(write=False)
        self._exponents.setflags(write=False)

    @property
    def dims(self) -> int:
        return self.param.dims

    @property
    def size(self) -> int:
        """The number of basis functions N + 1."""
        return len(self.indices)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"LegendreBasis(param={self.param}, order={self.order})"

    def evaluate(self, points) -> np.ndarray:
        """
        Returns Phi evaluated at each of the given points as an (M, N + 1) array. The first column is exactly one.
        Points outside the parameter box are evaluated by polynomial continuation.
        """
        xi = self.param.toStandard(asPoints(points, self.dims))
        table = legendreTable(xi, self.order)  # (M, d, order + 1)
        values = np.ones((xi.shape[0], self.size))
        for dim in range(self.dims):
            values *= table[:, dim, self._exponents[:, dim]]
        return values

    def evaluatePoint(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float).reshape(-1)
        if point.size != self.dims:
            raise DimensionMismatchError(f"Expected a point with {self.dims} components but got {point.size}!")
        return self.evaluate(point.reshape(1, -1))[0]

    @property
    def nonConstantNorms(self) -> np.ndarray:
        """Diagonal of W_1, the norm matrix without the constant basis function."""
        return self.norms[1:]


def buildBasis(param: UniformParameter, order: int) -> LegendreBasis:
    return LegendreBasis(param, order)
