#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import json

from typing import Callable, Tuple, Union

import numpy as np

from .ExpectationEngine import ExpectationEngine
from .LagrangeBasis import LagrangeBasis
from .LegendreBasis import LegendreBasis
from .UniformParameter import UniformParameter
from .utils import DimensionMismatchError, MomentPCError, evaluateAt
from .version import __version__


EXPANSION_HEADER_PREFIX = '# momentpc-expansion '


class PCExpansion:
    """f_hat(x) = F Phi(x) with the n x (N + 1) coefficient matrix F."""

    def __init__(self, basis: LegendreBasis, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(1, -1)
        if coeffs.ndim != 2 or coeffs.shape[1] != basis.size:
            raise DimensionMismatchError(
                f"Coefficient matrix of shape {coeffs.shape} does not fit a basis with {basis.size} functions!"
            )

        self.basis = basis
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)

    @property
    def param(self) -> UniformParameter:
        return self.basis.param

    @property
    def outputs(self) -> int:
        return self.coeffs.shape[0]

    def __repr__(self) -> str:
        return f"PCExpansion(basis={self.basis!r}, coeffs={self.coeffs.tolist()})"

    def evaluate(self, points) -> np.ndarray:
        """Returns the (M, n) values of the expansion at the given points."""
        return self.basis.evaluate(points) @ self.coeffs.T

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)


class SCInterpolant:
    """f_hat_SC(x) = F_SC Psi(x) where column j of F_SC is the function value at node j."""

    def __init__(self, param: UniformParameter, lagrange: LagrangeBasis, values):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if lagrange.dims != param.dims:
            raise DimensionMismatchError(f"Nodes have {lagrange.dims} dimensions but the parameter has {param.dims}!")
        if values.ndim != 2 or values.shape[1] != lagrange.size:
            raise DimensionMismatchError(f"Values of shape {values.shape} do not fit {lagrange.size} nodes!")

        self.param = param
        self.lagrange = lagrange
        self.values = values
        self.values.setflags(write=False)

    @property
    def nodes(self) -> np.ndarray:
        return self.lagrange.nodes

    @property
    def outputs(self) -> int:
        return self.values.shape[0]

    def evaluate(self, points) -> np.ndarray:
        return self.lagrange.evaluate(points) @ self.values.T

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)


Expansion = Union[PCExpansion, SCInterpolant]


def expansionMoments(expansion: PCExpansion) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form mean F e_1 and second moment F W F^T of an orthogonal expansion."""
    coeffs = expansion.coeffs
    mean = coeffs[:, 0].copy()
    second = (coeffs * expansion.basis.norms) @ coeffs.T
    return mean, (second + second.T) / 2


def expansionMomentOrder(expansion: Expansion, engine: ExpectationEngine, order: int) -> np.ndarray:
    """Component-wise raw moments E[f_hat^order] computed with the given engine."""
    if order < 1:
        raise ValueError("Moment orders start at 1!")
    return engine.expect(expansion.param, lambda points: expansion.evaluate(points) ** order)


def approximationCost(
    engine: ExpectationEngine,
    basis: LegendreBasis,
    f: Callable[[np.ndarray], np.ndarray],
    expansion: Expansion,
) -> float:
    """Mean squared approximation error E[e^T e] with e = f - f_hat."""
    nodes, weights = engine.rule(basis.param)
    errors = evaluateAt(f, nodes) - expansion.evaluate(nodes)
    return float(weights @ np.sum(errors**2, axis=1))


def saveExpansion(expansion: PCExpansion, path: str) -> None:
    """Writes one CSV row per output preceded by a JSON header line describing the basis."""
    header = {
        'version': __version__,
        'bounds': [list(bound) for bound in expansion.param.bounds],
        'order': expansion.basis.order,
        'indices': [list(index) for index in expansion.basis.indices],
    }
    with open(path, 'wt', encoding='utf-8') as file:
        file.write(EXPANSION_HEADER_PREFIX + json.dumps(header) + '\n')
        for row in expansion.coeffs:
            file.write(','.join(f"{value:.17g}" for value in row) + '\n')


def loadExpansion(path: str) -> PCExpansion:
    with open(path, 'rt', encoding='utf-8') as file:
        firstLine = file.readline()
        if not firstLine.startswith(EXPANSION_HEADER_PREFIX):
            raise MomentPCError(f"File '{path}' does not start with an expansion header!")
        header = json.loads(firstLine[len(EXPANSION_HEADER_PREFIX) :])
        coeffs = np.loadtxt(file, delimiter=',', ndmin=2)

    basis = LegendreBasis(UniformParameter.fromBounds(header['bounds']), int(header['order']))
    if [list(index) for index in basis.indices] != header.get('indices', [list(index) for index in basis.indices]):
        raise MomentPCError(f"The basis ordering stored in '{path}' differs from the one used by this version!")
    return PCExpansion(basis, coeffs)
