#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ExpectationEngine import ExpectationEngine, QuadratureEngine
from .LegendreBasis import LegendreBasis
from .ProgressBar import ProgressBar
from .utils import DimensionMismatchError, EvaluationError, IntegrationError, asPoints, unvec, vec


# dynamics(states (M, n), params (M, d)) -> (M, n)
Dynamics = Callable[[np.ndarray, np.ndarray], np.ndarray]


class GPSurrogateODE:
    """
    Deterministic ODE for the coefficients x_pc = vec(X) of the expansion x(t, p) ~ X(t) Phi(p) of the solution
    of dx/dt = f(x, p). Projecting the equation error onto every basis function results in
    dX/dt = E[f(X Phi, p) Phi^T] W^-1, i.e., (W kron I_n)^-1 E[(Phi kron I_n) f((Phi^T kron I_n) x_pc)].
    """

    def __init__(
        self,
        basis: LegendreBasis,
        dynamics: Dynamics,
        outputs: int = 1,
        engine: Optional[ExpectationEngine] = None,
    ):
        if outputs < 1:
            raise ValueError("The state must have at least one component!")

        # fmt: off
        self.basis    = basis
        self.dynamics = dynamics
        self.outputs  = int(outputs)
        self.engine   = engine if engine is not None else QuadratureEngine.forOrder(basis.order)
        # fmt: on

        self._nodes, self._weights = self.engine.rule(basis.param)
        self._phi = basis.evaluate(self._nodes)

    @property
    def dimension(self) -> int:
        """Length n (N + 1) of x_pc."""
        return self.outputs * self.basis.size

    def _unvec(self, xpc) -> np.ndarray:
        xpc = np.asarray(xpc, dtype=float).reshape(-1)
        if xpc.size != self.dimension:
            raise DimensionMismatchError(f"Expected a coefficient vector of length {self.dimension} but got {xpc.size}!")
        return unvec(xpc, self.outputs)

    def evaluateDynamics(self, states: np.ndarray, params: np.ndarray) -> np.ndarray:
        values = np.asarray(self.dynamics(states, params), dtype=float).reshape(states.shape[0], self.outputs)
        finite = np.isfinite(values).all(axis=1)
        if not finite.all():
            node = params[int(np.argmin(finite))]
            raise EvaluationError(f"Dynamics returned a non-finite value at {node.tolist()}!", node=node)
        return values

    def rhs(self, xpc) -> np.ndarray:
        coeffs = self._unvec(xpc)
        values = self.evaluateDynamics(self._phi @ coeffs.T, self._nodes)
        projections = values.T @ (self._weights[:, None] * self._phi)
        return vec(projections / self.basis.norms)

    def __call__(self, xpc) -> np.ndarray:
        return self.rhs(xpc)

    def residual(self, xpc, points, derivative=None) -> np.ndarray:
        """
        Equation error e(p) = dX/dt Phi(p) - f(X Phi(p), p) at the given (M, d) points. The derivative defaults to
        the projected right-hand side.
        """
        coeffs = self._unvec(xpc)
        derivative = self._unvec(self.rhs(xpc) if derivative is None else derivative)
        points = asPoints(points, self.basis.dims)
        phi = self.basis.evaluate(points)
        return phi @ derivative.T - self.evaluateDynamics(phi @ coeffs.T, points)


def linearSystemMatrix(basis: LegendreBasis, engine: ExpectationEngine, systemMatrix: Callable) -> np.ndarray:
    """
    Assembles (W kron I_n)^-1 E[(Phi Phi^T) kron A(p)] for linear dynamics dx/dt = A(p) x.
    systemMatrix receives the (M, d) parameter points and returns the (M, n, n) system matrices.
    """
    nodes, weights = engine.rule(basis.param)
    phi = basis.evaluate(nodes)
    matrices = np.asarray(systemMatrix(nodes), dtype=float)
    if matrices.ndim == 1:
        matrices = matrices.reshape(-1, 1, 1)
    if matrices.ndim != 3 or matrices.shape[0] != nodes.shape[0] or matrices.shape[1] != matrices.shape[2]:
        raise DimensionMismatchError(f"System matrices of shape {matrices.shape} are not square per node!")

    outputs = matrices.shape[1]
    blocks = np.einsum('m,mi,mj,mab->iajb', weights, phi, phi, matrices)
    assembled = blocks.reshape(basis.size * outputs, basis.size * outputs)
    return assembled / np.repeat(basis.norms, outputs)[:, None]


def rk4Step(rhs: Callable[[np.ndarray], np.ndarray], x, step: float) -> np.ndarray:
    """One step of the classical fourth-order Runge-Kutta method for the autonomous system dx/dt = rhs(x)."""
    if not step > 0:
        raise ValueError(f"The step size must be positive but is {step}!")

    x = np.asarray(x, dtype=float)

    def stage(index: int, value) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(value)):
            raise IntegrationError(f"Runge-Kutta stage {index} is not finite!", stage=index)
        return value

    k1 = stage(1, rhs(x))
    k2 = stage(2, rhs(x + step / 2 * k1))
    k3 = stage(3, rhs(x + step / 2 * k2))
    k4 = stage(4, rhs(x + step * k3))
    return x + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class CoefficientSeries:
    """Coefficient vectors x_pc^k = vec(X(k h)) for k = 0 ... K, stacked as rows."""

    # fmt: off
    basis   : LegendreBasis
    step    : float
    states  : np.ndarray  # (K + 1, n (N + 1))
    outputs : int = 1
    # fmt: on

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[1] != self.outputs * self.basis.size:
            raise DimensionMismatchError(
                f"States of length {self.states.shape[1]} do not fit {self.outputs} outputs "
                f"and {self.basis.size} basis functions!"
            )
        if not self.step > 0:
            raise ValueError(f"The step size must be positive but is {self.step}!")

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(len(self))

    def coefficients(self, k: int) -> np.ndarray:
        """The n x (N + 1) coefficient matrix X at step k."""
        return unvec(self.states[k], self.outputs)

    def means(self) -> np.ndarray:
        """(K + 1, n) means, i.e., the coefficients of the constant basis function."""
        return self.states[:, : self.outputs].copy()

    def variances(self) -> np.ndarray:
        """(K + 1, n) variances sum_{j >= 1} X_j^2 W_j."""
        coeffs = self.states.reshape(len(self), self.basis.size, self.outputs)
        return np.einsum('kja,j->ka', coeffs[:, 1:, :] ** 2, self.basis.nonConstantNorms)

    def secondMoments(self, k: int) -> np.ndarray:
        coeffs = self.coefficients(k)
        return (coeffs * self.basis.norms) @ coeffs.T


def initialCoefficients(basis: LegendreBasis, x0) -> np.ndarray:
    """Coefficient vector of a deterministic initial state, i.e., X = [x0, 0, ..., 0]."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    coeffs = np.zeros((x0.size, basis.size))
    coeffs[:, 0] = x0
    return vec(coeffs)


def propagateGP(ode: GPSurrogateODE, x0, steps: int, step: float, printDebug: int = 0) -> CoefficientSeries:
    """Integrates the surrogate ODE with RK4 starting from the coefficient vector x0."""
    if steps < 0:
        raise ValueError("The number of steps must not be negative!")

    states = np.empty((steps + 1, ode.dimension))
    states[0] = np.asarray(x0, dtype=float).reshape(-1)
    progressBar = ProgressBar(steps) if printDebug >= 2 else None
    for k in range(steps):
        states[k + 1] = rk4Step(ode.rhs, states[k], step)
        if progressBar:
            progressBar.update(k + 1)

    return CoefficientSeries(ode.basis, step, states, ode.outputs)
