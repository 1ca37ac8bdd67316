#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import traceback

from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from .constrained import solveConstrainedGP
from .LegendreBasis import LegendreBasis
from .ProgressBar import ProgressBar
from .references import ReferenceStatsProvider
from .SurrogateODE import CoefficientSeries, GPSurrogateODE, rk4Step
from .utils import DimensionMismatchError, RankDeficientWindowError, vec


CONDITION_LIMIT = 1e12


def fitTransition(window, conditionLimit: float = CONDITION_LIMIT) -> np.ndarray:
    """
    Returns M minimizing sum_j |x^{j+1} - M x^j|^2 over the q + 1 consecutive states (rows) of the window,
    i.e., M = [sum x^{j+1} x^j^T] [sum x^j x^j^T]^-1. The Gram matrix sum x^j x^j^T is required to be regular
    with a condition number below the limit. Its condition number is the square of that of the data matrix
    X = [x^0 ... x^{q-1}], which is how it is computed. The fit itself uses least squares on X.
    """
    window = np.asarray(window, dtype=float)
    if window.ndim == 1:
        window = window.reshape(-1, 1)
    if window.ndim != 2 or window.shape[0] < 2:
        raise DimensionMismatchError(f"A window needs at least two states but has shape {window.shape}!")

    pairs, dimension = window.shape[0] - 1, window.shape[1]
    if pairs < dimension:
        raise RankDeficientWindowError(
            f"A window with {pairs} transitions can not determine a {dimension} x {dimension} transition matrix!",
            condition=float('inf'),
        )

    previous, following = window[:-1], window[1:]
    singularValues = scipy.linalg.svd(previous, compute_uv=False)
    condition = float('inf')
    if singularValues[-1] > 0:
        with np.errstate(over='ignore'):
            condition = float(np.square(singularValues[0] / singularValues[-1]))
    if not np.isfinite(condition) or condition > conditionLimit:
        raise RankDeficientWindowError(
            f"The window Gram matrix has a condition number of {condition:.3e}, which exceeds {conditionLimit:.1e}!",
            condition=condition,
        )

    return scipy.linalg.lstsq(previous, following)[0].T


def reconstructCpc(provider: ReferenceStatsProvider, basis: LegendreBasis, k: int) -> np.ndarray:
    """Flattened moment-exact coefficients x_cpc^k for the reference moments at step k."""
    return vec(solveConstrainedGP(provider.moments(k), basis).coeffs)


@dataclass
class PropagationDiagnostic:
    # fmt: off
    step      : int
    message   : str
    condition : float = float('inf')
    # fmt: on


@dataclass
class PropagationResult:
    """Predicted coefficients x_hat^k next to the moment-exact reference coefficients x_cpc^k."""

    # fmt: off
    predicted   : CoefficientSeries
    reference   : CoefficientSeries
    diagnostics : List[PropagationDiagnostic] = field(default_factory=list)
    # fmt: on

    def meanErrors(self) -> np.ndarray:
        return np.abs(self.predicted.means() - self.reference.means())

    def varianceErrors(self) -> np.ndarray:
        return np.abs(self.predicted.variances() - self.reference.variances())


def runLinearPropagator(
    ode: GPSurrogateODE,
    provider: ReferenceStatsProvider,
    windowLength: int,
    steps: int,
    step: float,
    freeRunning: bool = False,
    conditionLimit: float = CONDITION_LIMIT,
    printDebug: int = 0,
) -> PropagationResult:
    """
    Propagates coefficients with a linear model fitted to the moment-exact reference coefficients.

    For k < q, x_hat^{k+1} is an RK4 step of the GP surrogate. For k >= q, M^k is fitted on x_cpc^{k-q} ... x_cpc^k
    and x_hat^{k+1} = M^k x_cpc^k. In free-running mode, both branches start from x_hat^k instead of x_cpc^k.
    Windows without enough information fall back to the GP step and are recorded as diagnostics.
    """
    dimension = ode.dimension
    if windowLength < dimension:
        raise ValueError(
            f"The window length must be at least n (N + 1) = {dimension} to determine the transition matrix "
            f"but is {windowLength}!"
        )
    if steps <= windowLength:
        raise ValueError(f"The number of steps ({steps}) must be larger than the window length ({windowLength})!")
    if not step > 0:
        raise ValueError(f"The step size must be positive but is {step}!")
    if abs(provider.step - step) > 1e-12 * step:
        raise ValueError(f"The reference uses the step size {provider.step} but the propagator uses {step}!")

    basis = ode.basis
    reference = np.empty((steps + 1, dimension))
    predicted = np.empty((steps + 1, dimension))
    diagnostics: List[PropagationDiagnostic] = []

    reference[0] = reconstructCpc(provider, basis, 0)
    predicted[0] = reference[0]

    progressBar = ProgressBar(steps) if printDebug >= 2 else None
    for k in range(steps):
        start = predicted[k] if freeRunning else reference[k]

        if k < windowLength:
            predicted[k + 1] = rk4Step(ode.rhs, start, step)
        else:
            try:
                transition = fitTransition(reference[k - windowLength : k + 1], conditionLimit)
                predicted[k + 1] = transition @ start
            except RankDeficientWindowError as exception:
                diagnostics.append(PropagationDiagnostic(k, str(exception), exception.condition))
                if printDebug >= 1:
                    print(f"[Warning] Falling back to a GP step at step {k} because: {exception}")
                if printDebug >= 3:
                    traceback.print_exc()
                predicted[k + 1] = rk4Step(ode.rhs, start, step)

        reference[k + 1] = reconstructCpc(provider, basis, k + 1)
        if progressBar:
            progressBar.update(k + 1)

    return PropagationResult(
        predicted=CoefficientSeries(basis, step, predicted, ode.outputs),
        reference=CoefficientSeries(basis, step, reference, ode.outputs),
        diagnostics=diagnostics,
    )
