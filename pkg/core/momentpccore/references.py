#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Reference moments of stochastic ODE solutions, used to reconstruct moment-exact coefficients over time."""

import concurrent.futures

from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from .ExpectationEngine import MomentSet, QuadratureEngine
from .LegendreBasis import LegendreBasis
from .ProgressBar import ProgressBar
from .SurrogateODE import CoefficientSeries, Dynamics, rk4Step
from .utils import ConfigurationError, DimensionMismatchError, overrides


class ReferenceStatsProvider(ABC):
    """Supplies the true or reference mean, second moment and R = E[x Phi_1^T] of the state at time k h."""

    def __init__(self, basis: LegendreBasis, step: float):
        if not step > 0:
            raise ValueError(f"The step size must be positive but is {step}!")
        self.basis = basis
        self.step = float(step)

    @abstractmethod
    def moments(self, k: int) -> MomentSet:
        """Returns the reference moments at time step k >= 0."""

    def __call__(self, k: int) -> MomentSet:
        return self.moments(k)


class LinearDecayReference(ReferenceStatsProvider):
    """
    Closed-form moments of dx/dt = -a x with a deterministic initial value x0 and a uniformly distributed on
    the interval of the one-dimensional basis parameter. R is computed by Gauss-Legendre quadrature.
    """

    def __init__(self, basis: LegendreBasis, step: float, x0: float = 1.0, quadraturePoints: int = 64):
        super().__init__(basis, step)
        if basis.dims != 1:
            raise DimensionMismatchError("The linear decay reference requires a one-dimensional parameter!")
        (self.lower, self.upper), = basis.param.bounds
        self.x0 = float(x0)
        self.engine = QuadratureEngine(quadraturePoints)

    def _decayAverage(self, t: float) -> float:
        """E[exp(-a t)] = (exp(-lo t) - exp(-hi t)) / ((hi - lo) t)."""
        if t == 0:
            return 1.0
        width = self.upper - self.lower
        return float(-np.exp(-self.lower * t) * np.expm1(-width * t) / (width * t))

    def mean(self, t: float) -> float:
        return self.x0 * self._decayAverage(t)

    def secondMoment(self, t: float) -> float:
        return self.x0**2 * self._decayAverage(2 * t)

    def variance(self, t: float) -> float:
        return self.secondMoment(t) - self.mean(t) ** 2

    @overrides(ReferenceStatsProvider)
    def moments(self, k: int) -> MomentSet:
        t = k * self.step
        nodes, weights = self.engine.rule(self.basis.param)
        solutions = self.x0 * np.exp(-nodes[:, 0] * t)
        cross = (weights * solutions) @ self.basis.evaluate(nodes)[:, 1:]
        return MomentSet.fromMoments([self.mean(t)], [[self.secondMoment(t)]], cross.reshape(1, -1))


class MonteCarloReference(ReferenceStatsProvider):
    """
    Moments estimated from a seeded ensemble of RK4 trajectories of dx/dt = f(x, p). All parameter samples are
    drawn up front from one generator. The ensemble is split into chunks of fixed size, which are integrated
    in parallel, and the per-chunk sums are reduced in chunk order so that results do not depend on scheduling.
    """

    def __init__(
        self,
        basis: LegendreBasis,
        dynamics: Dynamics,
        x0,
        step: float,
        steps: int,
        samples: int = 100_000,
        seed: int = 0,
        chunkSize: int = 10_000,
        parallelization: int = 1,
        printDebug: int = 0,
    ):
        super().__init__(basis, step)
        if samples < 2:
            raise ValueError("The Monte Carlo ensemble needs at least two samples!")
        if steps < 0:
            raise ValueError("The number of steps must not be negative!")
        if chunkSize < 1:
            raise ValueError("The chunk size must be positive!")

        # fmt: off
        self.dynamics        = dynamics
        self.x0              = np.atleast_1d(np.asarray(x0, dtype=float))
        self.steps           = int(steps)
        self.samples         = int(samples)
        self.seed            = int(seed)
        self.chunkSize       = int(chunkSize)
        self.parallelization = max(1, int(parallelization))
        self.printDebug      = printDebug
        # fmt: on

        self._sums: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = None

    @property
    def outputs(self) -> int:
        return self.x0.size

    def _integrateChunk(self, params: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.outputs
        phi1 = self.basis.evaluate(params)[:, 1:]
        states = np.tile(self.x0, (params.shape[0], 1))

        # fmt: off
        sums       = np.empty((self.steps + 1, n))
        squares    = np.empty((self.steps + 1, n, n))
        fourth     = np.empty((self.steps + 1, n))
        crossSums  = np.empty((self.steps + 1, n, phi1.shape[1]))
        # fmt: on

        def rhs(x):
            return np.asarray(self.dynamics(x, params), dtype=float).reshape(x.shape)

        for k in range(self.steps + 1):
            if k > 0:
                states = rk4Step(rhs, states, self.step)
            sums[k] = states.sum(axis=0)
            squares[k] = states.T @ states
            fourth[k] = np.sum(states**4, axis=0)
            crossSums[k] = states.T @ phi1
        return sums, squares, fourth, crossSums

    def _simulate(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if self._sums is not None:
            return self._sums

        params = self.basis.param.sample(np.random.default_rng(self.seed), self.samples)
        chunks = [params[i : i + self.chunkSize] for i in range(0, self.samples, self.chunkSize)]
        if self.printDebug >= 2:
            print(f"[Info] Integrating {self.samples} Monte Carlo paths over {self.steps} steps in {len(chunks)} chunks")

        progressBar = ProgressBar(len(chunks), label="Chunk") if self.printDebug >= 2 else None
        with concurrent.futures.ThreadPoolExecutor(self.parallelization) as pool:
            futures = [pool.submit(self._integrateChunk, chunk) for chunk in chunks]
            results = []
            for i, future in enumerate(futures):
                results.append(future.result())
                if progressBar:
                    progressBar.update(i + 1)

        total = results[0]
        for result in results[1:]:
            total = tuple(a + b for a, b in zip(total, result))
        self._sums = tuple(value / self.samples for value in total)  # type: ignore
        return self._sums  # type: ignore

    def _checkIndex(self, k: int) -> None:
        if not 0 <= k <= self.steps:
            raise ConfigurationError(f"Time step {k} is outside of the simulated range 0 ... {self.steps}!")

    @overrides(ReferenceStatsProvider)
    def moments(self, k: int) -> MomentSet:
        self._checkIndex(k)
        means, seconds, _, cross = self._simulate()
        return MomentSet.fromMoments(means[k], seconds[k], cross[k])

    def standardErrors(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Standard errors of the estimated means and of the diagonal of the second moment at step k."""
        self._checkIndex(k)
        means, seconds, fourth, _ = self._simulate()
        squares = np.diag(seconds[k])
        meanErrors = np.sqrt(np.maximum(squares - means[k] ** 2, 0) / (self.samples - 1))
        secondErrors = np.sqrt(np.maximum(fourth[k] - squares**2, 0) / (self.samples - 1))
        return meanErrors, secondErrors


class ExpansionSeriesReference(ReferenceStatsProvider):
    """Moments of a given coefficient series, e.g., of a surrogate trajectory."""

    def __init__(self, series: CoefficientSeries):
        super().__init__(series.basis, series.step)
        self.series = series

    @overrides(ReferenceStatsProvider)
    def moments(self, k: int) -> MomentSet:
        if not 0 <= k < len(self.series):
            raise ConfigurationError(f"Time step {k} is outside of the series with {len(self.series)} states!")
        coeffs = self.series.coefficients(k)
        return MomentSet.fromMoments(
            coeffs[:, 0], self.series.secondMoments(k), coeffs[:, 1:] * self.basis.nonConstantNorms
        )
