#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Invariant suites which can be run on an installation without the test dependencies."""

import json
import traceback

from dataclasses import asdict, dataclass, field
from typing import Callable, List, Tuple

import numpy as np
import scipy.linalg

from .approximators import defaultLSGrid, gridResidual, solveGP, solveLS
from .candidates import CANDIDATES, nonlinearDecay
from .constrained import (
    MomentConstraint,
    assembleMomentMatching,
    gpCostGap,
    solveConstrainedGP,
    solveConstrainedLS,
)
from .ExpectationEngine import MonteCarloEngine, QuadratureEngine, momentsOf
from .LagrangeBasis import LagrangeBasis, defaultCollocationNodes
from .LegendreBasis import buildBasis
from .LinearPropagator import fitTransition
from .PCExpansion import PCExpansion, approximationCost, expansionMoments
from .SurrogateODE import GPSurrogateODE
from .UniformParameter import UniformParameter


SELFTEST_SEED = 12345


@dataclass
class SuiteResult:
    # fmt: off
    name      : str
    passed    : bool
    maxError  : float
    tolerance : float
    message   : str = ''
    # fmt: on


@dataclass
class SelfTestReport:
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    def toJson(self) -> str:
        suites = []
        for suite in self.suites:
            entry = asdict(suite)
            entry['maxError'] = entry['maxError'] if np.isfinite(entry['maxError']) else None
            suites.append(entry)
        return json.dumps({'suites': suites, 'passed': self.passed}, indent=2)


def randomFeasibleU(rng: np.random.Generator, rows: int, columns: int) -> np.ndarray:
    """Random matrix with orthonormal rows, obtained from the QR decomposition of a Gaussian matrix."""
    q, _ = scipy.linalg.qr(rng.standard_normal((columns, rows)), mode='economic')
    return q.T


def randomMoments(rng: np.random.Generator, outputs: int) -> Tuple[np.ndarray, np.ndarray]:
    """Random mean and second moment with a positive definite covariance."""
    factor = rng.standard_normal((outputs, outputs))
    covariance = factor @ factor.T + 0.1 * np.eye(outputs)
    mean = rng.standard_normal(outputs)
    return mean, covariance + np.outer(mean, mean)


def _basisOrthogonality() -> Tuple[float, float]:
    error = 0.0
    problems = [
        (UniformParameter.standard(1), 8),
        (UniformParameter(((0.0, 1.0),)), 5),
        (UniformParameter(((-1.0, 1.0), (2.0, 5.0))), 3),
    ]
    for param, order in problems:
        engine = QuadratureEngine(order + 1)
        nodes, weights = engine.rule(param)
        basis = buildBasis(param, order)
        phi = basis.evaluate(nodes)
        gram = phi.T @ (weights[:, None] * phi)
        offDiagonal = gram - np.diag(np.diag(gram))
        error = max(error, float(np.max(np.abs(offDiagonal))))
        error = max(error, float(np.max(np.abs(np.diag(gram) / basis.norms - 1))))
    return error, 1e-12


def _lagrangeCardinality() -> Tuple[float, float]:
    error = 0.0
    for count in range(1, 12):
        nodes = defaultCollocationNodes(UniformParameter.standard(1), count)
        error = max(error, float(np.max(np.abs(LagrangeBasis(nodes).evaluate(nodes) - np.eye(count)))))
    nodes = defaultCollocationNodes(UniformParameter.standard(2), 5)
    error = max(error, float(np.max(np.abs(LagrangeBasis(nodes).evaluate(nodes) - np.eye(5)))))
    return error, 1e-12


def _engineDeterminism() -> Tuple[float, float]:
    param = UniformParameter.standard(2)
    basis = buildBasis(param, 2)
    engine = MonteCarloEngine(10_000, seed=SELFTEST_SEED)

    def function(points):
        return np.sin(points[:, 0]) * points[:, 1] ** 2

    first = momentsOf(engine, param, basis, function)
    second = momentsOf(engine, param, basis, function)
    return float(np.max(np.abs(first.cross - second.cross)) + abs(first.second - second.second).max()), 0.0


def _gpMeanExactness() -> Tuple[float, float]:
    error = 0.0
    for candidate in CANDIDATES.values():
        truth = candidate.trueMoment(1)
        for kappa in range(1, 11):
            expansion = solveGP(QuadratureEngine(64), buildBasis(candidate.param, kappa), candidate)
            error = max(error, abs(expansionMoments(expansion)[0][0] - truth))
    return error, 1e-13


def _momentExactRecovery() -> Tuple[float, float]:
    rng = np.random.default_rng(SELFTEST_SEED)
    error = 0.0
    for outputs in (1, 2, 3):
        for nonConstant in range(outputs, outputs + 5):
            basis = buildBasis(UniformParameter.standard(1), nonConstant)
            mean, second = randomMoments(rng, outputs)
            constraint = MomentConstraint.fromMoments(mean, second)
            expansion = assembleMomentMatching(constraint, basis, randomFeasibleU(rng, outputs, nonConstant))
            estimatedMean, estimatedSecond = expansionMoments(expansion)
            scale = max(1.0, float(np.max(np.abs(second))))
            error = max(error, float(np.max(np.abs(estimatedMean - mean))) / scale)
            error = max(error, float(np.max(np.abs(estimatedSecond - second))) / scale)
    return error, 1e-10


def _constrainedMoments() -> Tuple[float, float]:
    engine = QuadratureEngine(64)
    error = 0.0
    for candidate in CANDIDATES.values():
        truths = np.array([candidate.trueMoment(1), candidate.trueMoment(2)])
        for kappa in range(1, 11):
            basis = buildBasis(candidate.param, kappa)
            moments = momentsOf(engine, candidate.param, basis, candidate)
            for expansion in (
                solveConstrainedGP(moments, basis),
                solveConstrainedLS(defaultLSGrid(basis), moments, basis, candidate),
            ):
                mean, second = expansionMoments(expansion)
                error = max(error, float(np.max(np.abs(np.array([mean[0], second[0, 0]]) - truths))))
    return error, 1e-12


def _scalarProblems():
    engine = QuadratureEngine(64)
    for candidate in CANDIDATES.values():
        for kappa in (1, 2, 3, 4):
            basis = buildBasis(candidate.param, kappa)
            yield candidate, basis, momentsOf(engine, candidate.param, basis, candidate)


def _projectionOptimality() -> Tuple[float, float]:
    rng = np.random.default_rng(SELFTEST_SEED)
    worst = 0.0
    for _, basis, moments in _scalarProblems():
        optimum = solveConstrainedGP(moments, basis)
        constraint = MomentConstraint.fromMomentSet(moments)
        # Recover U* from the assembled coefficients.
        uOptimal = np.linalg.lstsq(
            constraint.cholesky, optimum.coeffs[:, 1:] * np.sqrt(basis.nonConstantNorms), rcond=None
        )[0]
        gapOptimal = gpCostGap(moments, basis, uOptimal)
        for _ in range(100):
            gap = gpCostGap(moments, basis, randomFeasibleU(rng, 1, basis.size - 1))
            worst = max(worst, gapOptimal - gap)
    return worst, 1e-10


def _randomVectorProblems(rng: np.random.Generator, count: int = 20):
    """Random polynomial functions with two or three outputs, approximated with a lower order basis."""
    engine = QuadratureEngine(64)
    param = UniformParameter.standard(1)
    for i in range(count):
        outputs = 2 + i % 2
        basis = buildBasis(param, outputs + i % 4)
        fullBasis = buildBasis(param, basis.order + 3)
        coeffs = rng.standard_normal((outputs, fullBasis.size))

        def function(points, fullBasis=fullBasis, coeffs=coeffs):
            return fullBasis.evaluate(points) @ coeffs.T

        yield function, basis, momentsOf(engine, param, basis, function)


def _costGapIdentity() -> Tuple[float, float]:
    rng = np.random.default_rng(SELFTEST_SEED)
    engine = QuadratureEngine(64)
    error = 0.0
    for candidate, basis, moments in _scalarProblems():
        constraint = MomentConstraint.fromMomentSet(moments)
        costGP = approximationCost(engine, basis, candidate, solveGP(engine, basis, candidate))
        for _ in range(5):
            U = randomFeasibleU(rng, 1, basis.size - 1)
            gap = gpCostGap(moments, basis, U)
            cost = approximationCost(engine, basis, candidate, assembleMomentMatching(constraint, basis, U))
            error = max(error, abs(cost - costGP - gap), max(0.0, -gap))

    for function, basis, moments in _randomVectorProblems(rng):
        constraint = MomentConstraint.fromMomentSet(moments)
        costGP = approximationCost(engine, basis, function, solveGP(engine, basis, function))
        for i in range(100):
            U = randomFeasibleU(rng, constraint.outputs, basis.size - 1)
            gap = gpCostGap(moments, basis, U)
            error = max(error, max(0.0, -gap))
            if i < 5:
                cost = approximationCost(engine, basis, function, assembleMomentMatching(constraint, basis, U))
                error = max(error, abs(cost - costGP - gap))
    return error, 1e-8


def _lsOptimality() -> Tuple[float, float]:
    rng = np.random.default_rng(SELFTEST_SEED)
    worst = 0.0
    for candidate in CANDIDATES.values():
        for kappa in (1, 3, 5):
            basis = buildBasis(candidate.param, kappa)
            grid = defaultLSGrid(basis)
            expansion = solveLS(grid, basis, candidate)
            residual = gridResidual(grid, expansion, candidate)
            for _ in range(20):
                delta = rng.standard_normal(expansion.coeffs.shape)
                delta *= 1e-3 / np.linalg.norm(delta)
                perturbed = gridResidual(grid, PCExpansion(basis, expansion.coeffs + delta), candidate)
                worst = max(worst, residual - perturbed)
    return worst, 1e-12


def _transitionRecovery() -> Tuple[float, float]:
    matrix = np.array([[0.9, 0.1], [0.0, 0.8]])
    states = [np.array([1.0, 1.0])]
    for _ in range(3):
        states.append(matrix @ states[-1])
    error = float(np.max(np.abs(fitTransition(states) - matrix)))

    geometric = 0.7 ** np.arange(6)
    error = max(error, float(abs(fitTransition(geometric)[0, 0] - 0.7)))
    return error, 1e-10


def _gpResidualUnbiased() -> Tuple[float, float]:
    rng = np.random.default_rng(SELFTEST_SEED)
    param = UniformParameter(((0.0, 1.0),))
    error = 0.0
    for kappa in (1, 2, 3):
        basis = buildBasis(param, kappa)
        engine = QuadratureEngine(32)
        ode = GPSurrogateODE(basis, nonlinearDecay, engine=engine)
        nodes, weights = engine.rule(param)
        for _ in range(20):
            xpc = rng.uniform(-1.0, 1.0, basis.size)
            xpc[0] = rng.uniform(0.0, 2.0)
            error = max(error, float(np.max(np.abs(weights @ ode.residual(xpc, nodes)))))
    return error, 1e-8


SUITES: List[Tuple[str, Callable[[], Tuple[float, float]]]] = [
    ('basis-orthogonality', _basisOrthogonality),
    ('lagrange-cardinality', _lagrangeCardinality),
    ('engine-determinism', _engineDeterminism),
    ('gp-mean-exactness', _gpMeanExactness),
    ('moment-exact-recovery', _momentExactRecovery),
    ('constrained-moment-exactness', _constrainedMoments),
    ('projection-optimality', _projectionOptimality),
    ('cost-gap-identity', _costGapIdentity),
    ('ls-optimality', _lsOptimality),
    ('transition-recovery', _transitionRecovery),
    ('gp-residual-unbiased', _gpResidualUnbiased),
]


def runSelfTest(printDebug: int = 0) -> SelfTestReport:
    """Runs all invariant suites. Failures and exceptions are reported, not raised."""
    report = SelfTestReport()
    for name, suite in SUITES:
        try:
            maxError, tolerance = suite()
            result = SuiteResult(name, bool(maxError <= tolerance), float(maxError), tolerance)
        except Exception as exception:
            result = SuiteResult(name, False, float('inf'), 0.0, f"{type(exception).__name__}: {exception}")
            if printDebug >= 3:
                traceback.print_exc()

        if printDebug >= 2 or (printDebug >= 1 and not result.passed):
            state = "passed" if result.passed else "FAILED"
            print(
                f"[Info] Suite {name} {state} with a maximum error of {result.maxError:.3e} "
                f"(tolerance {result.tolerance:.1e})"
            )
        report.suites.append(result)
    return report
