#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""MomentPC Core

This is the backend of momentpc. It is intended to be used as a library.

It builds polynomial chaos surrogates f(x) ~ F Phi(x) of functions of uniformly
distributed random parameters and of the solutions of stochastic ODEs.

 - LegendreBasis: Total-degree basis of (shifted) Legendre polynomials.
 - ExpectationEngine: Gauss-Legendre quadrature, Monte Carlo, or user-supplied
                      weighted grids for expectations and moments.
 - solveGP, solveSC, solveLS: Galerkin projection, stochastic collocation and
                              least squares coefficients.
 - solveConstrainedGP, solveConstrainedLS: Coefficients which reproduce the mean
                                           and the second moment of f exactly.
 - GPSurrogateODE: Deterministic ODE for the coefficients of a stochastic ODE.
 - runLinearPropagator: Propagates coefficients with linear models fitted to
                        moment-exact reference coefficients.

Example:

    import numpy as np
    import momentpccore as mpc

    param = mpc.UniformParameter.standard(1)
    basis = mpc.buildBasis(param, 2)
    engine = mpc.QuadratureEngine(64)

    def f(points):
        return np.sin(3 * points[:, 0]) ** 2

    moments = mpc.momentsOf(engine, param, basis, f)
    expansion = mpc.solveConstrainedGP(moments, basis)
    print(mpc.expansionMoments(expansion))
"""

from .version import __version__

from .utils import (
    MomentPCError,
    DimensionMismatchError,
    EvaluationError,
    IntegrationError,
    CoincidentNodesError,
    IllConditionedError,
    RankDeficientWindowError,
    NotPositiveSemidefiniteError,
    SingularCovarianceError,
    InfeasibleError,
    ConfigurationError,
    vec,
    unvec,
)

from .UniformParameter import UniformParameter
from .LegendreBasis import LegendreBasis, MultiIndex, basisSize, buildBasis, totalDegreeIndices
from .LagrangeBasis import LagrangeBasis, defaultCollocationNodes
from .ExpectationEngine import (
    ExpectationEngine,
    MomentSet,
    MonteCarloEngine,
    QuadratureEngine,
    WeightedGridEngine,
    momentsOf,
)
from .PCExpansion import (
    PCExpansion,
    SCInterpolant,
    approximationCost,
    expansionMomentOrder,
    expansionMoments,
    loadExpansion,
    saveExpansion,
)
from .approximators import defaultLSGrid, defaultSCNodes, solveGP, solveLS, solveSC
from .constrained import (
    FeasibleU,
    MomentConstraint,
    assembleMomentMatching,
    gpCostGap,
    projectToOrthonormalRows,
    psdSquareRoot,
    solveConstrainedGP,
    solveConstrainedLS,
)
from .SurrogateODE import (
    CoefficientSeries,
    GPSurrogateODE,
    initialCoefficients,
    linearSystemMatrix,
    propagateGP,
    rk4Step,
)
from .references import (
    ExpansionSeriesReference,
    LinearDecayReference,
    MonteCarloReference,
    ReferenceStatsProvider,
)
from .LinearPropagator import PropagationResult, fitTransition, reconstructCpc, runLinearPropagator
from .candidates import CANDIDATES, getCandidate
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ResultTable,
    loadConfig,
    runExperiment,
    runMomentSweep,
    runOdeExperiment,
    runWindowSweep,
)
from .selftest import runSelfTest
