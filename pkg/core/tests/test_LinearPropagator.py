#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from momentpccore import UniformParameter, buildBasis  # noqa: E402
from momentpccore.candidates import linearDecay  # noqa: E402
from momentpccore.LinearPropagator import fitTransition, reconstructCpc, runLinearPropagator  # noqa: E402
from momentpccore.references import ExpansionSeriesReference, LinearDecayReference  # noqa: E402
from momentpccore.SurrogateODE import (  # noqa: E402
    CoefficientSeries,
    GPSurrogateODE,
    initialCoefficients,
    propagateGP,
)
from momentpccore.utils import DimensionMismatchError, RankDeficientWindowError  # noqa: E402


ODE_PARAMETER = UniformParameter(((0.0, 1.0),))


def gpTrajectory(order: int, steps: int, step: float):
    basis = buildBasis(ODE_PARAMETER, order)
    ode = GPSurrogateODE(basis, linearDecay)
    return ode, propagateGP(ode, initialCoefficients(basis, 1.0), steps, step)


class TestFitTransition:
    @staticmethod
    def test_recovery():
        matrix = np.array([[0.9, 0.1], [0.0, 0.8]])
        states = [np.array([1.0, 1.0])]
        for _ in range(3):
            states.append(matrix @ states[-1])
        assert np.allclose(fitTransition(states), matrix, rtol=0, atol=1e-10)

        geometric = 0.7 ** np.arange(6)
        assert fitTransition(geometric)[0, 0] == pytest.approx(0.7, abs=1e-12)

    @staticmethod
    def test_rank_deficient():
        with pytest.raises(RankDeficientWindowError) as exception:
            fitTransition(np.ones((2, 2)))
        assert exception.value.condition == float('inf')

        with pytest.raises(RankDeficientWindowError) as exception:
            fitTransition(np.tile([1.0, 2.0], (5, 1)))
        assert exception.value.condition > 1e12

        with pytest.raises(DimensionMismatchError):
            fitTransition(np.ones((1, 2)))

    @staticmethod
    def test_gram_condition():
        # cond(X) is about 1.7e7, which is fine by itself but squares to a Gram condition above 1e12.
        window = np.array([[1.0, 0.0], [0.0, 1e-7], [1.0, 1e-7], [0.5, 0.0]])
        with pytest.raises(RankDeficientWindowError) as exception:
            fitTransition(window)
        assert exception.value.condition > 1e12
        assert exception.value.condition == pytest.approx(np.linalg.cond(window[:-1]) ** 2, rel=1e-6)

        assert np.all(np.isfinite(fitTransition(window, conditionLimit=1e16)))


class TestReconstruction:
    @staticmethod
    def test_series_is_reproduced():
        ode, series = gpTrajectory(2, 10, 0.1)
        provider = ExpansionSeriesReference(series)
        for k in range(11):
            assert np.allclose(reconstructCpc(provider, ode.basis, k), series.states[k], rtol=0, atol=1e-10)


class TestLinearPropagator:
    @staticmethod
    def test_linear_surrogate_is_reproduced():
        ode, series = gpTrajectory(1, 20, 0.1)
        result = runLinearPropagator(ode, ExpansionSeriesReference(series), 2, 20, 0.1)

        assert result.predicted.states.shape == (21, 2)
        assert np.allclose(result.reference.states, series.states, rtol=0, atol=1e-10)
        assert np.allclose(result.predicted.states, series.states, rtol=0, atol=1e-8)
        assert result.meanErrors().shape == (21, 1)
        assert np.max(result.varianceErrors()) < 1e-8

    @staticmethod
    def test_linear_decay():
        basis = buildBasis(ODE_PARAMETER, 1)
        ode = GPSurrogateODE(basis, linearDecay)
        provider = LinearDecayReference(basis, 0.1)

        result = runLinearPropagator(ode, provider, 4, 30, 0.1)
        assert result.meanErrors()[0, 0] == 0
        assert np.max(result.meanErrors()) < 0.05
        assert np.max(result.varianceErrors()) < 0.05

        freeRunning = runLinearPropagator(ode, provider, 4, 30, 0.1, freeRunning=True)
        assert np.all(np.isfinite(freeRunning.predicted.states))
        # Both modes share the GP steps inside the first window.
        assert np.allclose(freeRunning.predicted.states[:2], result.predicted.states[:2])

    @staticmethod
    def test_fallback():
        basis = buildBasis(ODE_PARAMETER, 1)
        ode = GPSurrogateODE(basis, lambda states, params: np.zeros_like(states))
        constant = CoefficientSeries(basis, 0.1, np.tile([1.0, 0.0], (11, 1)))
        result = runLinearPropagator(ode, ExpansionSeriesReference(constant), 2, 10, 0.1)

        assert [diagnostic.step for diagnostic in result.diagnostics] == list(range(2, 10))
        assert all(diagnostic.condition == float('inf') for diagnostic in result.diagnostics)
        assert np.allclose(result.predicted.states, constant.states)

    @staticmethod
    def test_validation():
        ode, series = gpTrajectory(1, 10, 0.1)
        provider = ExpansionSeriesReference(series)
        with pytest.raises(ValueError):
            runLinearPropagator(ode, provider, 1, 10, 0.1)
        with pytest.raises(ValueError):
            runLinearPropagator(ode, provider, 2, 2, 0.1)
        with pytest.raises(ValueError):
            runLinearPropagator(ode, provider, 2, 10, 0.2)
