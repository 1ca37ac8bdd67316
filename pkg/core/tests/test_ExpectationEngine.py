#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from momentpccore import UniformParameter, buildBasis  # noqa: E402
from momentpccore.ExpectationEngine import (  # noqa: E402
    MomentSet,
    MonteCarloEngine,
    QuadratureEngine,
    WeightedGridEngine,
    momentsOf,
)
from momentpccore.utils import DimensionMismatchError, EvaluationError  # noqa: E402


class TestQuadratureEngine:
    @staticmethod
    def test_exactness():
        standard = UniformParameter.standard(1)
        assert QuadratureEngine(3).expect(standard, lambda x: x[:, 0] ** 4)[0] == pytest.approx(1 / 5, abs=1e-15)
        assert QuadratureEngine(2).expect(UniformParameter(((0.0, 1.0),)), lambda x: x[:, 0] ** 2)[0] == pytest.approx(
            1 / 3, abs=1e-15
        )

        square = UniformParameter.standard(2)
        value = QuadratureEngine(2).expect(square, lambda x: x[:, 0] ** 2 * x[:, 1] ** 2)[0]
        assert value == pytest.approx(1 / 9, abs=1e-15)

    @staticmethod
    def test_rule():
        param = UniformParameter(((0.0, 1.0), (2.0, 3.0)))
        nodes, weights = QuadratureEngine(4).rule(param)
        assert nodes.shape == (16, 2)
        assert weights.sum() == pytest.approx(1.0, abs=1e-15)
        assert param.contains(nodes).all()
        assert QuadratureEngine.forOrder(3).points == 10

        with pytest.raises(ValueError):
            QuadratureEngine(0)

    @staticmethod
    def test_vector_valued():
        value = QuadratureEngine(8).expect(UniformParameter.standard(1), lambda x: np.hstack([x, x**2]))
        assert value.shape == (2,)
        assert np.allclose(value, [0.0, 1 / 3], rtol=0, atol=1e-15)

    @staticmethod
    def test_evaluation_error():
        with pytest.raises(EvaluationError):
            QuadratureEngine(4).expect(UniformParameter.standard(1), lambda x: np.full(x.shape[0], np.nan))


class TestMonteCarloEngine:
    @staticmethod
    def test_determinism():
        param = UniformParameter.standard(2)
        nodes1, weights1 = MonteCarloEngine(100, seed=3).rule(param)
        nodes2, _ = MonteCarloEngine(100, seed=3).rule(param)
        nodes3, _ = MonteCarloEngine(100, seed=4).rule(param)

        assert np.array_equal(nodes1, nodes2)
        assert not np.array_equal(nodes1, nodes3)
        assert np.allclose(weights1, 1 / 100)
        assert param.contains(nodes1).all()

    @staticmethod
    def test_standard_errors():
        engine = MonteCarloEngine(10_000, seed=1)
        param = UniformParameter.standard(1)
        estimate = engine.expect(param, lambda x: x[:, 0] ** 2)[0]
        error = engine.standardErrors(param, lambda x: x[:, 0] ** 2)[0]
        assert 0 < error < 0.01
        assert abs(estimate - 1 / 3) < 5 * error

    @staticmethod
    def test_agrees_with_quadrature():
        param = UniformParameter(((0.0, 1.0), (-1.0, 2.0)))
        basis = buildBasis(param, 2)

        def function(points):
            return np.column_stack([points[:, 0] ** 2 * points[:, 1] + points[:, 1], points[:, 0] * points[:, 1] ** 2])

        def products(points):
            values = function(points)
            phi1 = basis.evaluate(points)[:, 1:]
            second = values[:, :, None] * values[:, None, :]
            cross = values[:, :, None] * phi1[:, None, :]
            return np.hstack([values, second.reshape(len(points), -1), cross.reshape(len(points), -1)])

        def flatten(moments):
            return np.concatenate([moments.mean, moments.second.ravel(), moments.cross.ravel()])

        engine = MonteCarloEngine(1_000_000, seed=7)
        exact = flatten(momentsOf(QuadratureEngine(8), param, basis, function))
        estimate = flatten(momentsOf(engine, param, basis, function))
        errors = engine.standardErrors(param, products)

        assert estimate.shape == exact.shape == errors.shape == (2 + 4 + 2 * 5,)
        assert np.all(errors > 0)
        assert np.all(np.abs(estimate - exact) < 5 * errors)


class TestWeightedGridEngine:
    @staticmethod
    def test_validation():
        with pytest.raises(ValueError):
            WeightedGridEngine([0.0, 1.0], [1.5, -0.5])
        with pytest.raises(ValueError):
            WeightedGridEngine([0.0, 1.0], [0.5, 0.6])
        with pytest.raises(DimensionMismatchError):
            WeightedGridEngine([0.0, 1.0], [1.0])

        engine = WeightedGridEngine([[0.0, 1.0]], [1.0])
        with pytest.raises(DimensionMismatchError):
            engine.rule(UniformParameter.standard(1))

    @staticmethod
    def test_fromCsv(tmpdir):
        path = os.path.join(tmpdir, "grid.csv")
        with open(path, 'wt', encoding='utf-8') as file:
            file.write("# x, w\n-0.5, 0.25\n0.0, 0.5\n0.5, 0.25\n")

        engine = WeightedGridEngine.fromCsv(path)
        nodes, weights = engine.rule(UniformParameter.standard(1))
        assert nodes.shape == (3, 1)
        assert weights.tolist() == [0.25, 0.5, 0.25]
        assert engine.expect(UniformParameter.standard(1), lambda x: x[:, 0] ** 2)[0] == pytest.approx(0.125)


class TestMoments:
    @staticmethod
    def test_momentsOf():
        param = UniformParameter.standard(1)
        moments = momentsOf(QuadratureEngine(8), param, buildBasis(param, 2), lambda x: x[:, 0])
        assert moments.outputs == 1
        assert moments.mean[0] == pytest.approx(0.0, abs=1e-15)
        assert moments.second[0, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert moments.covariance[0, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert np.allclose(moments.cross, [[1 / 3, 0.0]], rtol=0, atol=1e-15)

    @staticmethod
    def test_vector_moments():
        param = UniformParameter(((0.0, 1.0),))
        moments = momentsOf(QuadratureEngine(8), param, buildBasis(param, 3), lambda x: np.hstack([x, 1 - x]))
        assert moments.cross.shape == (2, 3)
        assert np.allclose(moments.covariance, [[1 / 12, -1 / 12], [-1 / 12, 1 / 12]], rtol=0, atol=1e-15)
        assert np.allclose(moments.second, moments.second.T)

    @staticmethod
    def test_fromMoments():
        moments = MomentSet.fromMoments([1.0, 2.0], [[2.0, 2.5], [2.5, 5.0]], np.zeros((2, 3)))
        assert np.allclose(moments.covariance, [[1.0, 0.5], [0.5, 1.0]])

        with pytest.raises(DimensionMismatchError):
            MomentSet.fromMoments([1.0, 2.0], [[1.0]], np.zeros((2, 3)))
        with pytest.raises(DimensionMismatchError):
            momentsOf(QuadratureEngine(4), UniformParameter.standard(2), buildBasis(UniformParameter.standard(1), 2), sum)
