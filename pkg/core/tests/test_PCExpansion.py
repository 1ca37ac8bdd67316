#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from momentpccore import LagrangeBasis, QuadratureEngine, UniformParameter, buildBasis  # noqa: E402
from momentpccore.PCExpansion import (  # noqa: E402
    PCExpansion,
    SCInterpolant,
    approximationCost,
    expansionMomentOrder,
    expansionMoments,
    loadExpansion,
    saveExpansion,
)
from momentpccore.utils import DimensionMismatchError, MomentPCError  # noqa: E402


class TestPCExpansion:
    @staticmethod
    def test_evaluate():
        expansion = PCExpansion(buildBasis(UniformParameter.standard(1), 2), [1.0, 2.0, 3.0])
        assert expansion.coeffs.shape == (1, 3)
        assert expansion.outputs == 1
        assert expansion([0.5]).shape == (1, 1)
        assert expansion([0.5])[0, 0] == pytest.approx(1.625)

        with pytest.raises(ValueError):
            expansion.coeffs[0, 0] = 0.0
        with pytest.raises(DimensionMismatchError):
            PCExpansion(expansion.basis, [1.0, 2.0])

    @staticmethod
    def test_moments():
        expansion = PCExpansion(buildBasis(UniformParameter.standard(1), 2), [1.0, 2.0, 3.0])
        mean, second = expansionMoments(expansion)
        assert mean.tolist() == [1.0]
        assert second[0, 0] == pytest.approx(1 + 4 / 3 + 9 / 5)
        assert expansionMomentOrder(expansion, QuadratureEngine(8), 1)[0] == pytest.approx(1.0)
        assert expansionMomentOrder(expansion, QuadratureEngine(8), 2)[0] == pytest.approx(second[0, 0])

        with pytest.raises(ValueError):
            expansionMomentOrder(expansion, QuadratureEngine(8), 0)

    @staticmethod
    def test_vector_moments():
        basis = buildBasis(UniformParameter(((0.0, 1.0), (0.0, 1.0))), 1)
        expansion = PCExpansion(basis, [[1.0, 0.5, 0.0], [0.0, 1.0, 2.0]])
        mean, second = expansionMoments(expansion)
        assert np.allclose(mean, [1.0, 0.0])
        assert np.allclose(second, [[1 + 0.25 / 3, 0.5 / 3], [0.5 / 3, 5 / 3]])

    @staticmethod
    def test_approximationCost():
        param = UniformParameter.standard(1)
        basis = buildBasis(param, 2)
        engine = QuadratureEngine(8)
        exact = PCExpansion(basis, [1 / 3, 0.0, 2 / 3])
        assert approximationCost(engine, basis, lambda x: x[:, 0] ** 2, exact) == pytest.approx(0.0, abs=1e-15)
        assert approximationCost(engine, basis, lambda x: x[:, 0], PCExpansion(basis, np.zeros(3))) == pytest.approx(
            1 / 3
        )

    @staticmethod
    def test_save_and_load(tmpdir):
        basis = buildBasis(UniformParameter(((0.0, 1.0), (-2.0, 3.0))), 2)
        expansion = PCExpansion(basis, np.random.default_rng(1).standard_normal((2, basis.size)))

        path = os.path.join(tmpdir, "expansion.csv")
        saveExpansion(expansion, path)
        loaded = loadExpansion(path)

        assert loaded.param == expansion.param
        assert loaded.basis.indices == basis.indices
        assert np.array_equal(loaded.coeffs, expansion.coeffs)

    @staticmethod
    def test_load_invalid(tmpdir):
        path = os.path.join(tmpdir, "invalid.csv")
        with open(path, 'wt', encoding='utf-8') as file:
            file.write("1,2,3\n")
        with pytest.raises(MomentPCError):
            loadExpansion(path)


class TestSCInterpolant:
    @staticmethod
    def test_interpolant():
        param = UniformParameter.standard(1)
        lagrange = LagrangeBasis([-0.5, 0.5])
        interpolant = SCInterpolant(param, lagrange, [1.0, 3.0])
        assert interpolant.outputs == 1
        assert interpolant([0.0])[0, 0] == pytest.approx(2.0)
        assert expansionMomentOrder(interpolant, QuadratureEngine(4), 1)[0] == pytest.approx(2.0)

        with pytest.raises(DimensionMismatchError):
            SCInterpolant(param, lagrange, [1.0, 2.0, 3.0])
        with pytest.raises(DimensionMismatchError):
            SCInterpolant(UniformParameter.standard(2), lagrange, [1.0, 3.0])
