#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from momentpccore.utils import (  # noqa: E402
    ConfigurationError,
    DimensionMismatchError,
    EvaluationError,
    IntegrationError,
    MACHINE_EPSILON,
    MomentPCError,
    RankDeficientWindowError,
    IllConditionedError,
    asPoints,
    evaluateAt,
    floorError,
    overrides,
    resolveCallable,
    unvec,
    vec,
)


def test_vec():
    matrix = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    assert vec(matrix).tolist() == [1.0, 3.0, 5.0, 2.0, 4.0, 6.0]
    assert np.array_equal(unvec(vec(matrix), 3), matrix)
    assert unvec(np.arange(4.0), 1).shape == (1, 4)

    with pytest.raises(DimensionMismatchError):
        unvec(np.arange(5.0), 2)
    with pytest.raises(DimensionMismatchError):
        unvec(np.zeros((2, 2)), 2)


def test_floorError():
    assert floorError(0.0) == MACHINE_EPSILON
    assert floorError(-0.5) == 0.5
    assert floorError(1e-20, floor=1e-30) == 1e-20


def test_asPoints():
    assert asPoints([0.1, 0.2], 2).shape == (1, 2)
    assert asPoints([0.1, 0.2, 0.3], 1).shape == (3, 1)
    assert asPoints(0.5, 1).shape == (1, 1)
    assert asPoints(np.zeros((4, 3)), 3).shape == (4, 3)

    with pytest.raises(DimensionMismatchError):
        asPoints(np.zeros((3, 2)), 1)
    with pytest.raises(DimensionMismatchError):
        asPoints([0.1, 0.2, 0.3], 2)


def test_evaluateAt():
    points = np.array([[-1.0], [0.0], [1.0]])
    assert evaluateAt(lambda x: x[:, 0] ** 2, points).shape == (3, 1)
    assert evaluateAt(lambda x: np.hstack([x, 2 * x]), points).shape == (3, 2)
    assert np.array_equal(evaluateAt(lambda x: 3.0, points), np.full((3, 1), 3.0))

    with pytest.raises(EvaluationError) as exception:
        evaluateAt(lambda x: np.where(x[:, 0] >= 0, np.inf, 1.0), points)
    assert exception.value.node.tolist() == [0.0]

    with pytest.raises(DimensionMismatchError):
        evaluateAt(lambda x: np.ones(5), points)


def test_exception_hierarchy():
    assert issubclass(IntegrationError, EvaluationError)
    assert issubclass(RankDeficientWindowError, IllConditionedError)
    assert issubclass(DimensionMismatchError, ValueError)
    for exceptionType in [ConfigurationError, EvaluationError, IllConditionedError]:
        assert issubclass(exceptionType, MomentPCError)

    error = IntegrationError("Stage failed!", stage=3)
    assert error.stage == 3
    assert error.node is None


def test_resolveCallable():
    assert resolveCallable('math:sqrt') is math.sqrt
    assert resolveCallable('os.path:join') is os.path.join

    for path in ['math', 'math:', 'math:doesNotExist', 'momentpc_does_not_exist:f', 'math:pi']:
        with pytest.raises(ConfigurationError):
            resolveCallable(path)


def test_overrides():
    class Base:
        def run(self):
            return 1

    class Derived(Base):
        @overrides(Base)
        def run(self):
            return 2

    assert Derived().run() == 2

    with pytest.raises(AssertionError):

        class Broken(Base):  # pylint: disable=unused-variable
            @overrides(Base)
            def walk(self):
                return 3
