#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from momentpccore import UniformParameter  # noqa: E402
from momentpccore.LagrangeBasis import LagrangeBasis, defaultCollocationNodes  # noqa: E402
from momentpccore.utils import CoincidentNodesError  # noqa: E402


@pytest.mark.parametrize("count", [1, 2, 5, 11])
def test_cardinality(count):
    nodes = defaultCollocationNodes(UniformParameter.standard(1), count)
    lagrange = LagrangeBasis(nodes)
    assert lagrange.size == count
    assert lagrange.dims == 1
    assert np.allclose(lagrange.evaluate(nodes), np.eye(count), rtol=0, atol=1e-12)


def test_partition_of_unity(rng):
    lagrange = LagrangeBasis(defaultCollocationNodes(UniformParameter.standard(1), 6))
    points = rng.uniform(-1, 1, 20)
    assert np.allclose(lagrange.evaluate(points).sum(axis=1), 1.0, rtol=0, atol=1e-12)


def test_polynomial_reproduction(rng):
    nodes = defaultCollocationNodes(UniformParameter(((0.0, 2.0),)), 4)
    lagrange = LagrangeBasis(nodes)
    points = rng.uniform(0, 2, (15, 1))
    interpolated = lagrange.evaluate(points) @ (nodes[:, 0] ** 3 - nodes[:, 0])
    assert np.allclose(interpolated, points[:, 0] ** 3 - points[:, 0], rtol=0, atol=1e-12)


def test_multidimensional_nodes():
    param = UniformParameter(((0.0, 1.0), (-2.0, 2.0)))
    nodes = defaultCollocationNodes(param, 5)
    assert nodes.shape == (5, 2)
    assert param.contains(nodes).all()
    for dim in range(2):
        assert len(set(nodes[:, dim].tolist())) == 5
    assert np.allclose(LagrangeBasis(nodes).evaluate(nodes), np.eye(5), rtol=0, atol=1e-12)


def test_coincident_nodes():
    with pytest.raises(CoincidentNodesError):
        LagrangeBasis([0.0, 0.5, 0.0])
    with pytest.raises(CoincidentNodesError):
        LagrangeBasis([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        defaultCollocationNodes(UniformParameter.standard(1), 0)
