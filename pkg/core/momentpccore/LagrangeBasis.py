#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import numpy as np

from numpy.polynomial.legendre import leggauss

from .UniformParameter import UniformParameter
from .utils import CoincidentNodesError, asPoints


class LagrangeBasis:
    """
    Interpolation basis psi_0 ... psi_P over the given nodes. For multiple dimensions the product form
    psi_i(x) = prod_{j != i} prod_l (x_l - x_{j,l}) / (x_{i,l} - x_{j,l}) is used, which requires all nodes
    to differ in every component.
    """

    def __init__(self, nodes):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes.reshape(-1, 1)
        if nodes.ndim != 2 or nodes.shape[0] < 1:
            raise ValueError(f"Expected a non-empty (P, d) array of nodes but got shape {nodes.shape}!")

        differences = nodes[:, None, :] - nodes[None, :, :]  # (i, j, l)
        offDiagonal = ~np.eye(nodes.shape[0], dtype=bool)
        if np.any(differences[offDiagonal] == 0):
            i, j = np.argwhere(np.logical_and(offDiagonal, np.any(differences == 0, axis=2)))[0]
            raise CoincidentNodesError(
                f"Interpolation nodes {i} and {j} coincide in at least one component: "
                f"{nodes[i].tolist()} and {nodes[j].tolist()}!"
            )

        # fmt: off
        self.nodes = nodes
        self._denominators = np.prod(
            np.where(offDiagonal, np.prod(differences, axis=2), 1.0), axis=1
        )
        # fmt: on
        self.nodes.setflags(write=False)

    @property
    def dims(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def __len__(self) -> int:
        return self.size

    def evaluate(self, points) -> np.ndarray:
        """Returns Psi evaluated at each point as an (M, P + 1) array."""
        points = asPoints(points, self.dims)
        factors = np.prod(points[:, None, :] - self.nodes[None, :, :], axis=2)  # (M, j)

        values = np.empty((points.shape[0], self.size))
        for i in range(self.size):
            numerator = np.prod(np.delete(factors, i, axis=1), axis=1)
            values[:, i] = numerator / self._denominators[i]
        return values


def defaultCollocationNodes(param: UniformParameter, count: int) -> np.ndarray:
    """
    Gauss-Legendre points mapped onto the parameter box. For more than one dimension, the d-th component
    uses the points cyclically shifted by d positions so that all nodes are distinct in every component.
    """
    if count < 1:
        raise ValueError("At least one collocation node is required!")
    points, _ = leggauss(count)
    standard = np.stack([np.roll(points, -dim) for dim in range(param.dims)], axis=1)
    return param.fromStandard(standard)
