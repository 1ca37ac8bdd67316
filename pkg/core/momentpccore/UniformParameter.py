#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .utils import asPoints


@dataclass(frozen=True)
class UniformParameter:
    """
    A d-dimensional random vector whose components are independent and uniformly distributed
    over the given intervals. The density is the normalized product density 1 / prod(hi - lo).
    """

    bounds: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise ValueError("A uniform parameter must have at least one dimension!")
        for lo, hi in bounds:
            if not np.isfinite(lo) or not np.isfinite(hi) or not lo < hi:
                raise ValueError(f"Invalid interval [{lo}, {hi}]. Intervals must be finite and have positive length!")
        object.__setattr__(self, 'bounds', bounds)

    @classmethod
    def standard(cls, dims: int = 1) -> 'UniformParameter':
        return cls(tuple((-1.0, 1.0) for _ in range(dims)))

    @classmethod
    def fromBounds(cls, bounds: Sequence[Sequence[float]]) -> 'UniformParameter':
        return cls(tuple((lo, hi) for lo, hi in bounds))

    @property
    def dims(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.bounds])

    def toStandard(self, points) -> np.ndarray:
        """Maps points from the parameter box affinely onto [-1, 1]^d."""
        points = asPoints(points, self.dims)
        return (2.0 * points - (self.lower + self.upper)) / (self.upper - self.lower)

    def fromStandard(self, points) -> np.ndarray:
        points = asPoints(points, self.dims)
        return 0.5 * (self.lower + self.upper) + 0.5 * (self.upper - self.lower) * points

    def contains(self, points) -> np.ndarray:
        points = asPoints(points, self.dims)
        return np.logical_and(points >= self.lower, points <= self.upper).all(axis=1)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draws count i.i.d. samples. The stream is fully determined by the state of rng."""
        if count < 1:
            raise ValueError("At least one sample must be drawn!")
        return self.lower + (self.upper - self.lower) * rng.random((count, self.dims))
