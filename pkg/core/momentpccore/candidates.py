#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .ExpectationEngine import QuadratureEngine
from .UniformParameter import UniformParameter
from .utils import ConfigurationError, resolveCallable


@dataclass(frozen=True)
class CandidateFunction:
    """Scalar test function of one uniformly distributed parameter on [-1, 1]."""

    # fmt: off
    name        : str
    function    : Callable[[np.ndarray], np.ndarray]
    description : str
    exactMoment : Optional[Callable[[int], float]] = None
    # fmt: on

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.function(points)

    @property
    def param(self) -> UniformParameter:
        return UniformParameter.standard(1)

    def trueMoment(self, order: int, quadraturePoints: int = 128) -> float:
        """E[f^order] in closed form if known, else by Gauss-Legendre quadrature."""
        if self.exactMoment is not None:
            return self.exactMoment(order)
        engine = QuadratureEngine(quadraturePoints)
        return float(engine.expect(self.param, lambda points: self.function(points) ** order)[0])


def _delta8(points: np.ndarray) -> np.ndarray:
    return points[:, 0] ** 8


def _rational(points: np.ndarray) -> np.ndarray:
    x = points[:, 0]
    return 1.0 / (1.0 + x + x**2)


def _sin2(points: np.ndarray) -> np.ndarray:
    return np.sin(3.0 * points[:, 0]) ** 2


def _gaussbump(points: np.ndarray) -> np.ndarray:
    return np.exp(-10.0 * points[:, 0] ** 2)


# fmt: off
CANDIDATES: Dict[str, CandidateFunction] = {
    'delta8'   : CandidateFunction('delta8', _delta8, "x^8", lambda order: 1.0 / (8 * order + 1)),
    'rational' : CandidateFunction('rational', _rational, "1 / (1 + x + x^2)"),
    'sin2'     : CandidateFunction('sin2', _sin2, "sin^2(3 x)"),
    'gaussbump': CandidateFunction('gaussbump', _gaussbump, "exp(-10 x^2)"),
}
# fmt: on


def getCandidate(name: str, customFunction: Optional[str] = None) -> CandidateFunction:
    """Looks up a registered candidate function. 'custom' resolves customFunction given as 'module:callable'."""
    if name == 'custom':
        if not customFunction:
            raise ConfigurationError("The function 'custom' requires custom_function = module:callable!")
        return CandidateFunction('custom', resolveCallable(customFunction), customFunction)

    if name not in CANDIDATES:
        raise ConfigurationError(
            f"Unknown function '{name}'. Valid values are: {', '.join(list(CANDIDATES) + ['custom'])}"
        )
    return CANDIDATES[name]


def linearDecay(states: np.ndarray, params: np.ndarray) -> np.ndarray:
    """dx/dt = -a x"""
    return -params[:, :1] * states


def nonlinearDecay(states: np.ndarray, params: np.ndarray) -> np.ndarray:
    """dx/dt = -a x^2 + sin(x)"""
    return -params[:, :1] * states**2 + np.sin(states)
