#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Coefficient solvers which reproduce the first two moments of f exactly.

Every coefficient matrix F = [E[f], L U W_1^(-1/2)] with L L^T = Cov[f] and U U^T = I has the required mean
and second moment. The solvers only differ in how the row-orthonormal U is chosen.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg

from .approximators import _normalEquations, gridWeights
from .ExpectationEngine import MomentSet
from .LegendreBasis import LegendreBasis
from .PCExpansion import PCExpansion
from .utils import (
    DimensionMismatchError,
    InfeasibleError,
    NotPositiveSemidefiniteError,
    SingularCovarianceError,
    asPoints,
    evaluateAt,
)


PSD_TOLERANCE = 1e-10
TRUNCATION_TOLERANCE = 1e-12
ORTHONORMALITY_TOLERANCE = 1e-10
# E_2 is only rejected when it is numerically singular.
E2_CONDITION_LIMIT = 1.0 / np.finfo(float).eps

PROJECTIONS = ('svd', 'procrustes')


def psdSquareRoot(matrix, scale: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns a lower-triangular L with L L^T = matrix and an orthonormal basis (n, k) of the directions in which
    the matrix was truncated to zero. Eigenvalues below 1e-12 max(|trace|, scale) are truncated. Raises
    NotPositiveSemidefiniteError for eigenvalues below -1e-10 max(|trace|, scale).
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix but got shape {matrix.shape}!")
    matrix = (matrix + matrix.T) / 2
    size = matrix.shape[0]

    trace = float(np.trace(matrix))
    reference = max(abs(trace), abs(scale) if scale is not None else 0.0, np.finfo(float).tiny)
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    if eigenvalues.size > 0 and eigenvalues[0] < -PSD_TOLERANCE * reference:
        raise NotPositiveSemidefiniteError(
            f"Matrix has the eigenvalue {eigenvalues[0]:.3e}, which is significantly negative "
            f"compared to its trace {trace:.3e}!"
        )

    keep = eigenvalues > TRUNCATION_TOLERANCE * reference
    if keep.all():
        try:
            return scipy.linalg.cholesky(matrix, lower=True), np.zeros((size, 0))
        except np.linalg.LinAlgError:
            pass

    factor = eigenvectors[:, keep] * np.sqrt(eigenvalues[keep])  # (n, r) with factor factor^T = matrix
    cholesky = np.zeros((size, size))
    if factor.shape[1] > 0:
        upper = scipy.linalg.qr(factor.T, mode='r')[0]  # (r, n) upper trapezoidal
        signs = np.where(np.diag(upper) < 0, -1.0, 1.0)
        upper = upper * signs[:, None]
        rows = min(upper.shape[0], size)
        cholesky[:, :rows] = upper[:rows].T
    return cholesky, eigenvectors[:, ~keep]


@dataclass(frozen=True)
class MomentConstraint:
    """Prescribed mean and second moment together with a lower-triangular square root of the covariance."""

    # fmt: off
    mean       : np.ndarray  # (n,)
    second     : np.ndarray  # (n, n)
    cholesky   : np.ndarray  # (n, n)
    deficient  : np.ndarray  # (n, k) truncated directions, k = 0 for a regular covariance
    # fmt: on

    @property
    def outputs(self) -> int:
        return self.mean.size

    @property
    def singular(self) -> bool:
        return self.deficient.shape[1] > 0

    @classmethod
    def fromMoments(cls, mean, second, covariance=None) -> 'MomentConstraint':
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        second = np.atleast_2d(np.asarray(second, dtype=float))
        if second.shape != (mean.size, mean.size):
            raise DimensionMismatchError(f"Second moment of shape {second.shape} does not fit a mean of size {mean.size}!")
        second = (second + second.T) / 2
        if covariance is None:
            covariance = second - np.outer(mean, mean)

        cholesky, deficient = psdSquareRoot(covariance, scale=float(np.trace(np.abs(second))))
        return cls(mean, second, cholesky, deficient)

    @classmethod
    def fromMomentSet(cls, moments: MomentSet) -> 'MomentConstraint':
        return cls.fromMoments(moments.mean, moments.second, moments.covariance)


class FeasibleU:
    """A row-orthonormal n x N matrix, i.e., U U^T = I_n."""

    def __init__(self, matrix):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        rows, columns = matrix.shape
        if columns < rows:
            raise InfeasibleError(f"A {rows} x {columns} matrix can not have orthonormal rows!")
        violation = float(np.linalg.norm(matrix @ matrix.T - np.eye(rows)))
        if violation > ORTHONORMALITY_TOLERANCE:
            raise InfeasibleError(f"U U^T deviates from the identity by {violation:.3e} in the Frobenius norm!")

        self.matrix = matrix
        self.matrix.setflags(write=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def __repr__(self) -> str:
        return f"FeasibleU({self.matrix.tolist()})"


def projectToOrthonormalRows(matrix) -> FeasibleU:
    """
    Returns M_1 T M_2^T for the singular value decomposition M_1 [Lambda 0] M_2^T of the given n x N matrix,
    i.e., the nearest matrix with orthonormal rows. The zero matrix is mapped to T = [I_n 0].
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, columns = matrix.shape
    if columns < rows:
        raise InfeasibleError(f"A {rows} x {columns} matrix can not be projected onto orthonormal rows!")

    if not np.any(matrix):
        return FeasibleU(np.eye(rows, columns))

    left, _, rightTransposed = scipy.linalg.svd(matrix, full_matrices=False)
    return FeasibleU(left @ rightTransposed)


def _checkProblem(constraint: MomentConstraint, basis: LegendreBasis) -> None:
    if basis.size - 1 < constraint.outputs:
        raise InfeasibleError(
            f"The basis has {basis.size - 1} non-constant functions but {constraint.outputs} outputs have to be "
            f"matched. Increase the approximation order!"
        )


def assembleMomentMatching(constraint: MomentConstraint, basis: LegendreBasis, U) -> PCExpansion:
    """F = [E[f], L U W_1^(-1/2)], which has exactly the prescribed mean and second moment for every feasible U."""
    _checkProblem(constraint, basis)
    if not isinstance(U, FeasibleU):
        U = FeasibleU(U)
    if U.shape != (constraint.outputs, basis.size - 1):
        raise DimensionMismatchError(
            f"U must have shape {(constraint.outputs, basis.size - 1)} but has shape {U.shape}!"
        )

    coeffs = np.empty((constraint.outputs, basis.size))
    coeffs[:, 0] = constraint.mean
    coeffs[:, 1:] = constraint.cholesky @ U.matrix / np.sqrt(basis.nonConstantNorms)
    return PCExpansion(basis, coeffs)


def _solveCholesky(constraint: MomentConstraint, rhs: np.ndarray, regularize: bool) -> np.ndarray:
    """Solves L X = rhs. For singular L, the least squares solution is used if regularization is enabled."""
    if not constraint.singular:
        return scipy.linalg.solve_triangular(constraint.cholesky, rhs, lower=True)
    if not regularize:
        raise SingularCovarianceError(
            f"The covariance is singular in {constraint.deficient.shape[1]} direction(s)! "
            f"Enable regularization to solve in its range.",
            directions=constraint.deficient,
        )
    return scipy.linalg.lstsq(constraint.cholesky, rhs)[0]


def gpDirection(moments: MomentSet, basis: LegendreBasis, constraint: Optional[MomentConstraint] = None,
                regularize: bool = True) -> np.ndarray:
    """U_GP = L^-1 R W_1^(-1/2), the unconstrained optimum in the U parametrization."""
    if constraint is None:
        constraint = MomentConstraint.fromMomentSet(moments)
    return _solveCholesky(constraint, moments.cross / np.sqrt(basis.nonConstantNorms), regularize)


def _project(constraint: MomentConstraint, direction: np.ndarray, projection: str) -> FeasibleU:
    if projection == 'svd':
        return projectToOrthonormalRows(direction)
    if projection == 'procrustes':
        # argmin |L U - L D|_F over U U^T = I is the polar factor of L^T L D.
        return projectToOrthonormalRows(constraint.cholesky.T @ constraint.cholesky @ direction)
    raise ValueError(f"Unknown projection '{projection}'. Valid values are: {', '.join(PROJECTIONS)}")


def solveConstrainedGP(
    moments: MomentSet, basis: LegendreBasis, projection: str = 'svd', regularize: bool = True
) -> PCExpansion:
    """
    Moment-exact coefficients in the mean-square sense. The default projects U_GP onto the set of row-orthonormal
    matrices. 'procrustes' instead minimizes |L U - R W_1^(-1/2)|_F exactly, which coincides for one output.
    """
    constraint = MomentConstraint.fromMomentSet(moments)
    _checkProblem(constraint, basis)
    if moments.cross.shape != (constraint.outputs, basis.size - 1):
        raise DimensionMismatchError(
            f"R has shape {moments.cross.shape} but the basis requires {(constraint.outputs, basis.size - 1)}!"
        )

    direction = gpDirection(moments, basis, constraint, regularize)
    return assembleMomentMatching(constraint, basis, _project(constraint, direction, projection))


def solveConstrainedLS(
    grid,
    moments: MomentSet,
    basis: LegendreBasis,
    f: Callable[[np.ndarray], np.ndarray],
    weights=None,
    projection: str = 'svd',
    regularize: bool = True,
) -> PCExpansion:
    """
    Moment-exact coefficients in the least squares sense over the grid. The prescribed moments may stem from
    another, e.g., sparser grid or from closed-form expressions.
    U_hat = L^-1 E_1^T E_2^-1 W_1^(1/2) with E_1 = sum_i w_i Phi_1(x_i) (f(x_i) - E[f])^T and
    E_2 = sum_i w_i Phi_1(x_i) Phi_1(x_i)^T.
    """
    constraint = MomentConstraint.fromMomentSet(moments)
    _checkProblem(constraint, basis)

    grid = asPoints(grid, basis.dims)
    weights = gridWeights(grid, weights)
    phi1 = basis.evaluate(grid)[:, 1:]
    centered = evaluateAt(f, grid) - constraint.mean
    if centered.shape[1] != constraint.outputs:
        raise DimensionMismatchError(f"f has {centered.shape[1]} outputs but the moments describe {constraint.outputs}!")

    factor = _normalEquations(phi1, weights, E2_CONDITION_LIMIT, "E_2")
    e1 = phi1.T @ (weights[:, None] * centered)  # (N, n)
    direction = _solveCholesky(
        constraint, scipy.linalg.cho_solve(factor, e1).T * np.sqrt(basis.nonConstantNorms), regularize
    )
    return assembleMomentMatching(constraint, basis, _project(constraint, direction, projection))


def gpCostGap(moments: MomentSet, basis: LegendreBasis, U) -> float:
    """
    J_U - J_GP = |L U - R W_1^(-1/2)|_F^2, the increase of the mean-square error caused by matching the
    second moment with the given U instead of using the Galerkin projection.
    """
    constraint = MomentConstraint.fromMomentSet(moments)
    _checkProblem(constraint, basis)
    if not isinstance(U, FeasibleU):
        U = FeasibleU(U)
    difference = constraint.cholesky @ U.matrix - moments.cross / np.sqrt(basis.nonConstantNorms)
    return float(np.sum(difference**2))
