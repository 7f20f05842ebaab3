"""
ToroExtremal v1.0 - Álgebra Lineal Exacta y Flotante
====================================================
Matrices como tuplas de tuplas. El modo exacto usa DomainMatrix de sympy
sobre QQ; el modo flotante usa numpy.
"""

from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from core.scalars import NumericMode, Scalar

Matrix = Tuple[Tuple[Scalar, ...], ...]


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def freeze(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def to_domain_matrix(rows: Sequence[Sequence[Fraction]]) -> DomainMatrix:
    data = [[(Fraction(q).numerator, Fraction(q).denominator) for q in row] for row in rows]
    return DomainMatrix.from_list(data, QQ)


def from_domain_matrix(M: DomainMatrix) -> Matrix:
    return freeze([[_to_fraction(x) for x in row] for row in M.to_list()])


def to_numpy(rows: Sequence[Sequence[Scalar]]) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rows], dtype=float)


def from_numpy(arr: np.ndarray) -> Matrix:
    return freeze([[float(x) for x in row] for row in np.atleast_2d(arr)])


def shape(rows: Matrix) -> Tuple[int, int]:
    return len(rows), (len(rows[0]) if rows else 0)


def identity(size: int, mode: NumericMode) -> Matrix:
    one, zero = (Fraction(1), Fraction(0)) if mode.exact else (1.0, 0.0)
    return freeze([[one if i == j else zero for j in range(size)] for i in range(size)])


def transpose(rows: Matrix) -> Matrix:
    return freeze(zip(*rows)) if rows else ()


def column(rows: Matrix, j: int) -> Tuple[Scalar, ...]:
    return tuple(row[j] for row in rows)


def columns(rows: Matrix) -> List[Tuple[Scalar, ...]]:
    return [column(rows, j) for j in range(shape(rows)[1])]


def from_columns(cols: Sequence[Sequence[Scalar]]) -> Matrix:
    return transpose(freeze(cols))


def matmul(A: Matrix, B: Matrix, mode: NumericMode) -> Matrix:
    if mode.exact:
        return from_domain_matrix(to_domain_matrix(A) * to_domain_matrix(B))
    return from_numpy(to_numpy(A) @ to_numpy(B))


def det(A: Matrix, mode: NumericMode) -> Scalar:
    if mode.exact:
        return _to_fraction(to_domain_matrix(A).det())
    return float(np.linalg.det(to_numpy(A)))


def inverse(A: Matrix, mode: NumericMode) -> Matrix:
    """Inversa; el llamador verifica antes que det(A) ≠ 0"""
    if mode.exact:
        return from_domain_matrix(to_domain_matrix(A).inv())
    return from_numpy(np.linalg.inv(to_numpy(A)))


def rref(A: Matrix) -> Tuple[Matrix, Tuple[int, ...]]:
    """Forma escalonada reducida exacta y columnas pivote"""
    if not A:
        return (), ()
    reduced, pivots = to_domain_matrix(A).rref()
    return from_domain_matrix(reduced), tuple(pivots)


def block_diagonal(A: Matrix, B: Matrix, mode: NumericMode) -> Matrix:
    zero = Fraction(0) if mode.exact else 0.0
    ra, ca = shape(A)
    rb, cb = shape(B)
    rows = [list(row) + [zero] * cb for row in A]
    rows += [[zero] * ca + list(row) for row in B]
    return freeze(rows)


def scale_matrix(A: Matrix, factor: Scalar) -> Matrix:
    return freeze([[x * factor for x in row] for row in A])


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return sum((a * b for a, b in zip(u, v)), Fraction(0) if isinstance(u[0], Fraction) else 0.0)


def mat_vec(A: Matrix, v: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(dot(row, v) for row in A)


def is_integral(A: Matrix, mode: NumericMode) -> bool:
    for row in A:
        for x in row:
            if mode.exact:
                if Fraction(x).denominator != 1:
                    return False
            elif not mode.is_zero(x - round(x), scale=abs(x)):
                return False
    return True
