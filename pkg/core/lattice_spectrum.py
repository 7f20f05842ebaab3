"""
ToroExtremal v1.0 - Retículos y Espectro del Laplaciano Plano
=============================================================
Retículos Γ ⊂ C^n ≅ R^{2n}, retículo dual Γ* y enumeración de los niveles
λ = 4π²|w|² del Laplaciano plano con sus conjuntos de vectores más cortos.

Convención de coordenadas: w^j = u^{2j-1} + i·u^{2j}.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from core import linalg
from core.config import get_settings
from core.errors import (
    EnumerationOverflow,
    IndexBeyondEnumeration,
    ModeMismatch,
    NoComplexStructure,
    SingularBasis,
)
from core.linalg import Matrix
from core.scalars import NumericMode, Scalar, format_rational

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
# TIPOS DEL DOMINIO
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ComplexVector:
    """Vector de C^n guardado por sus coordenadas reales u^1..u^{2n}"""
    coords: Tuple[Scalar, ...]
    mode: NumericMode

    @classmethod
    def from_complex(cls, components: Sequence[Tuple[Scalar, Scalar]], mode: NumericMode) -> "ComplexVector":
        coords: List[Scalar] = []
        for re, im in components:
            coords.extend((mode.coerce(re), mode.coerce(im)))
        return cls(tuple(coords), mode)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def n(self) -> int:
        if self.dim % 2:
            raise NoComplexStructure(f"Dimensión real impar ({self.dim})")
        return self.dim // 2

    def complex_components(self) -> Tuple[Tuple[Scalar, Scalar], ...]:
        """Pares (Re w^j, Im w^j)"""
        n = self.n
        return tuple((self.coords[2 * j], self.coords[2 * j + 1]) for j in range(n))

    def to_complex(self) -> Tuple[complex, ...]:
        return tuple(complex(float(re), float(im)) for re, im in self.complex_components())

    def squared_norm(self) -> Scalar:
        return linalg.dot(self.coords, self.coords)

    def negate(self) -> "ComplexVector":
        return ComplexVector(tuple(-x for x in self.coords), self.mode)

    def first_nonzero(self) -> Optional[int]:
        scale = max(abs(float(x)) for x in self.coords) if self.coords else 0.0
        for i, x in enumerate(self.coords):
            if not self.mode.is_zero(x, scale=scale):
                return i
        return None

    def is_canonical(self) -> bool:
        i = self.first_nonzero()
        return i is not None and self.coords[i] > 0

    def canonical(self) -> "ComplexVector":
        return self if self.is_canonical() else self.negate()

    def support_size(self) -> int:
        scale = max(abs(float(x)) for x in self.coords)
        return sum(1 for x in self.coords if not self.mode.is_zero(x, scale=scale))

    def hermitian_entry(self, alpha: int, beta: int) -> Tuple[Scalar, Scalar]:
        """Parte real e imaginaria de w̄^α w^β (índices desde 0)"""
        a, b = self.coords[2 * alpha], self.coords[2 * alpha + 1]
        c, d = self.coords[2 * beta], self.coords[2 * beta + 1]
        return a * c + b * d, a * d - b * c

    def sort_key(self) -> tuple:
        if self.mode.exact:
            return (self.support_size(),) + tuple(-x for x in self.coords)
        return (self.support_size(),) + tuple(-round(float(x), 12) for x in self.coords)

    def to_dict(self) -> dict:
        return {"coords": [_scalar_out(x, self.mode) for x in self.coords]}


@dataclass(frozen=True)
class LatticeBasis:
    """Base real 2n×2n de un retículo; las columnas son γ_1..γ_{2n}"""
    matrix: Matrix
    mode: NumericMode
    label: Optional[str] = None

    def __post_init__(self):
        rows, cols = linalg.shape(self.matrix)
        if rows != cols or rows == 0:
            raise SingularBasis(f"La base debe ser cuadrada y no vacía ({rows}×{cols})")

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], mode: NumericMode, label: Optional[str] = None) -> "LatticeBasis":
        coerced = [[mode.coerce(x) for x in col] for col in cols]
        return cls(linalg.from_columns(coerced), mode, label)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def has_complex_structure(self) -> bool:
        return self.dim % 2 == 0

    @property
    def n(self) -> int:
        if not self.has_complex_structure:
            raise NoComplexStructure(f"Dimensión real impar ({self.dim}): sin estructura compleja")
        return self.dim // 2

    def columns(self) -> List[Tuple[Scalar, ...]]:
        return linalg.columns(self.matrix)

    def determinant(self) -> Scalar:
        return linalg.det(self.matrix, self.mode)

    @property
    def volume(self) -> Scalar:
        return abs(self.determinant())

    def check_nonsingular(self) -> None:
        d = self.determinant()
        if self.mode.exact and d == 0:
            raise SingularBasis("det(B) = 0")
        if not self.mode.exact:
            scale = max(1.0, float(np.max(np.abs(linalg.to_numpy(self.matrix))))) ** self.dim
            if abs(d) <= self.mode.tol * scale:
                raise SingularBasis(f"|det(B)| = {abs(d):.3e} por debajo de la tolerancia")

    def with_mode(self, mode: NumericMode) -> "LatticeBasis":
        if mode.exact == self.mode.exact:
            return self
        if mode.exact:
            raise ModeMismatch("No se puede convertir una base flotante a exacta")
        return LatticeBasis(linalg.freeze([[float(x) for x in row] for row in self.matrix]), mode, self.label)

    def to_dict(self) -> dict:
        """Formato de archivo de retículo"""
        return {
            "n": self.dim // 2 if self.has_complex_structure else None,
            "dim": self.dim,
            "mode": self.mode.name,
            "basis": [[_scalar_out(x, self.mode) for x in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class DualLattice:
    """Retículo dual Γ*: Dᵀ B = I"""
    primal: LatticeBasis
    matrix: Matrix

    @property
    def mode(self) -> NumericMode:
        return self.primal.mode

    @property
    def dim(self) -> int:
        return self.primal.dim

    def columns(self) -> List[Tuple[Scalar, ...]]:
        return linalg.columns(self.matrix)

    def vector(self, coeffs: Sequence[int]) -> ComplexVector:
        coords = linalg.mat_vec(self.matrix, [self.mode.coerce(c) for c in coeffs])
        return ComplexVector(coords, self.mode)

    def to_dict(self) -> dict:
        return {"basis": [[_scalar_out(x, self.mode) for x in row] for row in self.matrix]}


@dataclass(frozen=True)
class EigenLevel:
    """Nivel λ = 4π²·squared_norm con un representante por par ±w"""
    squared_norm: Scalar
    reps: Tuple[ComplexVector, ...]
    mode: NumericMode
    position: int = 1

    @property
    def l(self) -> int:
        return len(self.reps)

    @property
    def multiplicity(self) -> int:
        return 2 * self.l

    @property
    def eigenvalue(self):
        """λ como expresión sympy (exacto) o float"""
        if self.mode.exact:
            q = Fraction(self.squared_norm)
            return 4 * sp.pi**2 * sp.Rational(q.numerator, q.denominator)
        return 4 * math.pi**2 * float(self.squared_norm)

    @property
    def eigenvalue_float(self) -> float:
        return 4 * math.pi**2 * float(self.squared_norm)

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "squared_norm": _scalar_out(self.squared_norm, self.mode),
            "lambda": str(self.eigenvalue) if self.mode.exact else self.eigenvalue_float,
            "l": self.l,
            "multiplicity": self.multiplicity,
            "reps": [r.to_dict()["coords"] for r in self.reps],
        }


@dataclass(frozen=True)
class LevelLookup:
    """Resultado de level_for_index"""
    level: EigenLevel
    k: int
    first_index: int
    last_index: int
    is_strictly_above_prev: bool
    is_strictly_below_next: bool

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "level": self.level.position,
            "first_index": self.first_index,
            "last_index": self.last_index,
            "is_strictly_above_prev": self.is_strictly_above_prev,
            "is_strictly_below_next": self.is_strictly_below_next,
        }


def _scalar_out(x: Scalar, mode: NumericMode):
    return format_rational(x) if mode.exact else float(x)


# ══════════════════════════════════════════════════════════════════════════════
# DUAL, GRAM Y PRODUCTOS
# ══════════════════════════════════════════════════════════════════════════════

def dual_basis(B: LatticeBasis) -> DualLattice:
    """D = B^{-T}; lanza SingularBasis si B no es invertible"""
    B.check_nonsingular()
    D = linalg.transpose(linalg.inverse(B.matrix, B.mode))
    logger.debug("Dual calculado para base %s (dim=%d, modo=%s)", B.label, B.dim, B.mode.name)
    return DualLattice(B, D)


def pairing_matrix(L: DualLattice) -> Matrix:
    """Emparejamiento ½(γ·d̄ + γ̄·d) = ⟨γ, d⟩ real: matriz Dᵀ B"""
    return linalg.matmul(linalg.transpose(L.matrix), L.primal.matrix, L.mode)


def check_dual(L: DualLattice) -> bool:
    """Dᵀ B = I (exacto o dentro de tolerancia) y emparejamiento entero"""
    P = pairing_matrix(L)
    I = linalg.identity(L.dim, L.mode)
    same = all(L.mode.eq(P[i][j], I[i][j]) for i in range(L.dim) for j in range(L.dim))
    return same and linalg.is_integral(P, L.mode)


def gram_matrix(L: DualLattice) -> Matrix:
    return linalg.matmul(linalg.transpose(L.matrix), L.matrix, L.mode)


def product_lattice(B1: LatticeBasis, B2: LatticeBasis) -> LatticeBasis:
    """Suma directa diagonal por bloques"""
    if B1.mode.exact != B2.mode.exact:
        raise ModeMismatch(f"Modos distintos: {B1.mode.name} y {B2.mode.name}")
    label = f"{B1.label or 'B1'} x {B2.label or 'B2'}"
    return LatticeBasis(linalg.block_diagonal(B1.matrix, B2.matrix, B1.mode), B1.mode, label)


def scaled_lattice(B: LatticeBasis, factor) -> LatticeBasis:
    s = B.mode.coerce(factor)
    return LatticeBasis(linalg.scale_matrix(B.matrix, s), B.mode, B.label)


def same_lattice(B1: LatticeBasis, B2: LatticeBasis) -> bool:
    """True si B1⁻¹B2 es entera con determinante ±1"""
    if B1.dim != B2.dim:
        return False
    mode = B1.mode
    M = linalg.matmul(linalg.inverse(B1.matrix, mode), B2.matrix, mode)
    if not linalg.is_integral(M, mode):
        return False
    d = linalg.det(M, mode)
    return mode.eq(abs(d), mode.coerce(1))


# ══════════════════════════════════════════════════════════════════════════════
# ENUMERACIÓN (FINCKE–POHST)
# ══════════════════════════════════════════════════════════════════════════════

def _quadratic_form(G: Matrix, x: Sequence[int], mode: NumericMode) -> Scalar:
    total = Fraction(0) if mode.exact else 0.0
    for i, row in enumerate(G):
        if x[i] == 0:
            continue
        acc = sum((row[j] * x[j] for j in range(len(x)) if x[j]), Fraction(0) if mode.exact else 0.0)
        total += x[i] * acc
    return total


def short_vectors(L: DualLattice, radius: Scalar) -> List[ComplexVector]:
    """
    Todos los representantes canónicos u = Dx con 0 < |u|² ≤ radius.

    Cota de Cholesky en flotante (ligeramente ensanchada) y filtro exacto
    de la norma en las hojas.
    """
    settings = get_settings()
    mode = L.mode
    G = gram_matrix(L)
    Gf = linalg.to_numpy(G)
    R = np.linalg.cholesky(Gf).T
    dim = L.dim
    diag = np.diag(R) ** 2
    q = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            q[i, j] = R[i, j] / R[i, i]
    bound = float(radius) * (1 + 1e-9) + 1e-12

    found: List[ComplexVector] = []
    x = [0] * dim
    leaves = 0

    def recurse(i: int, remaining: float):
        nonlocal leaves
        center = -sum(q[i, j] * x[j] for j in range(i + 1, dim))
        span = math.sqrt(max(remaining, 0.0) / diag[i])
        lo, hi = math.ceil(center - span - 1e-9), math.floor(center + span + 1e-9)
        for xi in range(lo, hi + 1):
            x[i] = xi
            used = diag[i] * (xi - center) ** 2
            if used > remaining + 1e-9 * max(1.0, bound):
                continue
            if i == 0:
                leaves += 1
                if leaves > settings.enumeration_cap:
                    raise EnumerationOverflow(
                        f"Más de {settings.enumeration_cap} candidatos en la enumeración",
                        radius=radius,
                    )
                _accept(list(x))
            else:
                recurse(i - 1, remaining - used)
        x[i] = 0

    def _accept(coeffs: List[int]):
        if not any(coeffs):
            return
        norm2 = _quadratic_form(G, coeffs, mode)
        if mode.exact:
            if norm2 > radius:
                return
        elif norm2 > float(radius) * (1 + mode.tol):
            return
        v = L.vector(coeffs)
        if v.is_canonical():
            found.append(v)

    recurse(dim - 1, bound)
    logger.debug("Enumeración: radio=%s, hojas=%d, representantes=%d", radius, leaves, len(found))
    return found


def _group_levels(vectors: List[ComplexVector], mode: NumericMode) -> List[EigenLevel]:
    if not vectors:
        return []
    keyed = sorted(vectors, key=lambda v: v.squared_norm())
    groups: List[List[ComplexVector]] = []
    norms: List[Scalar] = []
    for v in keyed:
        r = v.squared_norm()
        if groups and mode.eq(norms[-1], r):
            groups[-1].append(v)
        else:
            groups.append([v])
            norms.append(r)
    levels = []
    for position, (r, reps) in enumerate(zip(norms, groups), start=1):
        reps_sorted = tuple(sorted(reps, key=lambda v: v.sort_key()))
        levels.append(EigenLevel(r, reps_sorted, mode, position))
    return levels


def enumerate_levels(L: DualLattice, count: int) -> List[EigenLevel]:
    """Los primeros `count` niveles no nulos, en orden creciente de λ"""
    if count < 1:
        raise ValueError("count debe ser ≥ 1")
    mode = L.mode
    G = gram_matrix(L)
    radius = min(G[i][i] for i in range(L.dim))
    two = Fraction(2) if mode.exact else 2.0
    while True:
        levels = _group_levels(short_vectors(L, radius), mode)
        if len(levels) >= count:
            return levels[:count]
        logger.debug("Solo %d niveles con radio %s; duplicando", len(levels), radius)
        radius = radius * two


def brute_force_levels(L: DualLattice, count: int) -> List[EigenLevel]:
    """
    Oráculo ingenuo: caja de coeficientes enteros acotada con el menor
    autovalor de la matriz de Gram.
    """
    mode = L.mode
    G = gram_matrix(L)
    mu_min = float(np.linalg.eigvalsh(linalg.to_numpy(G))[0])
    radius = min(G[i][i] for i in range(L.dim))
    two = Fraction(2) if mode.exact else 2.0
    while True:
        box = int(math.floor(math.sqrt(float(radius) / mu_min) + 1e-9))
        found = []
        for coeffs in itertools.product(range(-box, box + 1), repeat=L.dim):
            if not any(coeffs):
                continue
            norm2 = _quadratic_form(G, coeffs, mode)
            inside = norm2 <= radius if mode.exact else norm2 <= float(radius) * (1 + mode.tol)
            if inside:
                v = L.vector(coeffs)
                if v.is_canonical():
                    found.append(v)
        levels = _group_levels(found, mode)
        if len(levels) >= count:
            return levels[:count]
        radius = radius * two


def level_for_index(levels: Sequence[EigenLevel], k: int) -> LevelLookup:
    """Índice k contado con multiplicidad → nivel distinto y banderas de EI"""
    if k < 1:
        raise IndexBeyondEnumeration(f"k debe ser ≥ 1 (recibido {k})")
    cumulative = 0
    for level in levels:
        first = cumulative + 1
        cumulative += level.multiplicity
        if k <= cumulative:
            return LevelLookup(
                level=level,
                k=k,
                first_index=first,
                last_index=cumulative,
                is_strictly_above_prev=(k == first),
                is_strictly_below_next=(k == cumulative),
            )
    raise IndexBeyondEnumeration(
        f"k={k} excede la multiplicidad total enumerada ({cumulative})", k=k, covered=cumulative
    )


def levels_covering(L: DualLattice, k: int) -> List[EigenLevel]:
    """Enumera niveles hasta cubrir el índice k"""
    count = 1
    while True:
        levels = enumerate_levels(L, count)
        if sum(lv.multiplicity for lv in levels) >= k:
            return levels
        count += 1
