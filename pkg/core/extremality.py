"""
ToroExtremal v1.0 - Criterio de Extremalidad
============================================
Construye y resuelve los sistemas lineales de factibilidad:

- Sistema de Kähler: Σ R_ν |w_ν^α|² = 1, Σ R_ν w̄_ν^α w_ν^β = 0 (α ≠ β), R ≥ 0.
- Sistema de inmersión: Σ c'_ν u_ν u_νᵀ = I con c' = 4π²c ≥ 0.

Cada veredicto lleva un certificado re-verificable: pesos o vector de Farkas.
"""

import enum
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from core import linalg
from core.config import get_settings
from core.errors import CertificateRejected, NumericallyAmbiguous, TooLarge
from core.fourier_calculus import (
    EigenfunctionBasis,
    Form11,
    L_rhs,
    TorusShape,
    TrigPoly,
    ddc,
    eigenfunction_basis,
    harmonic_project,
    trig_mul,
)
from core.lattice_spectrum import EigenLevel
from core.scalars import NumericMode, Scalar, format_rational

logger = logging.getLogger(__name__)

KAHLER = "kahler"
IMMERSION = "immersion"
# Múltiplo de eps por debajo del cual un objetivo de fase 1 es ruido de redondeo
ROUNDOFF_FACTOR = 1e3


class Verdict(enum.Enum):
    NOT_EXTREMAL = "NotExtremal"


# ══════════════════════════════════════════════════════════════════════════════
# SISTEMAS Y CERTIFICADOS
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class FeasibilitySystem:
    """{x ≥ 0 : A x = b} con entradas reales"""
    A: Tuple[Tuple[Scalar, ...], ...]
    b: Tuple[Scalar, ...]
    variables: Tuple[str, ...]
    kind: str
    mode: NumericMode
    row_labels: Tuple[str, ...] = ()

    @property
    def rows(self) -> int:
        return len(self.A)

    @property
    def cols(self) -> int:
        return len(self.variables)

    def summary(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "kind": self.kind}

    def to_dict(self) -> dict:
        out = lambda x: format_rational(x) if self.mode.exact else float(x)
        return {
            **self.summary(),
            "A": [[out(x) for x in row] for row in self.A],
            "b": [out(x) for x in self.b],
            "variables": list(self.variables),
            "row_labels": list(self.row_labels),
        }


@dataclass(frozen=True)
class WeightCertificate:
    """Pesos no negativos con residuo max|A·R − b|"""
    weights: Tuple[Scalar, ...]
    residual: Scalar

    def to_dict(self, mode: NumericMode) -> dict:
        out = (lambda x: format_rational(x)) if mode.exact else float
        return {"weights": [out(x) for x in self.weights], "residual": out(self.residual)}


@dataclass(frozen=True)
class FarkasCertificate:
    """yᵀA ≤ 0 y yᵀb > 0"""
    y: Tuple[Scalar, ...]
    margin: Scalar
    max_violation: Scalar

    def to_dict(self, mode: NumericMode) -> dict:
        out = (lambda x: format_rational(x)) if mode.exact else float
        return {"farkas": [out(x) for x in self.y], "margin": out(self.margin),
                "max_violation": out(self.max_violation)}


@dataclass(frozen=True)
class SolverStats:
    pivots: int = 0
    phase1_objective: Scalar = 0
    structural: bool = False

    def to_dict(self, mode: NumericMode) -> dict:
        obj = format_rational(self.phase1_objective) if mode.exact else float(self.phase1_objective)
        return {"pivots": self.pivots, "phase1_objective": obj, "structural": self.structural}


@dataclass(frozen=True)
class FeasibilityOutcome:
    """Exactamente una rama: pesos (factible) o Farkas (infactible)"""
    system: FeasibilitySystem
    status: str
    weights: Optional[WeightCertificate] = None
    farkas: Optional[FarkasCertificate] = None
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_dict(self) -> dict:
        mode = self.system.mode
        data = {"status": self.status, "system": self.system.summary(), "stats": self.stats.to_dict(mode)}
        if self.weights is not None:
            data.update(self.weights.to_dict(mode))
        if self.farkas is not None:
            data.update(self.farkas.to_dict(mode))
            data["residual"] = None
        if self.system.kind == IMMERSION:
            data["variable_scale"] = "4*pi**2"
        return data


# ══════════════════════════════════════════════════════════════════════════════
# CONSTRUCCIÓN DE SISTEMAS
# ══════════════════════════════════════════════════════════════════════════════

def build_kahler_system(level: EigenLevel, n: int) -> FeasibilitySystem:
    """Filas diagonales primero; luego, para α<β, parte real e imaginaria"""
    mode = level.mode
    one, zero = mode.coerce(1), mode.coerce(0)
    reps = level.reps
    A, b, labels = [], [], []
    for alpha in range(n):
        A.append(tuple(w.hermitian_entry(alpha, alpha)[0] for w in reps))
        b.append(one)
        labels.append(f"diag[{alpha + 1}]")
    for alpha, beta in itertools.combinations(range(n), 2):
        entries = [w.hermitian_entry(alpha, beta) for w in reps]
        A.append(tuple(re for re, _ in entries))
        b.append(zero)
        labels.append(f"re[{alpha + 1},{beta + 1}]")
        A.append(tuple(im for _, im in entries))
        b.append(zero)
        labels.append(f"im[{alpha + 1},{beta + 1}]")
    variables = tuple(f"R_{nu}" for nu in range(1, len(reps) + 1))
    return FeasibilitySystem(tuple(A), tuple(b), variables, KAHLER, mode, tuple(labels))


def build_immersion_system(level: EigenLevel, m: Optional[int] = None) -> FeasibilitySystem:
    """Σ c'_ν u_ν u_νᵀ = I sobre las m(m+1)/2 entradas i ≤ j"""
    mode = level.mode
    reps = level.reps
    m = reps[0].dim if m is None else m
    A, b, labels = [], [], []
    for i in range(m):
        for j in range(i, m):
            A.append(tuple(w.coords[i] * w.coords[j] for w in reps))
            b.append(mode.coerce(1 if i == j else 0))
            labels.append(f"M[{i + 1},{j + 1}]")
    variables = tuple(f"c_{nu}" for nu in range(1, len(reps) + 1))
    return FeasibilitySystem(tuple(A), tuple(b), variables, IMMERSION, mode, tuple(labels))


# ══════════════════════════════════════════════════════════════════════════════
# VERIFICACIÓN DE CERTIFICADOS
# ══════════════════════════════════════════════════════════════════════════════

def _zero(mode: NumericMode):
    return Fraction(0) if mode.exact else 0.0


def weight_residual(S: FeasibilitySystem, weights: Sequence[Scalar]) -> Scalar:
    zero = _zero(S.mode)
    worst = zero
    for row, bi in zip(S.A, S.b):
        value = sum((a * x for a, x in zip(row, weights)), zero) - bi
        worst = max(worst, abs(value))
    return worst


def check_weights(S: FeasibilitySystem, weights: Sequence[Scalar]) -> bool:
    """A·R = b y R ≥ 0 (exacto o con tolerancia)"""
    if len(weights) != S.cols:
        return False
    mode = S.mode
    if any(mode.sign(x) < 0 for x in weights):
        return False
    residual = weight_residual(S, weights)
    if mode.exact:
        return residual == 0
    scale = max([1.0] + [abs(float(x)) for x in weights])
    return residual <= mode.tol * 10 * scale


def farkas_values(S: FeasibilitySystem, y: Sequence[Scalar]) -> Tuple[Scalar, Scalar]:
    """(yᵀb, max_j (yᵀA)_j)"""
    zero = _zero(S.mode)
    margin = sum((yi * bi for yi, bi in zip(y, S.b)), zero)
    cols = [sum((y[i] * S.A[i][j] for i in range(S.rows)), zero) for j in range(S.cols)]
    return margin, max(cols, default=zero)


def check_farkas(S: FeasibilitySystem, y: Sequence[Scalar]) -> bool:
    if len(y) != S.rows:
        return False
    margin, worst = farkas_values(S, y)
    if S.mode.exact:
        return margin > 0 and worst <= 0
    scale = max([1.0] + [abs(float(v)) for v in y])
    return margin > S.mode.tol * scale and worst <= S.mode.tol * 10 * scale


def check_outcome(outcome: FeasibilityOutcome) -> bool:
    S = outcome.system
    if outcome.weights is not None:
        return check_weights(S, outcome.weights.weights)
    if outcome.farkas is not None:
        return check_farkas(S, outcome.farkas.y)
    return False


# ══════════════════════════════════════════════════════════════════════════════
# SIMPLEX DE FASE 1 (REGLA DE BLAND)
# ══════════════════════════════════════════════════════════════════════════════

class PhaseOneSimplex:
    """
    Tabla de fase 1: min Σ artificiales sujeto a A'x + a = b', b' ≥ 0.
    Las filas con b_i < 0 se niegan; los multiplicadores se des-niegan al
    extraer el vector de Farkas.
    """

    def __init__(self, S: FeasibilitySystem, epsilon: Scalar):
        self.system = S
        self.epsilon = epsilon
        self.m = S.rows
        self.l = S.cols
        zero = _zero(S.mode)
        one = S.mode.coerce(1)
        self.flips = [-1 if bi < 0 else 1 for bi in S.b]
        self.T: List[List[Scalar]] = []
        self.rhs: List[Scalar] = []
        for i in range(self.m):
            s = self.flips[i]
            row = [s * a for a in S.A[i]] + [one if k == i else zero for k in range(self.m)]
            self.T.append(row)
            self.rhs.append(s * S.b[i])
        self.basis = [self.l + i for i in range(self.m)]
        width = self.l + self.m
        self.cost = [one if j >= self.l else zero for j in range(width)]
        self.reduced = [self.cost[j] - sum((self.T[i][j] for i in range(self.m)), zero) for j in range(width)]
        self.pivots = 0

    def entering(self) -> Optional[int]:
        for j, r in enumerate(self.reduced):
            if r < -self.epsilon:
                return j
        return None

    def leaving(self, j: int) -> Optional[int]:
        candidates = [(self.rhs[i] / self.T[i][j], self.basis[i], i)
                      for i in range(self.m) if self.T[i][j] > self.epsilon]
        if not candidates:
            return None
        return min(candidates)[2]

    def pivot(self, i: int, j: int) -> None:
        piv = self.T[i][j]
        self.T[i] = [a / piv for a in self.T[i]]
        self.rhs[i] = self.rhs[i] / piv
        for k in range(self.m):
            if k != i and self.T[k][j] != 0:
                f = self.T[k][j]
                self.T[k] = [a - f * b for a, b in zip(self.T[k], self.T[i])]
                self.rhs[k] = self.rhs[k] - f * self.rhs[i]
        r = self.reduced[j]
        if r != 0:
            self.reduced = [a - r * b for a, b in zip(self.reduced, self.T[i])]
        self.basis[i] = j
        self.pivots += 1
        logger.debug("Pivote %d: fila %d, columna %d", self.pivots, i, j)

    def run(self) -> None:
        while True:
            j = self.entering()
            if j is None:
                return
            i = self.leaving(j)
            if i is None:
                return
            self.pivot(i, j)

    def objective(self) -> Scalar:
        zero = _zero(self.system.mode)
        return sum((self.rhs[i] for i in range(self.m) if self.basis[i] >= self.l), zero)

    def solution(self) -> List[Scalar]:
        x = [_zero(self.system.mode)] * self.l
        for i, j in enumerate(self.basis):
            if j < self.l:
                x[j] = self.rhs[i]
        return x

    def multipliers(self) -> List[Scalar]:
        """y = c_Bᵀ B⁻¹ desde las columnas artificiales, con el signo original de cada fila"""
        zero = _zero(self.system.mode)
        y = []
        for i in range(self.m):
            col = self.l + i
            value = sum((self.T[r][col] for r in range(self.m) if self.basis[r] >= self.l), zero)
            y.append(self.flips[i] * value)
        return y


def _structural_row(S: FeasibilitySystem) -> Optional[int]:
    mode = S.mode
    for i, (row, bi) in enumerate(zip(S.A, S.b)):
        if all(mode.is_zero(a) for a in row) and not mode.is_zero(bi):
            return i
    return None


def solve_feasibility(S: FeasibilitySystem) -> FeasibilityOutcome:
    """Decide {x ≥ 0 : Ax = b} ≠ ∅ y devuelve un certificado re-verificado"""
    mode = S.mode
    settings = get_settings()
    zero = _zero(mode)

    if S.rows == 0:
        weights = tuple(zero for _ in range(S.cols))
        return FeasibilityOutcome(S, "feasible", WeightCertificate(weights, zero))

    row = _structural_row(S)
    if row is not None:
        one = mode.coerce(1)
        y = tuple((one if S.b[row] > 0 else -one) if i == row else zero for i in range(S.rows))
        margin, worst = farkas_values(S, y)
        logger.debug("Fila estructuralmente infactible: %s", S.row_labels[row] if S.row_labels else row)
        return FeasibilityOutcome(S, "infeasible", farkas=FarkasCertificate(y, margin, worst),
                                  stats=SolverStats(0, abs(S.b[row]), True))

    tableau = PhaseOneSimplex(S, zero if mode.exact else mode.tol)
    tableau.run()
    objective = tableau.objective()
    stats = SolverStats(tableau.pivots, objective, False)
    logger.debug("Fase 1 (%s): %d pivotes, objetivo %s", S.kind, tableau.pivots, objective)

    if mode.exact:
        if objective == 0:
            x = tuple(tableau.solution())
            cert = WeightCertificate(x, weight_residual(S, x))
            if not check_weights(S, x):
                raise CertificateRejected("Pesos del simplex no verifican A·R = b", check="solver-weights")
            return FeasibilityOutcome(S, "feasible", cert, stats=stats)
        y = tuple(tableau.multipliers())
        margin, worst = farkas_values(S, y)
        if not check_farkas(S, y):
            raise CertificateRejected("Vector de Farkas del simplex inválido", check="solver-farkas")
        return FeasibilityOutcome(S, "infeasible", farkas=FarkasCertificate(y, margin, worst), stats=stats)

    scale = max([1.0] + [abs(float(v)) for v in S.b])
    roundoff = ROUNDOFF_FACTOR * np.finfo(float).eps * scale
    if objective <= mode.tol * scale:
        x = tuple(max(v, 0.0) for v in tableau.solution())
        cert = WeightCertificate(x, weight_residual(S, x))
        if not check_weights(S, x) or objective > roundoff:
            # objetivo por encima del redondeo: factible solo dentro de la tolerancia
            ambiguous = FeasibilityOutcome(S, "ambiguous", cert, stats=stats)
            logger.warning("Veredicto ambiguo: objetivo de fase 1 = %.3e, residuo %.3e", objective, cert.residual)
            raise NumericallyAmbiguous("Factibilidad cerca de la frontera", outcome=ambiguous)
        return FeasibilityOutcome(S, "feasible", cert, stats=stats)

    y = tuple(tableau.multipliers())
    margin, worst = farkas_values(S, y)
    farkas = FarkasCertificate(y, margin, worst)
    if objective < settings.ambiguity_margin * scale or not check_farkas(S, y):
        ambiguous = FeasibilityOutcome(S, "ambiguous", farkas=farkas, stats=stats)
        logger.warning("Veredicto ambiguo: objetivo de fase 1 = %.3e", objective)
        raise NumericallyAmbiguous("Infactibilidad cerca de la frontera", outcome=ambiguous)
    return FeasibilityOutcome(S, "infeasible", farkas=farkas, stats=stats)


def multiplicity_shortcut(level: EigenLevel, n: int) -> Optional[Verdict]:
    """dim E = 2 con n ≥ 2 ⇒ no extremal"""
    if level.l == 1 and n >= 2:
        return Verdict.NOT_EXTREMAL
    return None


# ══════════════════════════════════════════════════════════════════════════════
# ORÁCULO EXHAUSTIVO
# ══════════════════════════════════════════════════════════════════════════════

def brute_force_oracle(S: FeasibilitySystem) -> bool:
    """Busca una solución básica factible entre todos los subconjuntos de columnas"""
    settings = get_settings()
    if S.cols > settings.oracle_max_cols or S.rows > settings.oracle_max_rows:
        raise TooLarge(f"Sistema {S.rows}×{S.cols} fuera de escala para el oráculo",
                       rows=S.rows, cols=S.cols)
    mode = S.mode
    if all(mode.is_zero(bi) for bi in S.b):
        return True
    tried = 0
    for size in range(1, min(S.rows, S.cols) + 1):
        for subset in itertools.combinations(range(S.cols), size):
            tried += 1
            if _basic_solution_feasible(S, subset):
                logger.debug("Oráculo: factible con columnas %s (%d subconjuntos)", subset, tried)
                return True
    logger.debug("Oráculo: infactible tras %d subconjuntos", tried)
    return False


def _basic_solution_feasible(S: FeasibilitySystem, subset: Tuple[int, ...]) -> bool:
    k = len(subset)
    if S.mode.exact:
        augmented = linalg.freeze([[row[j] for j in subset] + [bi] for row, bi in zip(S.A, S.b)])
        reduced, pivots = linalg.rref(augmented)
        if k in pivots or pivots != tuple(range(k)):
            return False
        return all(reduced[j][k] >= 0 for j in range(k))
    A = np.array([[float(row[j]) for j in subset] for row in S.A])
    b = np.array([float(v) for v in S.b])
    if np.linalg.matrix_rank(A) < k:
        return False
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    tol = S.mode.tol * 10 * max(1.0, float(np.max(np.abs(b))))
    return bool(np.max(np.abs(A @ x - b)) <= tol and np.all(x >= -tol))


# ══════════════════════════════════════════════════════════════════════════════
# VERIFICACIÓN GEOMÉTRICA DEL CERTIFICADO
# ══════════════════════════════════════════════════════════════════════════════

@dataclass
class VerificationReport:
    """Resultado de las tres comprobaciones sobre un certificado de Kähler"""
    system_ok: bool = False
    harmonic_ok: bool = False
    l_sum_ok: bool = False
    a: object = None

    @property
    def passed(self) -> bool:
        return self.system_ok and self.harmonic_ok and self.l_sum_ok

    def to_dict(self) -> dict:
        return {
            "system": self.system_ok,
            "harmonic": self.harmonic_ok,
            "l_sum": self.l_sum_ok,
            "a": str(self.a) if isinstance(self.a, sp.Basic) else self.a,
            "passed": self.passed,
        }


def weighted_harmonic_sum(basis: EigenfunctionBasis, weights: Sequence[Scalar]) -> Form11:
    """Σ R_ν [H(φ dd^cφ) + H(ψ dd^cψ)]"""
    total = Form11.zero(basis.shape)
    for R, (phi, psi) in zip(weights, basis.pairs):
        if R == 0:
            continue
        term = harmonic_project(ddc(phi).multiply(phi)) + harmonic_project(ddc(psi).multiply(psi))
        total = total + term.scale_by(R)
    return total


def omega_multiple(form: Form11):
    """Devuelve c si form = c·ω con c real; None en otro caso"""
    if not form.is_constant():
        return None
    mode = form.shape.mode
    M = form.constant_matrix()
    n = form.n
    if mode.exact:
        c = sp.expand(-2 * sp.I * M[0][0])
        if sp.im(c) != 0:
            return None
        for a in range(n):
            for b in range(n):
                expected = c * sp.I / 2 if a == b else 0
                if sp.expand(M[a][b] - expected) != 0:
                    return None
        return c
    c = -2j * M[0][0]
    ref = max(1.0, abs(c))
    if abs(c.imag) > mode.tol * ref:
        return None
    for a in range(n):
        for b in range(n):
            expected = c * 0.5j if a == b else 0
            if abs(M[a][b] - expected) > mode.tol * ref:
                return None
    return c.real


def verify_certificate(level: EigenLevel, R: WeightCertificate, basis: EigenfunctionBasis) -> VerificationReport:
    """
    (i) A·R = b; (ii) Σ R_ν[H(φ dd^cφ) + H(ψ dd^cψ)] = −aω con a > 0;
    (iii) Σ R_ν[L_rhs(φ_ν) + L_rhs(ψ_ν)] = 0.
    """
    weights = R.weights
    mode = level.mode
    if len(weights) != level.l:
        raise CertificateRejected(f"Se esperaban {level.l} pesos, hay {len(weights)}", check="precondition")
    if any(mode.sign(x) < 0 for x in weights):
        raise CertificateRejected("Peso negativo en el certificado", check="precondition")

    report = VerificationReport()
    S = build_kahler_system(level, basis.shape.n)
    report.system_ok = check_weights(S, weights)
    if not report.system_ok:
        raise CertificateRejected("A·R ≠ b", check="system")

    c = omega_multiple(weighted_harmonic_sum(basis, weights))
    negative = c is not None and (bool(sp.sympify(c).is_negative) if mode.exact else c < 0)
    if not negative:
        raise CertificateRejected("La suma armónica no es −aω con a > 0", check="harmonic")
    report.harmonic_ok = True
    report.a = -c

    total = TrigPoly.zero(basis.shape)
    lam = basis.eigenvalue
    reference = 1.0
    for weight, (phi, psi) in zip(weights, basis.pairs):
        if weight == 0:
            continue
        piece = L_rhs(phi, lam) * weight
        reference = max(reference, piece.max_abs())
        total = total + piece + L_rhs(psi, lam) * weight
    report.l_sum_ok = total.is_zero(reference=reference)
    if not report.l_sum_ok:
        raise CertificateRejected("Σ R_ν[L(φ)+L(ψ)] ≠ 0", check="l_sum")
    return report


def immersion_implies_kahler(level: EigenLevel, outcome: FeasibilityOutcome) -> Optional[WeightCertificate]:
    """R = c'/2 a partir de un certificado de inmersión (requiere estructura compleja)"""
    if outcome.weights is None:
        return None
    mode = level.mode
    half = mode.coerce(Fraction(1, 2)) if mode.exact else 0.5
    R = tuple(c * half for c in outcome.weights.weights)
    S = build_kahler_system(level, level.reps[0].n)
    if not check_weights(S, R):
        return None
    return WeightCertificate(R, weight_residual(S, R))


def immersion_weights_symbolic(outcome: FeasibilityOutcome) -> List:
    """c_ν = c'_ν / (4π²)"""
    if outcome.weights is None:
        return []
    out = []
    for c in outcome.weights.weights:
        if outcome.system.mode.exact:
            q = Fraction(c)
            out.append(sp.Rational(q.numerator, q.denominator) / (4 * sp.pi**2))
        else:
            out.append(float(c) / (4 * np.pi**2))
    return out


def verify_immersion_certificate(level: EigenLevel, outcome: FeasibilityOutcome,
                                 shape: Optional[TorusShape] = None) -> Dict[str, object]:
    """
    Comprueba el sistema y, con estructura compleja, que la aplicación
    x ↦ (a_ν φ_ν, a_ν ψ_ν) tenga longitud constante: radio² = m/λ.
    """
    if outcome.weights is None:
        return {"system": False, "radius_squared": None, "radius_ok": None}
    weights = outcome.weights.weights
    S = build_immersion_system(level)
    result: Dict[str, object] = {"system": check_weights(S, weights), "radius_squared": None, "radius_ok": None}
    if shape is None:
        return result
    mode = level.mode
    m = shape.dim
    basis = eigenfunction_basis(level, shape)
    total = TrigPoly.zero(shape)
    for c, (phi, psi) in zip(weights, basis.pairs):
        if c == 0:
            continue
        total = total + (trig_mul(phi, phi) + trig_mul(psi, psi)) * c
    r = level.squared_norm
    expected = Fraction(2 * m) / (Fraction(shape.volume) * r) if mode.exact else 2 * m / (float(shape.volume) * float(r))
    result["radius_ok"] = total.equals(TrigPoly.constant(expected, shape))
    if mode.exact:
        result["radius_squared"] = str(sp.Integer(m) / level.eigenvalue)
    else:
        result["radius_squared"] = m / level.eigenvalue_float
    return result
