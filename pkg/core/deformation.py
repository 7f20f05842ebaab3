"""
ToroExtremal v1.0 - Deformaciones Armónicas
===========================================
Familia de métricas ω + tα con α constante (la métrica sigue siendo plana),
normalizada para conservar el volumen. Compara las derivadas laterales de
λ_k(g_t) con los autovalores extremos de la matriz de Gram de Q_α.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence

import numpy as np
import sympy as sp

from core.config import get_settings
from core.errors import NonRealInput, NotPositive, TraceNotZero, UnsupportedDeformation
from core.fourier_calculus import (
    EigenfunctionBasis,
    Form11,
    TorusShape,
    TrigPoly,
    ddc,
    eigenfunction_basis,
    form_inner,
    kahler_form,
    q_alpha_polar,
    trig_integrate,
)
from core.lattice_spectrum import (
    LatticeBasis,
    dual_basis,
    level_for_index,
    levels_covering,
    short_vectors,
)

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
# DEFORMACIÓN
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class HarmonicDeformation:
    """Dirección de deformación α, forma (1,1) real"""
    alpha: Form11
    label: str = ""

    def __post_init__(self):
        if not self.alpha.is_real():
            raise NonRealInput("α debe ser una forma (1,1) real")

    @classmethod
    def from_hermitian(cls, matrix: Sequence[Sequence[Any]], shape: TorusShape, label: str = "") -> "HarmonicDeformation":
        """α = (i/2) A para A hermítica; entradas como pares (re, im) o complejos"""
        F = shape.field
        rows = []
        for row in matrix:
            out = []
            for entry in row:
                re, im = _split_entry(entry, shape.mode.exact)
                out.append(F.gaussian(-im / 2, re / 2))
            rows.append(out)
        return cls(Form11.from_constants(rows, shape), label)

    @classmethod
    def from_potential(cls, psi: TrigPoly, label: str = "") -> "HarmonicDeformation":
        """α = dd^c ψ para ψ real (solo entra en Q_α)"""
        if not psi.is_real():
            raise NonRealInput("El potencial ψ debe ser real")
        return cls(ddc(psi), label)

    @property
    def shape(self) -> TorusShape:
        return self.alpha.shape

    @property
    def is_constant(self) -> bool:
        return self.alpha.is_constant()

    @property
    def trace_zero(self) -> bool:
        """∫ g(α, ω) dμ = 0"""
        value = trig_integrate(form_inner(self.alpha, kahler_form(self.shape)))
        if self.shape.mode.exact:
            return sp.simplify(value) == 0
        return abs(value) <= self.shape.mode.tol * 10

    def hermitian_matrix(self) -> np.ndarray:
        """A = −2iα como matriz compleja numpy"""
        if not self.is_constant:
            raise UnsupportedDeformation("Solo las deformaciones constantes tienen matriz hermítica")
        M = self.alpha.constant_matrix()
        return np.array([[complex(-2j * complex(sp.N(c))) if isinstance(c, sp.Basic) else -2j * c
                          for c in row] for row in M], dtype=complex)

    def hermitian_exact(self) -> sp.Matrix:
        if not self.is_constant:
            raise UnsupportedDeformation("Solo las deformaciones constantes tienen matriz hermítica")
        M = self.alpha.constant_matrix()
        return sp.Matrix([[sp.expand(-2 * sp.I * sp.sympify(c)) for c in row] for row in M])

    def to_dict(self) -> dict:
        if self.is_constant:
            A = self.hermitian_matrix()
            return {"label": self.label,
                    "hermitian": [[[float(z.real), float(z.imag)] for z in row] for row in A]}
        return {"label": self.label, "alpha": self.alpha.to_dict()}


def _split_entry(entry, exact: bool):
    if isinstance(entry, (tuple, list)):
        re, im = entry
    elif isinstance(entry, complex):
        re, im = entry.real, entry.imag
    else:
        re, im = entry, 0
    if exact:
        return Fraction(re), Fraction(im)
    return float(re), float(im)


def realify_hermitian(A: np.ndarray) -> np.ndarray:
    """Bloque (α,β) = [[S, T], [−T, S]] con A = S + iT, coordenadas intercaladas"""
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n))
    for a in range(n):
        for b in range(n):
            S, T = A[a, b].real, A[a, b].imag
            out[2 * a:2 * a + 2, 2 * b:2 * b + 2] = [[S, T], [-T, S]]
    return out


# ══════════════════════════════════════════════════════════════════════════════
# ESPECTRO DEFORMADO
# ══════════════════════════════════════════════════════════════════════════════

class DeformedSpectrum:
    """
    Evalúa t ↦ λ_k(g_t) para |t| ≤ t_max con un conjunto fijo de vectores
    duales candidatos suficiente para todo el intervalo.
    """

    def __init__(self, B: LatticeBasis, d: HarmonicDeformation, k: int, t_max: float, normalize: bool = True):
        if not d.is_constant:
            raise UnsupportedDeformation("El espectro deformado requiere α constante")
        self.k = k
        self.n = B.n
        self.normalize = normalize
        self.A = d.hermitian_matrix()
        self.A_real = realify_hermitian(self.A)
        self.t_max = abs(t_max)
        norm_A = float(np.max(np.abs(np.linalg.eigvalsh(self.A)))) if self.A.size else 0.0
        spread = self.t_max * norm_A
        if spread >= 1:
            raise NotPositive(f"ω + tα puede degenerar para |t| ≤ {self.t_max}")
        dual = dual_basis(B)
        levels = levels_covering(dual, k)
        base = float(level_for_index(levels, k).level.squared_norm)
        condition = (1 + spread) / (1 - spread)
        factor_spread = condition ** 2
        radius = base * factor_spread * (1 + 1e-9)
        self.vectors = np.array([[float(x) for x in v.coords] for v in short_vectors(dual, radius)])
        logger.debug("Espectro deformado: k=%d, radio=%.6g, %d candidatos", k, radius, len(self.vectors))

    def metric(self, t: float) -> np.ndarray:
        H = np.eye(self.n) + t * self.A
        if np.min(np.linalg.eigvalsh(H)) <= 0:
            raise NotPositive(f"ω + tα no es de Kähler en t = {t}")
        return H

    def real_metric(self, t: float) -> np.ndarray:
        """Matriz real 2n×2n de g_t (o de g̃_t sin normalizar)"""
        H = self.metric(t)
        G = np.eye(2 * self.n) + t * self.A_real
        return normalized_real_metric(G, float(np.linalg.det(H).real), self.n) if self.normalize else G

    def value(self, t: float) -> float:
        if abs(t) > self.t_max * (1 + 1e-12):
            raise ValueError(f"t = {t} fuera del intervalo del espectro deformado (|t| ≤ {self.t_max})")
        Ginv = np.linalg.inv(self.real_metric(t))
        quad = np.einsum("ij,jk,ik->i", self.vectors, Ginv, self.vectors)
        eigs = np.sort(np.repeat(4 * math.pi**2 * quad, 2))
        return float(eigs[self.k - 1])


def normalized_real_metric(G, det_h, n: int):
    """g_t = det(H)^{-1/n} g̃_t; numpy o sympy según el tipo de G"""
    if isinstance(G, sp.MatrixBase):
        return G * sp.Pow(det_h, -sp.Rational(1, n))
    return G * det_h ** (-1.0 / n)


def realify_exact(A: sp.Matrix) -> sp.Matrix:
    """Versión exacta de realify_hermitian"""
    n = A.rows
    out = sp.zeros(2 * n, 2 * n)
    for a in range(n):
        for b in range(n):
            S, T = sp.re(A[a, b]), sp.im(A[a, b])
            out[2 * a, 2 * b], out[2 * a, 2 * b + 1] = S, T
            out[2 * a + 1, 2 * b], out[2 * a + 1, 2 * b + 1] = -T, S
    return out


def deformed_spectrum(B: LatticeBasis, d: HarmonicDeformation, t: float, k: int, normalize: bool = True) -> float:
    """λ_k(g_t) con g_t normalizada a volumen constante"""
    return DeformedSpectrum(B, d, k, abs(t), normalize).value(t)


def deformed_volume(B: LatticeBasis, d: HarmonicDeformation, t, normalize: bool = True):
    """
    Vol(g_t) = Vol_euclídeo(Γ)·√det G_t, con G_t la matriz real de la métrica
    (reescalada como en DeformedSpectrum si normalize). Exacto con t racional si
    la base es exacta.
    """
    n = B.n
    if B.mode.exact:
        q = Fraction(t)
        tq = sp.Rational(q.numerator, q.denominator)
        A = d.hermitian_exact()
        detH = sp.simplify((sp.eye(n) + tq * A).det())
        if detH.is_positive is False or detH == 0:
            raise NotPositive(f"ω + tα no es de Kähler en t = {t}")
        G = sp.eye(2 * n) + tq * realify_exact(A)
        if normalize:
            G = normalized_real_metric(G, detH, n)
        vol0 = sp.Rational(Fraction(B.volume).numerator, Fraction(B.volume).denominator)
        return sp.simplify(vol0 * sp.sqrt(sp.simplify(G.det())))
    A = d.hermitian_matrix()
    detH = float(np.linalg.det(np.eye(n) + float(t) * A).real)
    if detH <= 0:
        raise NotPositive(f"ω + tα no es de Kähler en t = {t}")
    G = np.eye(2 * n) + float(t) * realify_hermitian(A)
    if normalize:
        G = normalized_real_metric(G, detH, n)
    return float(B.volume) * math.sqrt(float(np.linalg.det(G)))


# ══════════════════════════════════════════════════════════════════════════════
# MATRIZ DE GRAM DE Q_α
# ══════════════════════════════════════════════════════════════════════════════

@dataclass
class QGramMatrix:
    """Matriz simétrica (2l)×(2l) de Q_α polarizada sobre la base de autofunciones"""
    entries: List[List[Any]]
    exact: bool

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_float(self) -> np.ndarray:
        return np.array([[float(sp.N(x)) if self.exact else float(x) for x in row] for row in self.entries])

    def eigenvalues(self) -> np.ndarray:
        if self.size == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.as_float())

    @property
    def min_eig(self) -> float:
        return float(self.eigenvalues()[0]) if self.size else 0.0

    @property
    def max_eig(self) -> float:
        return float(self.eigenvalues()[-1]) if self.size else 0.0

    def is_symmetric(self) -> bool:
        for i in range(self.size):
            for j in range(i + 1, self.size):
                diff = self.entries[i][j] - self.entries[j][i]
                if self.exact and sp.simplify(diff) != 0:
                    return False
                if not self.exact and abs(diff) > 1e-9 * max(1.0, abs(self.entries[i][j])):
                    return False
        return True

    def weighted_trace(self, weights: Sequence) -> Any:
        """Σ_ν R_ν (Q(φ_ν) + Q(ψ_ν))"""
        total = 0
        for nu, R in enumerate(weights):
            q = self.entries[2 * nu][2 * nu] + self.entries[2 * nu + 1][2 * nu + 1]
            total += (sp.Rational(Fraction(R).numerator, Fraction(R).denominator) if self.exact else float(R)) * q
        return sp.simplify(total) if self.exact else total

    def to_dict(self) -> dict:
        return {"size": self.size, "min_eig": self.min_eig, "max_eig": self.max_eig,
                "entries": [[str(x) if self.exact else float(x) for x in row] for row in self.entries]}


def q_gram(basis: EigenfunctionBasis, d: HarmonicDeformation) -> QGramMatrix:
    """Gram polarizada de Q_α; requiere traza nula"""
    if not d.trace_zero:
        raise TraceNotZero("∫ g(α, ω) dμ ≠ 0")
    functions = basis.functions
    size = len(functions)
    exact = basis.shape.mode.exact
    entries: List[List[Any]] = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            value = q_alpha_polar(functions[i], functions[j], d.alpha)
            entries[i][j] = value
            entries[j][i] = value
    return QGramMatrix(entries, exact)


# ══════════════════════════════════════════════════════════════════════════════
# DERIVADAS LATERALES (TEOREMA EI)
# ══════════════════════════════════════════════════════════════════════════════

@dataclass
class DerivativeReport:
    alpha: dict
    k: int
    d_left: float
    d_right: float
    qgram_min: float
    qgram_max: float
    expected_left: Optional[float]
    expected_right: Optional[float]
    case: str
    tolerance: float
    passed: bool
    richardson: bool = False
    eigenvalues: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "k": self.k,
            "d_left": self.d_left,
            "d_right": self.d_right,
            "qgram_min": self.qgram_min,
            "qgram_max": self.qgram_max,
            "expected_left": self.expected_left,
            "expected_right": self.expected_right,
            "case": self.case,
            "tolerance": self.tolerance,
            "richardson": self.richardson,
            "pass": self.passed,
        }


def one_sided_derivatives(curve: DeformedSpectrum, h: float):
    """Diferencias de segundo orden: (−3f0 + 4f(±h) − f(±2h)) / (±2h)"""
    f0 = curve.value(0.0)
    right = (-3 * f0 + 4 * curve.value(h) - curve.value(2 * h)) / (2 * h)
    left = (3 * f0 - 4 * curve.value(-h) + curve.value(-2 * h)) / (2 * h)
    return left, right


def _closest(values: np.ndarray, x: float) -> float:
    return float(values[np.argmin(np.abs(values - x))])


def derivative_check(B: LatticeBasis, d: HarmonicDeformation, k: int, h: Optional[float] = None) -> DerivativeReport:
    """Compara derivadas laterales de λ_k(g_t) en t=0 con los autovalores extremos de Q_α"""
    h = get_settings().fd_step if h is None else h
    tol = max(1e-6, 10 * h * h)
    levels = levels_covering(dual_basis(B), k)
    lookup = level_for_index(levels, k)
    shape = TorusShape.from_basis(B)
    gram = q_gram(eigenfunction_basis(lookup.level, shape), d)
    eigs = gram.eigenvalues()
    qmin, qmax = float(eigs[0]), float(eigs[-1])

    if lookup.is_strictly_above_prev:
        case, expected_left, expected_right = "above_prev", qmax, qmin
    elif lookup.is_strictly_below_next:
        case, expected_left, expected_right = "below_next", qmin, qmax
    else:
        case, expected_left, expected_right = "interior", None, None

    curve = DeformedSpectrum(B, d, k, 2 * h)
    left, right = one_sided_derivatives(curve, h)

    def matches(l_val: float, r_val: float) -> bool:
        el = expected_left if expected_left is not None else _closest(eigs, l_val)
        er = expected_right if expected_right is not None else _closest(eigs, r_val)
        return abs(l_val - el) <= tol and abs(r_val - er) <= tol

    richardson = False
    passed = matches(left, right)
    if not passed:
        half_left, half_right = one_sided_derivatives(curve, h / 2)
        left = (4 * half_left - left) / 3
        right = (4 * half_right - right) / 3
        richardson = True
        passed = matches(left, right)
        logger.debug("Extrapolación de Richardson aplicada (k=%d): pasa=%s", k, passed)

    return DerivativeReport(
        alpha=d.to_dict(), k=k, d_left=left, d_right=right, qgram_min=qmin, qgram_max=qmax,
        expected_left=expected_left, expected_right=expected_right, case=case,
        tolerance=tol, passed=passed, richardson=richardson, eigenvalues=[float(x) for x in eigs],
    )


def first_order_check(B: LatticeBasis, d: HarmonicDeformation, k: int, h: Optional[float] = None) -> dict:
    """La derivada normalizada difiere de la no normalizada en λ_k·tr(A)/n"""
    h = get_settings().fd_step if h is None else h
    normalized = DeformedSpectrum(B, d, k, 2 * h, normalize=True)
    raw = DeformedSpectrum(B, d, k, 2 * h, normalize=False)
    _, right_norm = one_sided_derivatives(normalized, h)
    _, right_raw = one_sided_derivatives(raw, h)
    lam = normalized.value(0.0)
    trace = float(np.trace(d.hermitian_matrix()).real)
    expected = lam * trace / B.n
    tol = max(1e-6, 10 * h * h) * max(1.0, abs(lam))
    return {
        "normalized": right_norm,
        "unnormalized": right_raw,
        "difference": right_norm - right_raw,
        "expected_difference": expected,
        "pass": abs((right_norm - right_raw) - expected) <= tol,
    }


def sample_trace_zero_alphas(shape: TorusShape, count: int, seed: int = 0, size: float = 0.5) -> List[HarmonicDeformation]:
    """α constantes aleatorias de traza nula con entradas racionales"""
    rng = np.random.default_rng(seed)
    n = shape.n
    denominator = 8
    bound = max(1, int(size * denominator))
    out = []
    for s in range(count):
        A = [[(Fraction(0), Fraction(0)) for _ in range(n)] for _ in range(n)]
        for a in range(n):
            A[a][a] = (Fraction(int(rng.integers(-bound, bound + 1)), denominator), Fraction(0))
            for b in range(a + 1, n):
                re = Fraction(int(rng.integers(-bound, bound + 1)), denominator)
                im = Fraction(int(rng.integers(-bound, bound + 1)), denominator)
                A[a][b] = (re, im)
                A[b][a] = (re, -im)
        trace = sum(A[a][a][0] for a in range(n))
        for a in range(n):
            A[a][a] = (A[a][a][0] - trace / n, Fraction(0))
        if not shape.mode.exact:
            A = [[(float(re), float(im)) for re, im in row] for row in A]
        out.append(HarmonicDeformation.from_hermitian(A, shape, label=f"muestra-{s}"))
    return out


def indefiniteness_check(basis: EigenfunctionBasis, alphas: Sequence[HarmonicDeformation],
                         weights: Optional[Sequence] = None) -> dict:
    """
    min_eig ≤ 0 ≤ max_eig para cada α muestreada. Con los pesos R de un
    certificado de Kähler exige además Σ_ν R_ν (Q_α(φ_ν) + Q_α(ψ_ν)) = 0.
    """
    rows = []
    ok = True
    for d in alphas:
        gram = q_gram(basis, d)
        lo, hi = gram.min_eig, gram.max_eig
        scale = max(1.0, abs(lo), abs(hi))
        indefinite = lo <= 1e-9 * scale and hi >= -1e-9 * scale
        row = {"label": d.label, "min_eig": lo, "max_eig": hi, "indefinite": indefinite}
        if weights is not None:
            trace = gram.weighted_trace(weights)
            if gram.exact:
                trace_ok = trace == 0
            else:
                trace_ok = abs(trace) <= basis.shape.mode.tol * 10 * scale
            row["weighted_trace"] = str(trace) if gram.exact else float(trace)
            row["trace_zero"] = bool(trace_ok)
            indefinite = indefinite and trace_ok
        ok = ok and indefinite
        rows.append(row)
    return {"samples": rows, "pass": ok}
