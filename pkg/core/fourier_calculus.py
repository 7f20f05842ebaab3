"""
ToroExtremal v1.0 - Cálculo de Fourier Simbólico
================================================
Polinomios trigonométricos Σ c_u e^{2πi⟨u,x⟩} y formas (1,1) sobre el toro
plano, con Δ, dd^c, δ, δ^c, el proyector armónico H, el operador L y la
forma cuadrática Q_α.

Modo exacto: los coeficientes viven en QQ(i)[π] (anillo de polinomios de
sympy) y cada polinomio lleva un factor de escala algebraico positivo
(las normalizaciones √(2/Vol)). Modo flotante: coeficientes complejos.

Normalización de la métrica: g_{jk̄} = ½δ, g^{jk̄} = 2δ, ω_{αβ̄} = (i/2)δ.
"""

import itertools
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy as sp
from sympy import QQ, QQ_I
from sympy.polys.rings import PolyElement, ring

from core.errors import (
    DimensionMismatch,
    IncommensurableScale,
    ModeMismatch,
    NonRealInput,
    NotAnEigenfunction,
    UnsupportedDegree,
)
from core.lattice_spectrum import EigenLevel, LatticeBasis
from core.scalars import NumericMode, Scalar, format_rational

logger = logging.getLogger(__name__)

PI_RING, PI = ring([sp.pi], QQ_I)

Key = Tuple[Scalar, ...]

MAX_FORM_DEGREE = 4


# ══════════════════════════════════════════════════════════════════════════════
# CUERPOS DE COEFICIENTES
# ══════════════════════════════════════════════════════════════════════════════

def _qq(q) -> Any:
    q = Fraction(q)
    return QQ(q.numerator, q.denominator)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class ExactField:
    """Coeficientes en QQ(i)[π]"""
    exact = True
    zero = PI_RING.zero
    one = PI_RING.one

    def gaussian(self, re, im=0):
        return PI_RING.ground_new(QQ_I(_qq(re), _qq(im)))

    def pi_power(self, k: int):
        return PI**k

    def conj(self, c):
        return PI_RING.from_dict({m: QQ_I(v.x, -v.y) for m, v in c.items()})

    def real_part(self, c):
        return PI_RING.from_dict({m: QQ_I(v.x, 0) for m, v in c.items()})

    def is_zero(self, c, reference: float = 1.0) -> bool:
        return not c

    def magnitude(self, c) -> float:
        return abs(self.to_complex(c))

    def to_complex(self, c) -> complex:
        return sum((complex(float(v.x), float(v.y)) * math.pi ** m[0] for m, v in c.items()), 0j)

    def to_sympy(self, c) -> sp.Expr:
        return c.as_expr()

    def from_value(self, value):
        if isinstance(value, PolyElement):
            return value
        if isinstance(value, bool):
            raise TypeError("bool no es un coeficiente")
        if isinstance(value, (int, Fraction)):
            return self.gaussian(Fraction(value))
        if isinstance(value, (float, complex)):
            raise ModeMismatch(f"Valor flotante {value!r} en modo exacto")
        return PI_RING.from_expr(sp.sympify(value))

    def key(self, coords: Sequence) -> Key:
        return tuple(Fraction(x) for x in coords)


class FloatField:
    """Coeficientes complejos de doble precisión"""
    exact = False
    zero = 0j
    one = 1 + 0j

    def __init__(self, tol: float):
        self.tol = tol

    def gaussian(self, re, im=0):
        return complex(float(re), float(im))

    def pi_power(self, k: int):
        return math.pi**k

    def conj(self, c):
        return c.conjugate()

    def real_part(self, c):
        return complex(c.real, 0.0)

    def is_zero(self, c, reference: float = 1.0) -> bool:
        return abs(c) <= self.tol * max(1.0, reference)

    def magnitude(self, c) -> float:
        return abs(c)

    def to_complex(self, c) -> complex:
        return complex(c)

    def to_sympy(self, c):
        return c

    def from_value(self, value):
        if isinstance(value, sp.Basic):
            return complex(sp.N(value))
        return complex(value)

    def key(self, coords: Sequence) -> Key:
        return tuple(round(float(x), 12) + 0.0 for x in coords)


_EXACT_FIELD = ExactField()


def field_for(mode: NumericMode):
    return _EXACT_FIELD if mode.exact else FloatField(mode.tol)


@dataclass(frozen=True)
class TorusShape:
    """Dimensión compleja, volumen y modo compartidos por todos los operandos"""
    n: int
    volume: Scalar
    mode: NumericMode

    @classmethod
    def from_basis(cls, B: LatticeBasis) -> "TorusShape":
        return cls(B.n, B.volume, B.mode)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def field(self):
        return field_for(self.mode)

    def check(self, other: "TorusShape") -> None:
        if self.n != other.n or self.mode.exact != other.mode.exact:
            raise DimensionMismatch(f"Toros incompatibles: n={self.n} vs n={other.n}")
        if not self.mode.eq(self.volume, other.volume):
            raise DimensionMismatch(f"Volúmenes distintos: {self.volume} vs {other.volume}")


# ══════════════════════════════════════════════════════════════════════════════
# POLINOMIOS TRIGONOMÉTRICOS
# ══════════════════════════════════════════════════════════════════════════════

def _split_scale(scale) -> Tuple[Fraction, sp.Expr]:
    coeff, rest = sp.sympify(scale).as_coeff_Mul()
    if not coeff.is_Rational:
        raise IncommensurableScale(f"Factor de escala no algebraico: {scale}")
    return Fraction(int(coeff.p), int(coeff.q)), rest


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Σ c_u e^{2πi⟨u,x⟩} · scale, sin coeficientes nulos almacenados"""
    terms: Mapping[Key, Any]
    shape: TorusShape
    scale: Any = 1

    # ─── construcción ────────────────────────────────────────────────────────

    @classmethod
    def build(cls, terms: Mapping[Key, Any], shape: TorusShape, scale: Any = 1) -> "TrigPoly":
        F = shape.field
        if F.exact:
            factor, rest = _split_scale(scale)
            if factor == 0:
                return cls({}, shape, sp.Integer(1))
            mult = None if factor == 1 else F.gaussian(factor)
            clean = {}
            for u, c in terms.items():
                if mult is not None:
                    c = c * mult
                if c:
                    clean[u] = c
            return cls(clean, shape, rest if clean else sp.Integer(1))
        s = float(scale)
        clean = {}
        biggest = max((abs(c) for c in terms.values()), default=0.0) * abs(s)
        noise = 1e-14 * max(1.0, biggest)
        for u, c in terms.items():
            c = c * s
            if abs(c) > noise:
                clean[u] = c
        return cls(clean, shape, 1.0)

    @classmethod
    def zero(cls, shape: TorusShape) -> "TrigPoly":
        return cls.build({}, shape)

    @classmethod
    def constant(cls, value, shape: TorusShape) -> "TrigPoly":
        F = shape.field
        return cls.build({F.key([0] * shape.dim): F.from_value(value)}, shape)

    @classmethod
    def mode(cls, u: Sequence, shape: TorusShape, coeff=1) -> "TrigPoly":
        """c·e^{2πi⟨u,x⟩}"""
        F = shape.field
        if len(u) != shape.dim:
            raise DimensionMismatch(f"Frecuencia de longitud {len(u)} en dimensión real {shape.dim}")
        return cls.build({F.key(u): F.from_value(coeff)}, shape)

    # ─── acceso ──────────────────────────────────────────────────────────────

    @property
    def field(self):
        return self.shape.field

    @property
    def zero_key(self) -> Key:
        return self.field.key([0] * self.shape.dim)

    def frequencies(self) -> List[Key]:
        return sorted(self.terms)

    def zero_mode(self):
        return self.terms.get(self.zero_key, self.field.zero)

    def coefficient(self, u: Sequence):
        """Coeficiente en u incluyendo el factor de escala"""
        F = self.field
        c = self.terms.get(F.key(u), F.zero)
        if F.exact:
            return sp.expand(F.to_sympy(c) * self.scale)
        return c

    def max_abs(self) -> float:
        F = self.field
        s = float(self.scale) if F.exact else 1.0
        return max((F.magnitude(c) for c in self.terms.values()), default=0.0) * s

    def is_zero(self, reference: Optional[float] = None) -> bool:
        F = self.field
        if F.exact:
            return not self.terms
        ref = 1.0 if reference is None else reference
        return all(F.is_zero(c, ref) for c in self.terms.values())

    def is_constant(self) -> bool:
        return all(u == self.zero_key for u in self.terms)

    # ─── álgebra ─────────────────────────────────────────────────────────────

    def _coerce(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            self.shape.check(other.shape)
            return other
        return TrigPoly.constant(other, self.shape)

    def _align(self, other: "TrigPoly"):
        F = self.field
        if not F.exact or not other.terms:
            return self.scale, F.one, F.one
        if not self.terms:
            return other.scale, F.one, F.one
        if self.scale == other.scale:
            return self.scale, F.one, F.one
        ratio = sp.radsimp(sp.sympify(other.scale) / self.scale)
        if not ratio.is_Rational:
            raise IncommensurableScale(f"Escalas inconmensurables: {self.scale} y {other.scale}")
        return self.scale, F.one, F.gaussian(Fraction(int(ratio.p), int(ratio.q)))

    def __add__(self, other) -> "TrigPoly":
        other = self._coerce(other)
        scale, a, b = self._align(other)
        F = self.field
        terms = {u: c * a for u, c in self.terms.items()}
        for u, c in other.terms.items():
            terms[u] = terms.get(u, F.zero) + c * b
        return TrigPoly.build(terms, self.shape, scale)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({u: -c for u, c in self.terms.items()}, self.shape, self.scale)

    def __sub__(self, other) -> "TrigPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TrigPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return trig_mul(self, other)
        return self.scale_by(self.field.from_value(other))

    __rmul__ = __mul__

    def scale_by(self, c) -> "TrigPoly":
        return TrigPoly.build({u: v * c for u, v in self.terms.items()}, self.shape, self.scale)

    def map_modes(self, multiplier: Callable[[Key], Any]) -> "TrigPoly":
        """Multiplica cada modo u por multiplier(u)"""
        return TrigPoly.build({u: c * multiplier(u) for u, c in self.terms.items()}, self.shape, self.scale)

    def conj(self) -> "TrigPoly":
        F = self.field
        terms = {tuple(-x for x in u) if F.exact else F.key([-x for x in u]): F.conj(c)
                 for u, c in self.terms.items()}
        return TrigPoly(terms, self.shape, self.scale)

    # ─── comparación y evaluación ────────────────────────────────────────────

    def equals(self, other) -> bool:
        other = self._coerce(other)
        try:
            diff = self - other
        except IncommensurableScale:
            return self.is_zero() and other.is_zero()
        return diff.is_zero(reference=max(self.max_abs(), other.max_abs()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (TrigPoly, int, Fraction, float, complex, sp.Basic)):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def is_real(self) -> bool:
        return self.equals(self.conj())

    def evaluate(self, x: Sequence[float]) -> complex:
        F = self.field
        s = float(self.scale) if F.exact else 1.0
        total = 0j
        for u, c in self.terms.items():
            phase = 2 * math.pi * sum(float(ui) * float(xi) for ui, xi in zip(u, x))
            total += F.to_complex(c) * complex(math.cos(phase), math.sin(phase))
        return total * s

    def to_dict(self) -> dict:
        F = self.field
        out = []
        for u in self.frequencies():
            key = [format_rational(x) if F.exact else x for x in u]
            c = self.terms[u]
            value = str(sp.expand(F.to_sympy(c) * self.scale)) if F.exact else [c.real, c.imag]
            out.append([key, value])
        return {"terms": out}


def trig_mul(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Producto puntual: las frecuencias se suman"""
    f.shape.check(g.shape)
    F = f.field
    terms: Dict[Key, Any] = {}
    for u, a in f.terms.items():
        for v, b in g.terms.items():
            w = tuple(x + y for x, y in zip(u, v)) if F.exact else F.key([x + y for x, y in zip(u, v)])
            terms[w] = terms.get(w, F.zero) + a * b
    scale = sp.sympify(f.scale) * g.scale if F.exact else 1.0
    return TrigPoly.build(terms, f.shape, scale)


def trig_integrate(f: TrigPoly):
    """Vol × coeficiente de frecuencia 0"""
    F = f.field
    c0 = f.zero_mode()
    if F.exact:
        vol = Fraction(f.shape.volume)
        return sp.expand(sp.Rational(vol.numerator, vol.denominator) * F.to_sympy(c0) * f.scale)
    return complex(float(f.shape.volume) * c0)


def trig_integrate_real(f: TrigPoly):
    F = f.field
    c0 = F.real_part(f.zero_mode())
    if F.exact:
        vol = Fraction(f.shape.volume)
        return sp.expand(sp.Rational(vol.numerator, vol.denominator) * F.to_sympy(c0) * f.scale)
    return float(f.shape.volume) * c0.real


def _dot(u: Key, v: Key):
    return sum(a * b for a, b in zip(u, v))


def laplacian(f: TrigPoly) -> TrigPoly:
    """Δe_u = 4π²|u|² e_u"""
    F = f.field
    pi2 = F.pi_power(2)
    return f.map_modes(lambda u: F.gaussian(4 * _dot(u, u)) * pi2)


def grad_inner(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """∇f·∇g: cada par de modos (u, v) aporta −4π²(u·v) f_u g_v en u+v"""
    f.shape.check(g.shape)
    F = f.field
    pi2 = F.pi_power(2)
    terms: Dict[Key, Any] = {}
    for u, a in f.terms.items():
        for v, b in g.terms.items():
            uv = _dot(u, v)
            if uv == 0:
                continue
            w = tuple(x + y for x, y in zip(u, v)) if F.exact else F.key([x + y for x, y in zip(u, v)])
            terms[w] = terms.get(w, F.zero) + a * b * F.gaussian(-4 * uv) * pi2
    scale = sp.sympify(f.scale) * g.scale if F.exact else 1.0
    return TrigPoly.build(terms, f.shape, scale)


# ══════════════════════════════════════════════════════════════════════════════
# FORMAS (1,1)
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class Form11:
    """Σ η_{αβ̄} dz^α ∧ dz̄^β con coeficientes TrigPoly"""
    coeffs: Tuple[Tuple[TrigPoly, ...], ...]
    shape: TorusShape

    @classmethod
    def zero(cls, shape: TorusShape) -> "Form11":
        z = TrigPoly.zero(shape)
        return cls(tuple(tuple(z for _ in range(shape.n)) for _ in range(shape.n)), shape)

    @classmethod
    def from_constants(cls, matrix: Sequence[Sequence[Any]], shape: TorusShape) -> "Form11":
        rows = tuple(tuple(TrigPoly.constant(c, shape) for c in row) for row in matrix)
        return cls(rows, shape)

    @property
    def n(self) -> int:
        return self.shape.n

    def entry(self, alpha: int, beta: int) -> TrigPoly:
        return self.coeffs[alpha][beta]

    def map_entries(self, fn: Callable[[TrigPoly], TrigPoly]) -> "Form11":
        return Form11(tuple(tuple(fn(c) for c in row) for row in self.coeffs), self.shape)

    def _zip(self, other: "Form11", fn) -> "Form11":
        self.shape.check(other.shape)
        rows = tuple(tuple(fn(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.coeffs, other.coeffs))
        return Form11(rows, self.shape)

    def __add__(self, other: "Form11") -> "Form11":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "Form11") -> "Form11":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "Form11":
        return self.map_entries(lambda c: -c)

    def scale_by(self, value) -> "Form11":
        c = self.shape.field.from_value(value)
        return self.map_entries(lambda p: p.scale_by(c))

    def multiply(self, f: TrigPoly) -> "Form11":
        """f·η"""
        return self.map_entries(lambda c: trig_mul(f, c))

    def equals(self, other: "Form11") -> bool:
        self.shape.check(other.shape)
        return all(a.equals(b) for ra, rb in zip(self.coeffs, other.coeffs) for a, b in zip(ra, rb))

    def is_zero(self) -> bool:
        return all(c.is_zero() for row in self.coeffs for c in row)

    def is_constant(self) -> bool:
        return all(c.is_constant() for row in self.coeffs for c in row)

    def is_real(self) -> bool:
        """η_{βᾱ} = −conj(η_{αβ̄})"""
        n = self.n
        return all(
            self.coeffs[b][a].equals(-self.coeffs[a][b].conj())
            for a in range(n) for b in range(a, n)
        )

    def constant_matrix(self) -> List[List[Any]]:
        """Coeficientes medios (sympy en exacto, complejo en flotante)"""
        zero = [0] * self.shape.dim
        return [[c.coefficient(zero) for c in row] for row in self.coeffs]

    def to_real(self) -> "RealForm":
        """dz^a∧dz̄^b = dx_a∧dx_b − i dx_a∧dy_b + i dy_a∧dx_b + dy_a∧dy_b"""
        F = self.shape.field
        out: Dict[Tuple[int, ...], TrigPoly] = {}
        pieces = ((0, 0, F.gaussian(1)), (0, 1, F.gaussian(0, -1)), (1, 0, F.gaussian(0, 1)), (1, 1, F.gaussian(1)))
        for a in range(self.n):
            for b in range(self.n):
                eta = self.coeffs[a][b]
                if eta.is_zero():
                    continue
                for da, db, c in pieces:
                    p, q = 2 * a + da, 2 * b + db
                    if p == q:
                        continue
                    idx, sign = ((p, q), 1) if p < q else ((q, p), -1)
                    term = eta.scale_by(c if sign > 0 else -c)
                    out[idx] = out[idx] + term if idx in out else term
        return RealForm(2, out, self.shape)

    def evaluate(self, x: Sequence[float]) -> List[List[complex]]:
        return [[c.evaluate(x) for c in row] for row in self.coeffs]

    def to_dict(self) -> dict:
        return {"coeffs": [[c.to_dict() for c in row] for row in self.coeffs]}


def kahler_form(shape: TorusShape) -> Form11:
    """ω con ω_{αβ̄} = (i/2)δ_{αβ}"""
    F = shape.field
    half_i = F.gaussian(0, Fraction(1, 2))
    rows = [[half_i if a == b else F.zero for b in range(shape.n)] for a in range(shape.n)]
    return Form11.from_constants(rows, shape)


def ddc(f: TrigPoly) -> Form11:
    """dd^c e_u = −2π²i w̄^α w^β e_u dz^α∧dz̄^β"""
    shape = f.shape
    F = f.field
    pi2 = F.pi_power(2)
    rows = []
    for a in range(shape.n):
        row = []
        for b in range(shape.n):
            def mult(u, a=a, b=b):
                re = u[2 * a] * u[2 * b] + u[2 * a + 1] * u[2 * b + 1]
                im = u[2 * a] * u[2 * b + 1] - u[2 * a + 1] * u[2 * b]
                return F.gaussian(2 * im, -2 * re) * pi2
            row.append(f.map_modes(mult))
        rows.append(tuple(row))
    return Form11(tuple(rows), shape)


def form_inner(a: Form11, b: Form11) -> TrigPoly:
    """g(a, b) = 4 Σ a_{αβ̄} conj(b_{αβ̄})"""
    a.shape.check(b.shape)
    total = TrigPoly.zero(a.shape)
    for ra, rb in zip(a.coeffs, b.coeffs):
        for x, y in zip(ra, rb):
            if x.is_zero() or y.is_zero():
                continue
            total = total + trig_mul(x, y.conj())
    return total * 4


def harmonic_project(a: Form11) -> Form11:
    """Cada coeficiente se reemplaza por su valor medio"""
    def mean(p: TrigPoly) -> TrigPoly:
        c0 = p.zero_mode()
        return TrigPoly.build({p.zero_key: c0} if not p.field.is_zero(c0) else {}, p.shape, p.scale)
    return a.map_entries(mean)


# ══════════════════════════════════════════════════════════════════════════════
# FORMAS REALES Y CODIFERENCIALES
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class RealForm:
    """Σ_I f_I dx^I con multi-índices crecientes"""
    degree: int
    components: Mapping[Tuple[int, ...], TrigPoly]
    shape: TorusShape

    def __post_init__(self):
        if not 0 <= self.degree <= min(MAX_FORM_DEGREE, self.shape.dim):
            raise UnsupportedDegree(f"Grado {self.degree} no soportado", degree=self.degree)

    @classmethod
    def from_function(cls, f: TrigPoly) -> "RealForm":
        return cls(0, {(): f}, f.shape)

    def as_function(self) -> TrigPoly:
        if self.degree != 0:
            raise UnsupportedDegree(f"Se esperaba una 0-forma (grado {self.degree})")
        return self.components.get((), TrigPoly.zero(self.shape))

    def component(self, index: Tuple[int, ...]) -> TrigPoly:
        return self.components.get(tuple(index), TrigPoly.zero(self.shape))

    def __add__(self, other: "RealForm") -> "RealForm":
        self.shape.check(other.shape)
        if self.degree != other.degree:
            raise DimensionMismatch("Suma de formas de grados distintos")
        out = dict(self.components)
        for idx, c in other.components.items():
            out[idx] = out[idx] + c if idx in out else c
        return RealForm(self.degree, out, self.shape)

    def equals(self, other: "RealForm") -> bool:
        if self.degree != other.degree:
            return False
        keys = set(self.components) | set(other.components)
        return all(self.component(k).equals(other.component(k)) for k in keys)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def evaluate(self, x: Sequence[float]) -> Dict[Tuple[int, ...], complex]:
        return {k: c.evaluate(x) for k, c in sorted(self.components.items())}


def _identity_vector(u: Key) -> Key:
    return u


def _complex_rotation(u: Key) -> Key:
    """(Ju)_{2a} = −u_{2a+1}, (Ju)_{2a+1} = u_{2a}"""
    out = []
    for a in range(len(u) // 2):
        out.extend((-u[2 * a + 1], u[2 * a]))
    return tuple(out)


def _exterior(form: RealForm, direction: Callable[[Key], Key]) -> RealForm:
    """Multiplicación exterior modo a modo por 2πi (v(u)·dx)"""
    shape = form.shape
    if form.degree + 1 > min(MAX_FORM_DEGREE, shape.dim):
        raise UnsupportedDegree(f"d de una {form.degree}-forma no soportado")
    F = shape.field
    pi = F.pi_power(1)
    out: Dict[Tuple[int, ...], TrigPoly] = {}
    for idx, coeff in form.components.items():
        for k in range(shape.dim):
            if k in idx:
                continue
            sign = -1 if sum(1 for j in idx if j < k) % 2 else 1
            target = tuple(sorted(idx + (k,)))
            term = coeff.map_modes(lambda u, k=k, sign=sign: F.gaussian(0, 2 * sign * direction(u)[k]) * pi)
            out[target] = out[target] + term if target in out else term
    return RealForm(form.degree + 1, out, shape)


def _adjoint_exterior(form: RealForm, direction: Callable[[Key], Key]) -> RealForm:
    """Adjunta conjugada de _exterior: contracción por −2πi v(u)"""
    shape = form.shape
    if form.degree == 0:
        raise UnsupportedDegree("Codiferencial de una función no soportado")
    F = shape.field
    pi = F.pi_power(1)
    out: Dict[Tuple[int, ...], TrigPoly] = {}
    for idx, coeff in form.components.items():
        for position, k in enumerate(idx):
            sign = -1 if position % 2 else 1
            target = idx[:position] + idx[position + 1:]
            term = coeff.map_modes(lambda u, k=k, sign=sign: F.gaussian(0, -2 * sign * direction(u)[k]) * pi)
            out[target] = out[target] + term if target in out else term
    return RealForm(form.degree - 1, out, shape)


def exterior_d(form: RealForm) -> RealForm:
    return _exterior(form, _identity_vector)


def exterior_dc(form: RealForm) -> RealForm:
    return _exterior(form, _complex_rotation)


def codifferential(form: RealForm) -> RealForm:
    """δ, adjunta L² de d"""
    return _adjoint_exterior(form, _identity_vector)


def codifferential_c(form: RealForm) -> RealForm:
    """δ^c, adjunta L² de d^c"""
    return _adjoint_exterior(form, _complex_rotation)


def form_l2_inner(a: RealForm, b: RealForm):
    """⟨a, b⟩ = ∫ Σ_I a_I conj(b_I)"""
    a.shape.check(b.shape)
    if a.degree != b.degree:
        raise DimensionMismatch("Producto interno entre grados distintos")
    total = TrigPoly.zero(a.shape)
    for idx, x in a.components.items():
        y = b.components.get(idx)
        if y is not None:
            total = total + trig_mul(x, y.conj())
    return trig_integrate(total)


# ══════════════════════════════════════════════════════════════════════════════
# OPERADOR L Y FORMA CUADRÁTICA Q_α
# ══════════════════════════════════════════════════════════════════════════════

def L_op(f: TrigPoly) -> TrigPoly:
    """L(f) = δ^cδ(f dd^c f)"""
    eta = ddc(f).multiply(f).to_real()
    return codifferential_c(codifferential(eta)).as_function()


def L_rhs(f: TrigPoly, lam) -> TrigPoly:
    """λ²f² − 2λ|∇f|² + |dd^c f|² para una λ-autofunción f"""
    F = f.field
    ell = F.from_value(lam)
    if not laplacian(f).equals(f.scale_by(ell)):
        raise NotAnEigenfunction(f"Δf ≠ λf para λ = {lam}")
    eta = ddc(f)
    f2 = trig_mul(f, f)
    return f2.scale_by(ell * ell) - grad_inner(f, f).scale_by(ell * 2) + form_inner(eta, eta)


def _check_real_inputs(f: TrigPoly, a: Form11) -> None:
    if not f.is_real():
        raise NonRealInput("Q_α requiere una función real")
    if not a.is_real():
        raise NonRealInput("Q_α requiere una forma (1,1) real")


def q_alpha(f: TrigPoly, a: Form11):
    """Q_α(f) = ∫ g(f dd^c f, α) dμ"""
    _check_real_inputs(f, a)
    return trig_integrate_real(form_inner(ddc(f).multiply(f), a))


def q_alpha_polar(f: TrigPoly, g: TrigPoly, a: Form11):
    """Forma bilineal simétrica asociada a Q_α"""
    fg = form_inner(ddc(g).multiply(f), a)
    gf = form_inner(ddc(f).multiply(g), a)
    total = trig_integrate_real(fg) + trig_integrate_real(gf)
    return sp.expand(total / 2) if f.field.exact else total / 2


# ══════════════════════════════════════════════════════════════════════════════
# BASE DE AUTOFUNCIONES E IDENTIDADES
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class EigenfunctionBasis:
    """Pares (φ_w, ψ_w) normalizados por √(2/Vol)"""
    level: EigenLevel
    shape: TorusShape
    pairs: Tuple[Tuple[TrigPoly, TrigPoly], ...]

    @property
    def functions(self) -> List[TrigPoly]:
        return [f for pair in self.pairs for f in pair]

    @property
    def eigenvalue(self):
        return self.level.eigenvalue


def normalization(shape: TorusShape):
    vol = Fraction(shape.volume) if shape.mode.exact else float(shape.volume)
    if shape.mode.exact:
        return sp.sqrt(sp.Rational(2) / sp.Rational(vol.numerator, vol.denominator))
    return math.sqrt(2.0 / vol)


def eigenfunction_basis(level: EigenLevel, shape: TorusShape) -> EigenfunctionBasis:
    """φ_w = c·cos(2π⟨u,x⟩), ψ_w = c·sin(2π⟨u,x⟩)"""
    F = shape.field
    c = normalization(shape)
    half = Fraction(1, 2)
    pairs = []
    for w in level.reps:
        u = F.key(w.coords)
        minus_u = F.key([-x for x in w.coords])
        phi = TrigPoly.build({u: F.gaussian(half), minus_u: F.gaussian(half)}, shape, c)
        psi = TrigPoly.build({u: F.gaussian(0, -half), minus_u: F.gaussian(0, half)}, shape, c)
        pairs.append((phi, psi))
    return EigenfunctionBasis(level, shape, tuple(pairs))


@dataclass
class IdentityReport:
    """Resumen de la batería de identidades sobre un nivel"""
    reps: int = 0
    eigen_relation: int = 0
    grad_phi: int = 0
    grad_psi: int = 0
    ddc_norm: int = 0
    l_sum: int = 0
    operator_samples: int = 0
    operator_agreements: int = 0
    orthonormal: bool = True
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "reps": self.reps,
            "eigen_relation": self.eigen_relation,
            "grad_phi": self.grad_phi,
            "grad_psi": self.grad_psi,
            "ddc_norm": self.ddc_norm,
            "l_sum": self.l_sum,
            "operator_samples": self.operator_samples,
            "operator_agreements": self.operator_agreements,
            "orthonormal": self.orthonormal,
            "passed": self.passed,
            "failures": list(self.failures),
        }


def random_combination(basis: EigenfunctionBasis, rng: random.Random, max_terms: int = 4) -> TrigPoly:
    """Combinación racional aleatoria de funciones de la base"""
    functions = basis.functions
    chosen = rng.sample(range(len(functions)), min(max_terms, len(functions)))
    total = TrigPoly.zero(basis.shape)
    for j in sorted(chosen):
        q = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if q:
            total = total + functions[j] * (q if basis.shape.mode.exact else float(q))
    return total


def check_identities(basis: EigenfunctionBasis, samples: int = 0, seed: int = 0,
                     check_orthonormal: bool = True) -> IdentityReport:
    """
    Verifica por representante: Δφ = λφ, |∇φ|² = λψ², |∇ψ|² = λφ²,
    |dd^cφ|² = λ²φ², L(φ)+L(ψ) = 0; y L = L_rhs en combinaciones aleatorias.
    """
    F = basis.shape.field
    lam = F.from_value(basis.eigenvalue)
    report = IdentityReport()
    for nu, (phi, psi) in enumerate(basis.pairs, start=1):
        report.reps += 1
        if laplacian(phi).equals(phi.scale_by(lam)) and laplacian(psi).equals(psi.scale_by(lam)):
            report.eigen_relation += 1
        else:
            report.failures.append(f"autovalor w_{nu}")
        if grad_inner(phi, phi).equals(trig_mul(psi, psi).scale_by(lam)):
            report.grad_phi += 1
        else:
            report.failures.append(f"|∇φ|² w_{nu}")
        if grad_inner(psi, psi).equals(trig_mul(phi, phi).scale_by(lam)):
            report.grad_psi += 1
        else:
            report.failures.append(f"|∇ψ|² w_{nu}")
        eta = ddc(phi)
        if form_inner(eta, eta).equals(trig_mul(phi, phi).scale_by(lam * lam)):
            report.ddc_norm += 1
        else:
            report.failures.append(f"|dd^cφ|² w_{nu}")
        l_phi, l_psi = L_op(phi), L_op(psi)
        if (l_phi + l_psi).is_zero(reference=max(l_phi.max_abs(), l_psi.max_abs())):
            report.l_sum += 1
        else:
            report.failures.append(f"L(φ)+L(ψ) w_{nu}")

    if check_orthonormal:
        report.orthonormal = _is_orthonormal(basis)
        if not report.orthonormal:
            report.failures.append("ortonormalidad")

    rng = random.Random(seed)
    for s in range(samples):
        f = random_combination(basis, rng)
        report.operator_samples += 1
        if L_op(f).equals(L_rhs(f, basis.eigenvalue)):
            report.operator_agreements += 1
        else:
            report.failures.append(f"L = L_rhs muestra {s}")
    logger.debug("Identidades nivel %d: %s", basis.level.position, report.to_dict())
    return report


def _is_orthonormal(basis: EigenfunctionBasis) -> bool:
    functions = basis.functions
    mode = basis.shape.mode
    for i, j in itertools.combinations_with_replacement(range(len(functions)), 2):
        value = trig_integrate(trig_mul(functions[i], functions[j]))
        expected = 1 if i == j else 0
        if mode.exact:
            if sp.simplify(value - expected) != 0:
                return False
        elif abs(value - expected) > 1e3 * mode.tol:
            return False
    return True
