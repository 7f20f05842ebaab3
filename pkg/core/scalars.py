"""
ToroExtremal v1.0 - Escalares y Modo Numérico
=============================================
Modo exacto (racionales) o flotante con tolerancia relativa.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Any, Optional, Union

from core.config import get_settings
from core.errors import ModeMismatch

Scalar = Union[Fraction, float]

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


@dataclass(frozen=True)
class NumericMode:
    """Modo de aritmética: exacto o flotante con tolerancia relativa"""
    exact: bool
    tol: float = 0.0

    @classmethod
    def exact_mode(cls) -> "NumericMode":
        return cls(exact=True, tol=0.0)

    @classmethod
    def float_mode(cls, tol: Optional[float] = None) -> "NumericMode":
        return cls(exact=False, tol=get_settings().float_tolerance if tol is None else tol)

    @property
    def name(self) -> str:
        return "exact" if self.exact else "float"

    def ensure_compatible(self, other: "NumericMode") -> None:
        if self.exact != other.exact:
            raise ModeMismatch(f"Modos incompatibles: {self.name} vs {other.name}")

    def coerce(self, value: Any) -> Scalar:
        """Convierte a Fraction (exacto) o float (flotante)"""
        if self.exact:
            if isinstance(value, str):
                return parse_rational(value)
            if isinstance(value, (Fraction, Rational)):
                return Fraction(value)
            if isinstance(value, float):
                raise ModeMismatch(f"Valor flotante {value!r} en modo exacto")
            return Fraction(value)
        if isinstance(value, str):
            return float(parse_rational(value))
        return float(value)

    def is_zero(self, value: Scalar, scale: float = 1.0) -> bool:
        if self.exact:
            return value == 0
        return abs(value) <= self.tol * max(1.0, scale)

    def eq(self, a: Scalar, b: Scalar) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.tol * max(1.0, abs(a), abs(b))

    def sign(self, value: Scalar) -> int:
        if self.is_zero(value):
            return 0
        return 1 if value > 0 else -1


EXACT = NumericMode.exact_mode()


def is_rational_text(text: str) -> bool:
    return bool(_RATIONAL_RE.match(text))


def parse_rational(text: str) -> Fraction:
    """Lee "p/q" o "p" como Fraction"""
    if not is_rational_text(text):
        raise ValueError(f"No es un racional 'p/q': {text!r}")
    return Fraction(text.replace(" ", ""))


def format_rational(value: Union[Fraction, int]) -> str:
    """Formato canónico: "p" si es entero, "p/q" en otro caso"""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_float(value: Union[Scalar, Real]) -> float:
    return float(value)
