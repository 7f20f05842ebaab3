"""
ToroExtremal v1.0 - Serialización JSON Canónica
===============================================
Claves ordenadas, racionales como "p/q" y sin marcas de tiempo: la misma
entrada produce siempre los mismos bytes.
"""

import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any

import numpy as np
import sympy as sp

from core.scalars import format_rational


def to_jsonable(value: Any) -> Any:
    """Convierte recursivamente a tipos JSON"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, np.ndarray):
        return [to_jsonable(x) for x in value.tolist()]
    if isinstance(value, sp.Basic):
        return sp.sstr(value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if is_dataclass(value):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(x) for x in value]
    return str(value)


def dumps(value: Any) -> str:
    """JSON canónico con salto de línea final"""
    return json.dumps(to_jsonable(value), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)
