"""
ToroExtremal v1.0 - Jerarquía de Errores
========================================
Todas las excepciones del dominio derivan de TorusError. Cada una conoce
su código de salida para la CLI y sabe serializarse como diccionario.
"""

from typing import Any, Dict, Optional


class TorusError(Exception):
    """Error base del paquete"""
    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": type(self).__name__,
            "message": self.message,
            "details": {k: str(v) for k, v in sorted(self.details.items())},
        }


# ══════════════════════════════════════════════════════════════════════════════
# ERRORES DE ENTRADA (código 2)
# ══════════════════════════════════════════════════════════════════════════════

class InputError(TorusError):
    """Entrada inválida: archivo, parámetros o precondiciones"""
    exit_code = 2


class ParseError(InputError):
    """Archivo de retículo mal formado"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        super().__init__(message, line=line, field=field)
        self.line = line
        self.field = field

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"línea {self.line}")
        if self.field:
            where.append(f"campo '{self.field}'")
        return f"{self.message} ({', '.join(where)})" if where else self.message


class MixedMode(InputError):
    """Entradas racionales y flotantes mezcladas"""


class ModeMismatch(InputError):
    """Operandos en modos numéricos distintos"""


class SingularBasis(InputError):
    """La base no genera un retículo de rango completo"""


class DimensionMismatch(InputError):
    """Operandos con dimensión o volumen incompatibles"""


class UnknownEntry(InputError):
    """Nombre de catálogo desconocido"""


class ParameterOutOfRange(InputError):
    """Parámetro de catálogo fuera del rango documentado"""


class NoComplexStructure(InputError):
    """Dimensión real impar: no hay estructura compleja"""


class ConfigError(InputError):
    """Configuración inválida (variables de entorno)"""


class UnsupportedDegree(InputError):
    """Grado de forma fuera del rango soportado"""


class NonRealInput(InputError):
    """Se esperaba una función o forma real"""


class NotAnEigenfunction(InputError):
    """La función no es autofunción para el λ dado"""


class TraceNotZero(InputError):
    """La deformación no tiene traza nula"""


class NotPositive(InputError):
    """ω + tα deja de ser una forma de Kähler"""


class UnsupportedDeformation(InputError):
    """Deformación no constante usada donde se requiere coeficiente constante"""


class IndexBeyondEnumeration(InputError):
    """El índice k excede los niveles enumerados"""


class IncommensurableScale(InputError):
    """Suma de polinomios con factores de normalización inconmensurables"""


# ══════════════════════════════════════════════════════════════════════════════
# ERRORES DE CÓMPUTO
# ══════════════════════════════════════════════════════════════════════════════

class ComputationError(TorusError):
    """El cálculo excede los límites configurados"""
    exit_code = 2


class EnumerationOverflow(ComputationError):
    """Demasiados candidatos en la enumeración de vectores cortos"""


class TooLarge(ComputationError):
    """Sistema fuera de la escala del oráculo exhaustivo"""


class NumericallyAmbiguous(TorusError):
    """Veredicto en modo flotante demasiado cerca de la frontera"""
    exit_code = 3

    def __init__(self, message: str, outcome: Any = None, **details: Any):
        super().__init__(message, **details)
        self.outcome = outcome


class CertificateRejected(TorusError):
    """Un certificado no superó la re-verificación"""
    exit_code = 4

    def __init__(self, message: str, check: str):
        super().__init__(message, check=check)
        self.check = check
