"""
ToroExtremal v1.0 - Configuración
=================================
Parámetros globales del análisis. TORUS_EXTREMAL_TOL sobrescribe la
tolerancia del modo flotante.
"""

import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from core.errors import ConfigError

TOLERANCE_ENV = "TORUS_EXTREMAL_TOL"


@dataclass(frozen=True)
class Settings:
    """Configuración inmutable del paquete"""
    float_tolerance: float = 1e-9
    ambiguity_margin: float = 1e-6
    enumeration_cap: int = 10**6
    fd_step: float = 1e-4
    oracle_max_cols: int = 14
    oracle_max_rows: int = 12

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if environ is None else environ
        raw = env.get(TOLERANCE_ENV)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            tol = float(raw)
        except ValueError:
            raise ConfigError(f"{TOLERANCE_ENV} no es un número: {raw!r}")
        if not tol > 0:
            raise ConfigError(f"{TOLERANCE_ENV} debe ser positivo: {raw!r}")
        return replace(cls(), float_tolerance=tol)

    def to_dict(self) -> dict:
        return {
            "float_tolerance": self.float_tolerance,
            "ambiguity_margin": self.ambiguity_margin,
            "enumeration_cap": self.enumeration_cap,
            "fd_step": self.fd_step,
        }


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """
    Obtiene la configuración global.
    Se lee del entorno la primera vez y luego se reutiliza.
    """
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def set_settings(settings: Optional[Settings]) -> None:
    """Reemplaza la configuración global (None fuerza relectura del entorno)"""
    global _settings
    _settings = settings
