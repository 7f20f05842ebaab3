"""
ToroExtremal v1.0 - Vista de Retículo y Espectro
================================================
Secciones de texto para la base, el dual y los niveles del espectro.
"""

from typing import Any, Dict, List

import pandas as pd


def _matrix_table(rows: List[List[Any]]) -> str:
    df = pd.DataFrame(rows, columns=[f"γ_{j + 1}" for j in range(len(rows[0]))] if rows else [])
    df.index = [f"x^{i + 1}" for i in range(len(rows))]
    return df.to_string()


def render_lattice(lattice: Dict[str, Any]) -> str:
    """Base primal"""
    lines = ["## 🔷 Retículo"]
    label = lattice.get("label")
    if label:
        lines.append(f"Entrada: {label}")
    lines.append(f"Dimensión real: {lattice['dim']} | Modo: {lattice['mode']}")
    lines.append(_matrix_table(lattice["basis"]))
    return "\n".join(lines)


def render_dual(dual: Dict[str, Any]) -> str:
    return "\n".join(["## 🔶 Retículo dual (D = B^{-T})", _matrix_table(dual["basis"])])


def levels_frame(levels: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "nivel": lv["position"],
                "|w|²": lv["squared_norm"],
                "λ": lv["lambda"],
                "l": lv["l"],
                "multiplicidad": lv["multiplicity"],
            }
            for lv in levels
        ]
    )


def render_levels(levels: List[Dict[str, Any]], show_reps: bool = True) -> str:
    """Tabla de niveles y, opcionalmente, los representantes de cada uno"""
    lines = ["## 📈 Espectro del Laplaciano", levels_frame(levels).to_string(index=False)]
    if show_reps:
        for lv in levels:
            lines.append(f"\nNivel {lv['position']}: {lv['l']} representantes (uno por par ±w)")
            reps = pd.DataFrame(lv["reps"], columns=[f"u^{i + 1}" for i in range(len(lv["reps"][0]))])
            reps.index = [f"w_{nu + 1}" for nu in range(len(lv["reps"]))]
            lines.append(reps.to_string())
    return "\n".join(lines)
