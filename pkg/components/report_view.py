"""
ToroExtremal v1.0 - Informe Legible
===================================
Compone el informe de texto a partir del diccionario de build_report.
"""

from typing import Any, Dict

from .certificate_view import render_derivatives, render_identities, render_system_section
from .spectrum_view import render_dual, render_lattice, render_levels


def render_discrepancies(report: Dict[str, Any]) -> str:
    expectation = report.get("expectation")
    notes = report.get("discrepancies") or []
    if not expectation and not notes:
        return ""
    lines = ["## 📌 Comparación con el veredicto publicado"]
    if expectation:
        lines.append(f"Afirmación: «{expectation['claim']}»")
        lines.append(f"Publicado: kahler={expectation['kahler']}, inmersión={expectation['immersion']}")
    for note in notes:
        lines.append(f"  • {note}")
    return "\n".join(lines)


def render_report(report: Dict[str, Any]) -> str:
    """Informe de texto completo"""
    lookup = report["lookup"]
    sections = [
        render_lattice(report["lattice"]),
        render_dual(report["dual"]),
        render_levels(report["levels"]),
        (f"## 🎯 Índice k = {report['k']}: nivel {lookup['level']} "
         f"(índices {lookup['first_index']}..{lookup['last_index']})"),
        render_system_section("⚖️ Sistema (R) de Kähler", report["kahler"]),
        render_system_section("🌐 Sistema de inmersión minimal", report["immersion"]),
        render_identities(report.get("identities")),
        render_derivatives(report.get("derivatives")),
        render_discrepancies(report),
    ]
    return "\n\n".join(s for s in sections if s) + "\n"
