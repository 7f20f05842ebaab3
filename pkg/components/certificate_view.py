"""
ToroExtremal v1.0 - Vista de Certificados
=========================================
Secciones de texto para los sistemas de factibilidad, identidades y
derivadas laterales.
"""

from typing import Any, Dict, List, Optional

import pandas as pd

STATUS_LABELS = {
    "feasible": "✅ factible",
    "infeasible": "❌ infactible",
    "ambiguous": "⚠️ ambiguo (modo flotante)",
}


def render_system_section(title: str, section: Dict[str, Any]) -> str:
    """Veredicto, certificado y cruce con el oráculo exhaustivo"""
    lines = [f"## {title}"]
    if "skipped" in section:
        lines.append(f"Omitido: {section['skipped']}")
        return "\n".join(lines)

    system = section.get("system", {})
    lines.append(f"Sistema: {system.get('rows')} filas × {system.get('cols')} variables")
    lines.append(f"Veredicto: {STATUS_LABELS.get(section['status'], section['status'])}")
    if section.get("ambiguous_reason"):
        lines.append(f"Motivo: {section['ambiguous_reason']}")
    if section.get("shortcut"):
        lines.append(f"Atajo por multiplicidad: {section['shortcut']}")

    weights = section.get("weights")
    if weights is not None:
        df = pd.DataFrame({"peso": weights}, index=[f"ν={i + 1}" for i in range(len(weights))])
        lines.append(df.to_string())
        lines.append(f"Residuo: {section.get('residual')}")
        if section.get("variable_scale"):
            lines.append(f"Variables escaladas por {section['variable_scale']}")
    farkas = section.get("farkas")
    if farkas is not None:
        lines.append(f"Farkas y = {farkas}")
        lines.append(f"yᵀb = {section.get('margin')} | max(yᵀA) = {section.get('max_violation')}")

    verification = section.get("verification")
    if verification:
        lines.append("Re-verificación: " + ", ".join(f"{k}={v}" for k, v in sorted(verification.items())))
    oracle = section.get("oracle")
    if oracle:
        if oracle.get("checked"):
            lines.append(f"Oráculo exhaustivo: factible={oracle['feasible']} (coincide={oracle['agrees']})")
        else:
            lines.append(f"Oráculo exhaustivo omitido: {oracle.get('reason')}")
    return "\n".join(lines)


def render_identities(identities: Optional[Dict[str, Any]]) -> str:
    if not identities:
        return ""
    rows = [
        {"identidad": "Δf = λf", "representantes": identities["eigen_relation"]},
        {"identidad": "|∇φ|² = λψ²", "representantes": identities["grad_phi"]},
        {"identidad": "|∇ψ|² = λφ²", "representantes": identities["grad_psi"]},
        {"identidad": "|dd^cφ|² = λ²φ²", "representantes": identities["ddc_norm"]},
        {"identidad": "L(φ)+L(ψ) = 0", "representantes": identities["l_sum"]},
    ]
    lines = ["## 🧮 Identidades", pd.DataFrame(rows).to_string(index=False)]
    lines.append(f"Total de representantes: {identities['reps']} | ortonormal: {identities['orthonormal']}")
    lines.append(f"L = L_rhs en {identities['operator_agreements']}/{identities['operator_samples']} combinaciones")
    for failure in identities.get("failures", []):
        lines.append(f"  ✗ {failure}")
    return "\n".join(lines)


def render_derivatives(derivatives: Optional[List[Dict[str, Any]]]) -> str:
    if not derivatives:
        return ""
    df = pd.DataFrame(
        [
            {
                "α": d["alpha"].get("label", ""),
                "d⁻": d["d_left"],
                "d⁺": d["d_right"],
                "min Q": d["qgram_min"],
                "max Q": d["qgram_max"],
                "caso": d["case"],
                "pasa": d["pass"],
            }
            for d in derivatives
        ]
    )
    return "\n".join(["## 📉 Derivadas laterales de λ_k(g_t)", df.to_string(index=False)])
