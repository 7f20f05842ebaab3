"""
ToroExtremal v1.0 - Motor de Informes
=====================================
Orquesta el análisis completo de un retículo: niveles, sistemas de Kähler
e inmersión con certificados, oráculo exhaustivo, identidades y derivadas.
Las funciones públicas devuelven diccionarios {"success", "error", ...}.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from core.catalog import Expectation, lattice_to_dict, parse_lattice_text
from core.deformation import HarmonicDeformation, derivative_check, indefiniteness_check, sample_trace_zero_alphas
from core.errors import CertificateRejected, NumericallyAmbiguous, TooLarge, TorusError
from core.extremality import (
    FeasibilityOutcome,
    build_immersion_system,
    build_kahler_system,
    brute_force_oracle,
    check_farkas,
    check_weights,
    immersion_implies_kahler,
    multiplicity_shortcut,
    solve_feasibility,
    verify_certificate,
    verify_immersion_certificate,
    WeightCertificate,
    weight_residual,
)
from core.fourier_calculus import TorusShape, check_identities, eigenfunction_basis
from core.lattice_spectrum import LatticeBasis, dual_basis, enumerate_levels, level_for_index, levels_covering
from core.scalars import NumericMode

logger = logging.getLogger(__name__)

ODD_DIMENSION_NOTE = "no Kähler check (odd dimension)"


@dataclass
class ReportOptions:
    """Opciones del informe"""
    k: int = 1
    levels: int = 3
    identities: bool = True
    identity_samples: int = 5
    oracle: bool = True
    derivative_samples: int = 0
    alpha: Optional[HarmonicDeformation] = None
    seed: int = 0
    expectation: Optional[Expectation] = None


# ══════════════════════════════════════════════════════════════════════════════
# SECCIONES
# ══════════════════════════════════════════════════════════════════════════════

def _solve(S) -> Dict[str, Any]:
    """Resuelve y serializa; un veredicto ambiguo se conserva con su estado"""
    try:
        outcome = solve_feasibility(S)
    except NumericallyAmbiguous as e:
        data = e.outcome.to_dict() if e.outcome is not None else {"status": "ambiguous"}
        data["ambiguous_reason"] = e.message
        return {"outcome": None, "data": data}
    return {"outcome": outcome, "data": outcome.to_dict()}


def _oracle(S, outcome_data: dict) -> Dict[str, Any]:
    try:
        feasible = brute_force_oracle(S)
    except TooLarge as e:
        return {"checked": False, "reason": e.message}
    status = outcome_data.get("status")
    agrees = None if status == "ambiguous" else (feasible == (status == "feasible"))
    if agrees is False:
        logger.warning("El oráculo exhaustivo discrepa del simplex (%s)", S.kind)
    return {"checked": True, "feasible": feasible, "agrees": agrees}


def kahler_section(level, shape: TorusShape, options: ReportOptions) -> Dict[str, Any]:
    S = build_kahler_system(level, shape.n)
    solved = _solve(S)
    section = dict(solved["data"])
    shortcut = multiplicity_shortcut(level, shape.n)
    section["shortcut"] = shortcut.value if shortcut is not None else None
    outcome: Optional[FeasibilityOutcome] = solved["outcome"]
    if outcome is not None and outcome.feasible:
        basis = eigenfunction_basis(level, shape)
        section["verification"] = verify_certificate(level, outcome.weights, basis).to_dict()
        if options.alpha is not None or options.derivative_samples:
            section["indefiniteness"] = indefiniteness_section(level, shape, outcome, options)
    if options.oracle:
        section["oracle"] = _oracle(S, section)
    return section


def immersion_section(level, shape: Optional[TorusShape], options: ReportOptions) -> Dict[str, Any]:
    S = build_immersion_system(level)
    solved = _solve(S)
    section = dict(solved["data"])
    outcome: Optional[FeasibilityOutcome] = solved["outcome"]
    if outcome is not None and outcome.feasible:
        section["verification"] = verify_immersion_certificate(level, outcome, shape)
        if shape is not None:
            implied = immersion_implies_kahler(level, outcome)
            section["implied_kahler"] = implied.to_dict(level.mode) if implied is not None else None
    if options.oracle:
        section["oracle"] = _oracle(S, section)
    return section


def identity_section(level, shape: TorusShape, options: ReportOptions) -> Dict[str, Any]:
    basis = eigenfunction_basis(level, shape)
    return check_identities(basis, samples=options.identity_samples, seed=options.seed).to_dict()


def _alphas(shape: TorusShape, options: ReportOptions) -> List[HarmonicDeformation]:
    alphas: List[HarmonicDeformation] = []
    if options.alpha is not None:
        alphas.append(options.alpha)
    if options.derivative_samples:
        alphas.extend(sample_trace_zero_alphas(shape, options.derivative_samples, options.seed))
    return alphas


def derivative_section(B: LatticeBasis, shape: TorusShape, options: ReportOptions) -> List[dict]:
    return [derivative_check(B, d, options.k).to_dict() for d in _alphas(shape, options)]


def indefiniteness_section(level, shape: TorusShape, outcome: FeasibilityOutcome,
                           options: ReportOptions) -> Dict[str, Any]:
    """Gram de Q_α indefinida y traza ponderada por los pesos de Kähler nula"""
    basis = eigenfunction_basis(level, shape)
    return indefiniteness_check(basis, _alphas(shape, options), outcome.weights.weights)


def _verdict(section: Optional[dict]) -> Optional[str]:
    if section is None or "status" not in section:
        return None
    return section["status"]


def discrepancy_notes(verdicts: Dict[str, Optional[str]], expectation: Optional[Expectation]) -> List[str]:
    """Compara el veredicto calculado con el publicado"""
    if expectation is None:
        return []
    notes = list(expectation.notes)
    for kind in ("kahler", "immersion"):
        claimed = getattr(expectation, kind)
        computed = verdicts.get(kind)
        if claimed is None or computed not in ("feasible", "infeasible"):
            continue
        if claimed != (computed == "feasible"):
            note = (f"Veredicto {kind} calculado: {computed}; publicado: "
                    f"{'factible' if claimed else 'infactible'} («{expectation.claim}»)")
            logger.warning(note)
            notes.append(note)
    return notes


# ══════════════════════════════════════════════════════════════════════════════
# INFORME COMPLETO
# ══════════════════════════════════════════════════════════════════════════════

def build_report(B: LatticeBasis, options: Optional[ReportOptions] = None) -> Dict[str, Any]:
    """Informe completo; lanza las excepciones del dominio"""
    options = options or ReportOptions()
    dual = dual_basis(B)
    levels = levels_covering(dual, options.k)
    if len(levels) < options.levels:
        levels = enumerate_levels(dual, options.levels)
    lookup = level_for_index(levels, options.k)
    level = lookup.level

    report: Dict[str, Any] = {
        "lattice": lattice_to_dict(B),
        "dual": dual.to_dict(),
        "k": options.k,
        "lookup": lookup.to_dict(),
        "levels": [lv.to_dict() for lv in levels],
    }

    shape = TorusShape.from_basis(B) if B.has_complex_structure else None
    if shape is None:
        report["kahler"] = {"skipped": ODD_DIMENSION_NOTE}
    else:
        report["kahler"] = kahler_section(level, shape, options)
    report["immersion"] = immersion_section(level, shape, options)

    if shape is not None and options.identities:
        report["identities"] = identity_section(level, shape, options)
    if shape is not None and (options.alpha is not None or options.derivative_samples):
        report["derivatives"] = derivative_section(B, shape, options)

    verdicts = {"kahler": _verdict(report["kahler"]), "immersion": _verdict(report["immersion"])}
    report["verdicts"] = verdicts
    report["expectation"] = options.expectation.to_dict() if options.expectation else None
    report["discrepancies"] = discrepancy_notes(verdicts, options.expectation)
    return report


def emit_report(B: LatticeBasis, options: Optional[ReportOptions] = None) -> Dict[str, Any]:
    """
    Ejecuta build_report y devuelve {"success", "error", "ambiguous", "report"}.
    Un error de certificado o de entrada se devuelve en "error" con su código.
    """
    try:
        report = build_report(B, options)
    except TorusError as e:
        logger.debug("Informe fallido: %s", e.message)
        return {"success": False, "error": e.to_dict(), "exit_code": e.exit_code,
                "ambiguous": False, "report": None}
    ambiguous = "ambiguous" in report["verdicts"].values()
    return {"success": True, "error": None, "exit_code": 3 if ambiguous else 0,
            "ambiguous": ambiguous, "report": report}


# ══════════════════════════════════════════════════════════════════════════════
# RE-VERIFICACIÓN DE UN INFORME SERIALIZADO
# ══════════════════════════════════════════════════════════════════════════════

def _scalars(values: List[Any], mode: NumericMode) -> tuple:
    return tuple(mode.coerce(v) for v in values)


def _recheck(S, section: dict) -> bool:
    mode = S.mode
    status = section.get("status")
    if status == "feasible":
        return check_weights(S, _scalars(section["weights"], mode))
    if status == "infeasible":
        return check_farkas(S, _scalars(section["farkas"], mode))
    return True


def verify_report_dict(data: Dict[str, Any]) -> Dict[str, Any]:
    """Reconstruye los sistemas desde el retículo del informe y re-verifica cada certificado"""
    checks: Dict[str, Any] = {}
    try:
        B = parse_lattice_text(json.dumps(data["lattice"]))
        levels = levels_covering(dual_basis(B), data["k"])
        level = level_for_index(levels, data["k"]).level

        kahler = data.get("kahler") or {}
        if "status" in kahler:
            shape = TorusShape.from_basis(B)
            S = build_kahler_system(level, shape.n)
            checks["kahler"] = _recheck(S, kahler)
            if kahler["status"] == "feasible":
                weights = _scalars(kahler["weights"], B.mode)
                cert = WeightCertificate(weights, weight_residual(S, weights))
                checks["kahler_geometry"] = verify_certificate(level, cert, eigenfunction_basis(level, shape)).passed

        immersion = data.get("immersion") or {}
        if "status" in immersion:
            checks["immersion"] = _recheck(build_immersion_system(level), immersion)
    except CertificateRejected as e:
        checks[e.check] = False
        return {"success": False, "error": e.to_dict(), "checks": checks}
    except TorusError as e:
        return {"success": False, "error": e.to_dict(), "checks": checks}
    except (KeyError, TypeError, ValueError) as e:
        return {"success": False, "error": {"type": type(e).__name__, "message": str(e), "details": {}},
                "checks": checks}

    ok = all(checks.values())
    return {"success": ok, "error": None if ok else {"type": "CertificateRejected",
                                                      "message": "Certificado no re-verificado", "details": {}},
            "checks": checks}
