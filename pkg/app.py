"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                          ToroExtremal v1.0                                    ║
║        Extremalidad de λ_k en toros complejos planos                          ║
╠══════════════════════════════════════════════════════════════════════════════╣
║  • Retículo dual y niveles del espectro con sus vectores más cortos          ║
║  • Sistemas (R) de Kähler y de inmersión minimal con certificados            ║
║  • Batería de identidades de Fourier y derivadas bajo deformación            ║
║  • Catálogo de familias e informes JSON deterministas                        ║
╚══════════════════════════════════════════════════════════════════════════════╝

Uso: python app.py <comando> [--file RUTA | --entry NOMBRE --params k=v ...]
Códigos de salida: 0 completado, 2 entrada inválida, 3 veredicto ambiguo,
4 certificado rechazado.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Tuple

# Core
from core.catalog import (
    get_entry,
    lattice_to_dict,
    list_entries,
    parse_lattice_file,
    parse_params,
)
from core.config import get_settings
from core.deformation import HarmonicDeformation, derivative_check
from core.errors import NumericallyAmbiguous, ParseError, TorusError
from core.extremality import (
    build_immersion_system,
    build_kahler_system,
    solve_feasibility,
    verify_certificate,
    verify_immersion_certificate,
)
from core.fourier_calculus import TorusShape, check_identities, eigenfunction_basis
from core.lattice_spectrum import LatticeBasis, check_dual, dual_basis, enumerate_levels, level_for_index, levels_covering
from core.report import ODD_DIMENSION_NOTE, ReportOptions, emit_report, verify_report_dict
from core.scalars import NumericMode, is_rational_text, parse_rational

# Components
from components import render_levels, render_report
from utils.serialization import dumps

logger = logging.getLogger("toro_extremal")


# ══════════════════════════════════════════════════════════════════════════════
# ENTRADA DEL RETÍCULO
# ══════════════════════════════════════════════════════════════════════════════

def load_lattice(args) -> Tuple[LatticeBasis, Optional[object]]:
    """Base desde --file o --entry, y la expectativa publicada si es del catálogo"""
    expectation = None
    if args.file:
        B = parse_lattice_file(args.file)
    elif args.entry:
        entry = get_entry(args.entry)
        params = parse_params(args.params)
        B = entry.build(params)
        expectation = entry.expectation_for(params)
    else:
        raise ParseError("Indique --file RUTA o --entry NOMBRE")
    if args.mode == "float":
        B = B.with_mode(NumericMode.float_mode())
    elif args.mode == "exact" and not B.mode.exact:
        raise ParseError("--mode exact requiere una base racional", field="mode")
    return B, expectation


def load_alpha(path: str, shape: TorusShape) -> HarmonicDeformation:
    """Archivo JSON {"hermitian": [[[re, im], ...], ...]} con A hermítica"""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ParseError(f"No se puede leer {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno)
    matrix = data.get("hermitian") if isinstance(data, dict) else None
    if not isinstance(matrix, list) or len(matrix) != shape.n:
        raise ParseError(f"'hermitian' debe ser una matriz {shape.n}×{shape.n}", field="hermitian")
    rows = []
    for row in matrix:
        if not isinstance(row, list) or len(row) != shape.n:
            raise ParseError(f"'hermitian' debe ser una matriz {shape.n}×{shape.n}", field="hermitian")
        out = []
        for entry in row:
            pair = entry if isinstance(entry, list) else [entry, 0]
            if len(pair) != 2:
                raise ParseError("Cada entrada es [re, im]", field="hermitian")
            values = []
            for x in pair:
                if isinstance(x, str) and is_rational_text(x):
                    values.append(parse_rational(x))
                elif isinstance(x, (int, float)) and not shape.mode.exact:
                    values.append(float(x))
                elif isinstance(x, int):
                    values.append(x)
                else:
                    raise ParseError(f"Entrada inválida {x!r} para modo {shape.mode.name}", field="hermitian")
            out.append(tuple(values))
        rows.append(out)
    label = data.get("label", path)
    return HarmonicDeformation.from_hermitian(rows, shape, label=str(label))


def _level_k(B: LatticeBasis, k: int):
    return level_for_index(levels_covering(dual_basis(B), k), k)


def _emit(data) -> None:
    sys.stdout.write(dumps(data))


# ══════════════════════════════════════════════════════════════════════════════
# COMANDOS
# ══════════════════════════════════════════════════════════════════════════════

def cmd_dual(args) -> int:
    B, _ = load_lattice(args)
    D = dual_basis(B)
    _emit({"lattice": lattice_to_dict(B), "dual": D.to_dict(), "check_dual": check_dual(D)})
    return 0


def cmd_spectrum(args) -> int:
    B, _ = load_lattice(args)
    levels = enumerate_levels(dual_basis(B), args.levels)
    if args.json:
        _emit({"levels": [lv.to_dict() for lv in levels]})
    else:
        sys.stdout.write(render_levels([lv.to_dict() for lv in levels]) + "\n")
    return 0


def cmd_check_kahler(args) -> int:
    B, _ = load_lattice(args)
    lookup = _level_k(B, args.k)
    if not B.has_complex_structure:
        logger.info("Dimensión real impar: sin sistema de Kähler")
        _emit({"lookup": lookup.to_dict(), "kahler": {"skipped": ODD_DIMENSION_NOTE}})
        return 0
    shape = TorusShape.from_basis(B)
    outcome = solve_feasibility(build_kahler_system(lookup.level, shape.n))
    data = {"lookup": lookup.to_dict(), "kahler": outcome.to_dict()}
    if outcome.feasible:
        basis = eigenfunction_basis(lookup.level, shape)
        data["verification"] = verify_certificate(lookup.level, outcome.weights, basis).to_dict()
    _emit(data)
    return 0


def cmd_check_immersion(args) -> int:
    B, _ = load_lattice(args)
    lookup = _level_k(B, args.k)
    outcome = solve_feasibility(build_immersion_system(lookup.level))
    data = {"lookup": lookup.to_dict(), "immersion": outcome.to_dict()}
    if outcome.feasible:
        shape = TorusShape.from_basis(B) if B.has_complex_structure else None
        data["verification"] = verify_immersion_certificate(lookup.level, outcome, shape)
    _emit(data)
    return 0


def cmd_verify_identities(args) -> int:
    B, _ = load_lattice(args)
    lookup = _level_k(B, args.k)
    basis = eigenfunction_basis(lookup.level, TorusShape.from_basis(B))
    report = check_identities(basis, samples=args.samples, seed=args.seed)
    _emit({"lookup": lookup.to_dict(), "identities": report.to_dict()})
    return 0 if report.passed else 4


def cmd_derivative_check(args) -> int:
    B, _ = load_lattice(args)
    alpha = load_alpha(args.alpha, TorusShape.from_basis(B))
    result = derivative_check(B, alpha, args.k, h=args.step)
    _emit(result.to_dict())
    return 0


def cmd_catalog(args) -> int:
    if not args.name:
        _emit({"entries": list_entries()})
        return 0
    entry = get_entry(args.name)
    params = parse_params(args.params)
    _emit(lattice_to_dict(entry.build(params)))
    return 0


def cmd_report(args) -> int:
    B, expectation = load_lattice(args)
    alpha = load_alpha(args.alpha, TorusShape.from_basis(B)) if args.alpha else None
    options = ReportOptions(
        k=args.k,
        levels=args.levels,
        identities=not args.no_identities,
        identity_samples=args.samples,
        oracle=not args.no_oracle,
        derivative_samples=args.derivatives,
        alpha=alpha,
        seed=args.seed,
        expectation=expectation,
    )
    result = emit_report(B, options)
    if not result["success"]:
        sys.stderr.write(dumps(result["error"]))
        return result["exit_code"]
    if args.json:
        _emit(result["report"])
    else:
        sys.stdout.write(render_report(result["report"]))
    return result["exit_code"]


def cmd_verify_report(args) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ParseError(f"No se puede leer {args.path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno)
    result = verify_report_dict(data)
    _emit(result)
    if result["success"]:
        return 0
    return 4 if result["error"] and result["error"].get("type") == "CertificateRejected" else 2


# ══════════════════════════════════════════════════════════════════════════════
# PARSER
# ══════════════════════════════════════════════════════════════════════════════

def build_parser() -> argparse.ArgumentParser:
    lattice = argparse.ArgumentParser(add_help=False)
    source = lattice.add_mutually_exclusive_group()
    source.add_argument("--file", help="Archivo JSON de retículo")
    source.add_argument("--entry", help="Entrada del catálogo (standard, checkerboard, gamma_ab, gamma_t, product)")
    lattice.add_argument("--params", nargs="*", default=[], metavar="K=V", help="Parámetros de la entrada")
    lattice.add_argument("--mode", choices=["exact", "float"], help="Fuerza el modo numérico")

    parser = argparse.ArgumentParser(
        prog="toro-extremal",
        description="Extremalidad de λ_k en toros complejos planos",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Registro detallado (DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dual", parents=[lattice], help="Base del retículo dual")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("spectrum", parents=[lattice], help="Primeros niveles del espectro")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check-kahler", parents=[lattice], help="Sistema (R) en el nivel de λ_k")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_check_kahler)

    p = sub.add_parser("check-immersion", parents=[lattice], help="Sistema de inmersión minimal")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_check_immersion)

    p = sub.add_parser("verify-identities", parents=[lattice], help="Identidades de las autofunciones")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("derivative-check", parents=[lattice], help="Derivadas laterales bajo deformación")
    p.add_argument("--alpha", required=True, help="Archivo JSON con la matriz hermítica A (α = (i/2)A)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=cmd_derivative_check)

    p = sub.add_parser("catalog", help="Lista el catálogo o imprime el archivo de una entrada")
    p.add_argument("name", nargs="?")
    p.add_argument("--params", nargs="*", default=[], metavar="K=V")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("report", parents=[lattice], help="Informe completo")
    p.add_argument("--json", action="store_true")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--derivatives", type=int, default=0, help="Número de α aleatorias de traza nula")
    p.add_argument("--alpha", help="Archivo JSON con una deformación adicional")
    p.add_argument("--no-identities", action="store_true")
    p.add_argument("--no-oracle", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify-report", help="Re-verifica los certificados de un informe JSON")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        get_settings()
        return args.func(args)
    except NumericallyAmbiguous as e:
        if e.outcome is not None:
            _emit({"ambiguous": True, "outcome": e.outcome.to_dict()})
        sys.stderr.write(f"Veredicto ambiguo: {e.message}\n")
        return e.exit_code
    except TorusError as e:
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
