"""
ToroExtremal v1.0 - Catálogo de Retículos y Lectura de Archivos
===============================================================
Registro centralizado de las familias de retículos conocidas y lectura de
archivos JSON de retículo. Todos los comandos obtienen aquí su LatticeBasis.
"""

import io
import json
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TextIO, Tuple, Union

from core import linalg
from core.errors import (
    MixedMode,
    ModeMismatch,
    NumericallyAmbiguous,
    ParameterOutOfRange,
    ParseError,
    UnknownEntry,
)
from core.extremality import build_kahler_system, solve_feasibility
from core.lattice_spectrum import (
    LatticeBasis,
    dual_basis,
    enumerate_levels,
    product_lattice,
    scaled_lattice,
)
from core.scalars import EXACT, NumericMode, is_rational_text, parse_rational

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
# TIPOS DEL CATÁLOGO
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Expectation:
    """Veredicto publicado para una familia, con la afirmación citada"""
    kahler: Optional[bool]
    immersion: Optional[bool]
    claim: str = ""
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kahler": self.kahler,
            "immersion": self.immersion,
            "claim": self.claim,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class Parameter:
    """Parámetro documentado de una entrada"""
    name: str
    kind: str
    default: Any = None
    description: str = ""

    @property
    def required(self) -> bool:
        return self.default is None


@dataclass
class CatalogEntry:
    """Familia de retículos del catálogo"""
    name: str
    parameters: Tuple[Parameter, ...]
    builder: Callable[..., LatticeBasis]
    description: str = ""
    expectation: Optional[Callable[[Dict[str, Any]], Optional[Expectation]]] = None

    def resolve(self, params: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """Valida nombres, aplica valores por defecto y convierte tipos"""
        params = dict(params or {})
        known = {p.name for p in self.parameters} | {"scale"}
        unknown = sorted(set(params) - known)
        if unknown:
            raise ParameterOutOfRange(f"Parámetros desconocidos para '{self.name}': {', '.join(unknown)}",
                                      entry=self.name)
        resolved: Dict[str, Any] = {}
        for p in self.parameters:
            if p.name not in params:
                if p.required:
                    raise ParameterOutOfRange(f"Falta el parámetro '{p.name}' de '{self.name}'", entry=self.name)
                resolved[p.name] = p.default
            else:
                resolved[p.name] = _convert(params[p.name], p)
        resolved["scale"] = _convert(params.get("scale", 1), Parameter("scale", "number"))
        return resolved

    def build(self, params: Optional[Mapping[str, Any]] = None) -> LatticeBasis:
        resolved = self.resolve(params)
        scale = resolved.pop("scale")
        B = self.builder(**resolved)
        if scale != 1:
            if not scale > 0:
                raise ParameterOutOfRange(f"scale debe ser positivo (recibido {scale})", entry=self.name)
            if isinstance(scale, float) and B.mode.exact:
                B = B.with_mode(NumericMode.float_mode())
            B = scaled_lattice(B, scale)
        label = _label(self.name, params)
        return LatticeBasis(B.matrix, B.mode, label)

    def expectation_for(self, params: Optional[Mapping[str, Any]] = None) -> Optional[Expectation]:
        if self.expectation is None:
            return None
        resolved = self.resolve(params)
        resolved.pop("scale")
        return self.expectation(resolved)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": [
                {"name": p.name, "kind": p.kind, "default": None if p.default is None else str(p.default),
                 "description": p.description}
                for p in self.parameters
            ],
        }


def _label(name: str, params: Optional[Mapping[str, Any]]) -> str:
    if not params:
        return name
    inner = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{name}({inner})"


def _convert(value: Any, p: Parameter) -> Any:
    """int, racional exacto, real o cadena de entrada"""
    if p.kind == "entry":
        return str(value)
    if isinstance(value, str):
        text = value.strip()
        if is_rational_text(text):
            value = parse_rational(text)
        else:
            try:
                value = float(text)
            except ValueError:
                raise ParameterOutOfRange(f"'{p.name}' no es numérico: {value!r}")
    if p.kind == "int":
        q = Fraction(value) if not isinstance(value, float) else value
        if isinstance(q, float) or q.denominator != 1:
            raise ParameterOutOfRange(f"'{p.name}' debe ser entero (recibido {value})")
        return int(q)
    if p.kind == "real":
        return float(value)
    if isinstance(value, float):
        return value
    return Fraction(value)


# ══════════════════════════════════════════════════════════════════════════════
# CONSTRUCTORES
# ══════════════════════════════════════════════════════════════════════════════

def _diagonal(values: Sequence[Any], mode: NumericMode) -> LatticeBasis:
    size = len(values)
    zero = mode.coerce(0)
    rows = [[mode.coerce(values[i]) if i == j else zero for j in range(size)] for i in range(size)]
    return LatticeBasis(linalg.freeze(rows), mode)


def _mode_for(*values: Any) -> NumericMode:
    return NumericMode.float_mode() if any(isinstance(v, float) for v in values) else EXACT


def build_standard(n: int) -> LatticeBasis:
    """Z^{2n}"""
    if n < 1:
        raise ParameterOutOfRange(f"standard requiere n ≥ 1 (recibido {n})")
    return _diagonal([1] * (2 * n), EXACT)


def build_checkerboard(m: int) -> LatticeBasis:
    """D_m = {x ∈ Z^m : Σx ∈ 2Z}; base e_j − e_m (j < m) y 2e_m"""
    if m < 3:
        raise ParameterOutOfRange(f"checkerboard requiere m ≥ 3 (recibido {m})")
    cols = []
    for j in range(m - 1):
        col = [0] * m
        col[j] = 1
        col[m - 1] = -1
        cols.append(col)
    last = [0] * m
    last[m - 1] = 2
    cols.append(last)
    return LatticeBasis.from_columns(cols, EXACT)


def build_gamma_ab(a, b) -> LatticeBasis:
    """Base (1,0), (i/a,0), (0,1), (0,i/b); su dual es (1,0), (ai,0), (0,1), (0,bi)"""
    if not (a > 1 and b > 1):
        raise ParameterOutOfRange(f"gamma_ab requiere a > 1 y b > 1 (recibido a={a}, b={b})")
    mode = _mode_for(a, b)
    one = mode.coerce(1)
    return _diagonal([one, one / mode.coerce(a), one, one / mode.coerce(b)], mode)


def _check_t(t: float) -> None:
    if not 0 < t < math.pi / 12:
        raise ParameterOutOfRange(f"gamma_t requiere 0 < t < π/12 (recibido t={t})")


def build_gamma_t(t: float) -> LatticeBasis:
    """
    γ_1 = (1,0), γ_2 = (0, (cos t − i sin t)/cos 2t),
    γ_3 = (i,0), γ_4 = (0, (−sin t + i cos t)/cos 2t). Solo modo flotante.
    """
    t = float(t)
    _check_t(t)
    c, s, c2 = math.cos(t), math.sin(t), math.cos(2 * t)
    cols = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, c / c2, -s / c2],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, -s / c2, c / c2],
    ]
    return LatticeBasis.from_columns(cols, NumericMode.float_mode())


def gamma_t_listed_dual(t: float) -> LatticeBasis:
    """Base publicada del dual: (1,0), (0,1), (i cos t, i sin t), (i sin t, i cos t)"""
    t = float(t)
    _check_t(t)
    c, s = math.cos(t), math.sin(t)
    cols = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, c, 0.0, s],
        [0.0, s, 0.0, c],
    ]
    return LatticeBasis.from_columns(cols, NumericMode.float_mode())


def listed_dual_pairing(t: float) -> dict:
    """Emparejamiento de la base dual publicada contra la base primal"""
    B = build_gamma_t(t)
    D = gamma_t_listed_dual(t)
    P = linalg.matmul(linalg.transpose(D.matrix), B.matrix, B.mode)
    integral = linalg.is_integral(P, B.mode)
    return {"pairing": [[float(x) for x in row] for row in P], "integral": integral}


def build_product(left: str, right: str) -> LatticeBasis:
    """Suma directa de dos entradas dadas como 'nombre:k=v,...'"""
    B1 = lookup_spec(left)
    B2 = lookup_spec(right)
    if B1.mode.exact != B2.mode.exact:
        float_mode = NumericMode.float_mode()
        B1, B2 = B1.with_mode(float_mode), B2.with_mode(float_mode)
    try:
        return product_lattice(B1, B2)
    except ModeMismatch:
        raise ParameterOutOfRange("Factores del producto en modos incompatibles")


# ══════════════════════════════════════════════════════════════════════════════
# VEREDICTOS PUBLICADOS
# ══════════════════════════════════════════════════════════════════════════════

def _standard_expectation(params: Dict[str, Any]) -> Expectation:
    return Expectation(True, True, "El toro estándar C^n/Z^{2n} satisface (R) y admite una inmersión minimal isométrica")


def _checkerboard_expectation(params: Dict[str, Any]) -> Expectation:
    m = params["m"]
    kahler = True if m % 2 == 0 else None
    return Expectation(kahler, True, "R^m/D_m admite una inmersión minimal isométrica en una esfera")


def _gamma_ab_expectation(params: Dict[str, Any]) -> Expectation:
    return Expectation(
        True, False,
        "(R) is equivalent to R_1+R_2 = 1",
        ("Sustituir S(λ_1) = {±(1,0), ±(0,1)} en (R) fuerza R_1 = R_2 = 1; "
         "el veredicto de Kähler no cambia pero la familia de soluciones sí",),
    )


_VERDICT_WORDS = {"feasible": "factible", "infeasible": "infactible", "ambiguous": "numéricamente ambiguo"}


def kahler_reduction(B: LatticeBasis) -> Dict[str, Any]:
    """Forma del sistema de Kähler en λ_1: filas fuera de la diagonal, ecuaciones diagonales y veredicto"""
    level = enumerate_levels(dual_basis(B), 1)[0]
    S = build_kahler_system(level, B.n)
    mode = S.mode
    diagonal, off_diagonal = [], []
    for row, label in zip(S.A, S.row_labels):
        (diagonal if label.startswith("diag[") else off_diagonal).append(row)
    equations = []
    for row in diagonal:
        terms = []
        for a, var in zip(row, S.variables):
            if mode.is_zero(a):
                continue
            terms.append(var if mode.eq(a, 1) else f"{float(a):.6g}·{var}")
        equations.append(" + ".join(terms) + " = 1")
    try:
        status = solve_feasibility(S).status
    except NumericallyAmbiguous:
        status = "ambiguous"
    vanish = all(mode.is_zero(a) for row in off_diagonal for a in row)
    return {"l": level.l, "off_diagonal_vanish": vanish, "equations": equations, "status": status}


def _gamma_t_expectation(params: Dict[str, Any]) -> Expectation:
    reduction = kahler_reduction(build_gamma_t(params["t"]))
    rows = "idénticamente nulas" if reduction["off_diagonal_vanish"] else "no nulas"
    note = (f"Los {reduction['l']} vectores más cortos del dual calculado dejan las filas fuera de la "
            f"diagonal {rows}; las ecuaciones diagonales de (R) son {' y '.join(reduction['equations'])}, "
            f"y el sistema es {_VERDICT_WORDS[reduction['status']]}")
    notes = [note]
    pairing = listed_dual_pairing(params["t"])
    if not pairing["integral"]:
        notes.append("La base dual publicada no empareja enteramente con la base primal; "
                     "el dual se calcula como B^{-T}")
    return Expectation(False, False, "they do not satisfy the first equation in (R)", tuple(notes))


def _product_expectation(params: Dict[str, Any]) -> Optional[Expectation]:
    B1, B2 = lookup_spec(params["left"]), lookup_spec(params["right"])
    r1 = enumerate_levels(dual_basis(B1), 1)[0].eigenvalue_float
    r2 = enumerate_levels(dual_basis(B2), 1)[0].eigenvalue_float
    if not math.isclose(r1, r2, rel_tol=1e-9):
        return Expectation(False, False, "Un producto con λ_1 distintos en los factores no es λ_1-extremal")
    e1 = expectation_for_spec(params["left"])
    e2 = expectation_for_spec(params["right"])
    if e1 is None or e2 is None:
        return None
    both = lambda x, y: None if x is None or y is None else (x and y)
    return Expectation(both(e1.kahler, e2.kahler), both(e1.immersion, e2.immersion),
                       "El producto de factores extremales con el mismo λ_1 es extremal")


# ══════════════════════════════════════════════════════════════════════════════
# REGISTRO
# ══════════════════════════════════════════════════════════════════════════════

CATALOG: Dict[str, CatalogEntry] = {
    "standard": CatalogEntry(
        "standard", (Parameter("n", "int", 1, "dimensión compleja"),), build_standard,
        "Retículo estándar Z^{2n}", _standard_expectation,
    ),
    "checkerboard": CatalogEntry(
        "checkerboard", (Parameter("m", "int", 4, "dimensión real, m ≥ 3"),), build_checkerboard,
        "Retículo tablero de ajedrez D_m (estructura compleja solo con m par)", _checkerboard_expectation,
    ),
    "gamma_ab": CatalogEntry(
        "gamma_ab",
        (Parameter("a", "number", None, "a > 1"), Parameter("b", "number", None, "b > 1")),
        build_gamma_ab, "Familia Γ_{a,b}: extremal en Kähler, sin inmersión minimal", _gamma_ab_expectation,
    ),
    "gamma_t": CatalogEntry(
        "gamma_t", (Parameter("t", "real", None, "0 < t < π/12"),), build_gamma_t,
        "Familia Γ_t (solo flotante)", _gamma_t_expectation,
    ),
    "product": CatalogEntry(
        "product",
        (Parameter("left", "entry", None, "entrada 'nombre:k=v,...'"),
         Parameter("right", "entry", None, "entrada 'nombre:k=v,...'")),
        build_product, "Suma directa de dos entradas", _product_expectation,
    ),
}


def list_entries() -> List[dict]:
    return [CATALOG[name].to_dict() for name in sorted(CATALOG)]


def get_entry(name: str) -> CatalogEntry:
    if name not in CATALOG:
        raise UnknownEntry(f"Entrada de catálogo desconocida: '{name}'",
                           available=", ".join(sorted(CATALOG)))
    return CATALOG[name]


def catalog_lookup(name: str, params: Optional[Mapping[str, Any]] = None) -> LatticeBasis:
    """Construye la base de una entrada del catálogo"""
    B = get_entry(name).build(params)
    logger.debug("Catálogo: %s (dim=%d, modo=%s)", B.label, B.dim, B.mode.name)
    return B


def parse_entry_spec(spec: str) -> Tuple[str, Dict[str, str]]:
    """'standard:n=1,scale=2' → ('standard', {'n': '1', 'scale': '2'})"""
    name, _, rest = spec.strip().partition(":")
    return name.strip(), parse_params(p for p in rest.split(",") if p.strip())


def parse_params(tokens) -> Dict[str, str]:
    """Pares 'clave=valor'; el valor puede contener '=', ':' y ','"""
    out: Dict[str, str] = {}
    for token in tokens or ():
        key, sep, value = token.partition("=")
        if not sep or not key.strip():
            raise ParameterOutOfRange(f"Parámetro mal formado: {token!r} (se espera clave=valor)")
        out[key.strip()] = value.strip()
    return out


def lookup_spec(spec: str) -> LatticeBasis:
    name, params = parse_entry_spec(spec)
    return catalog_lookup(name, params)


def expectation_for_spec(spec: str) -> Optional[Expectation]:
    name, params = parse_entry_spec(spec)
    return get_entry(name).expectation_for(params)


# ══════════════════════════════════════════════════════════════════════════════
# ARCHIVOS DE RETÍCULO
# ══════════════════════════════════════════════════════════════════════════════

def _line_of(text: str, key: str) -> Optional[int]:
    match = re.search(rf'"{re.escape(key)}"\s*:', text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _classify(entries: List[Any], text: str, field_name: str) -> NumericMode:
    """Exacto si todas las entradas son cadenas racionales; flotante si todas son números"""
    line = _line_of(text, field_name)
    strings = [e for e in entries if isinstance(e, str)]
    numbers = [e for e in entries if isinstance(e, (int, float)) and not isinstance(e, bool)]
    if len(strings) + len(numbers) != len(entries):
        raise ParseError("Entrada no numérica en la base", line=line, field=field_name)
    if strings and numbers:
        raise MixedMode("Entradas racionales y flotantes mezcladas en la base", line=line, field=field_name)
    for s in strings:
        if not is_rational_text(s):
            raise ParseError(f"Entrada no racional {s!r} (se espera 'p/q')", line=line, field=field_name)
    return EXACT if strings else NumericMode.float_mode()


def _real_rows(data: dict, text: str) -> Tuple[List[List[Any]], str]:
    if "basis" in data and "complex_basis" in data:
        raise ParseError("Use 'basis' o 'complex_basis', no ambos", line=_line_of(text, "complex_basis"),
                         field="complex_basis")
    if "basis" in data:
        rows = data["basis"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError("'basis' debe ser una lista de filas", line=_line_of(text, "basis"), field="basis")
        return rows, "basis"
    if "complex_basis" in data:
        vectors = data["complex_basis"]
        line = _line_of(text, "complex_basis")
        if not isinstance(vectors, list):
            raise ParseError("'complex_basis' debe ser una lista", line=line, field="complex_basis")
        cols = []
        for vec in vectors:
            if not isinstance(vec, list) or not all(isinstance(p, list) and len(p) == 2 for p in vec):
                raise ParseError("Cada vector complejo es una lista de pares [re, im]",
                                 line=line, field="complex_basis")
            cols.append([x for pair in vec for x in pair])
        rows = [list(r) for r in zip(*cols)] if cols else []
        return rows, "complex_basis"
    raise ParseError("Falta 'basis' o 'complex_basis'", field="basis")


def parse_lattice_text(text: str) -> LatticeBasis:
    """Base desde el texto JSON de un archivo de retículo"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise ParseError("El archivo debe contener un objeto JSON", line=1)

    rows, field_name = _real_rows(data, text)
    size = len(rows)
    n = data.get("n")
    if n is not None:
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError("'n' debe ser un entero positivo", line=_line_of(text, "n"), field="n")
        expected = 2 * n
    else:
        dim = data.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise ParseError("Falta 'n' (o 'dim' para toros reales)", line=_line_of(text, "n"), field="n")
        expected = dim
    if size != expected or any(len(r) != expected for r in rows):
        raise ParseError(f"La base debe ser {expected}×{expected}", line=_line_of(text, field_name),
                         field=field_name)

    entries = [x for row in rows for x in row]
    mode = _classify(entries, text, field_name)
    declared = data.get("mode")
    if declared is not None and declared not in ("exact", "float"):
        raise ParseError(f"Modo desconocido {declared!r}", line=_line_of(text, "mode"), field="mode")
    if declared is not None and declared != mode.name:
        raise MixedMode(f"Modo declarado '{declared}' pero las entradas son '{mode.name}'",
                        line=_line_of(text, "mode"), field="mode")

    matrix = linalg.freeze([[mode.coerce(x) for x in row] for row in rows])
    B = LatticeBasis(matrix, mode, data.get("label"))
    B.check_nonsingular()
    logger.debug("Archivo de retículo leído: dim=%d, modo=%s", B.dim, mode.name)
    return B


def parse_lattice_file(source: Union[str, Path, TextIO]) -> LatticeBasis:
    """Lee un archivo de retículo desde una ruta o un flujo de texto"""
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return parse_lattice_text(source.read())
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"No se puede leer {path}: {e.strerror}")
    B = parse_lattice_text(text)
    return B if B.label else LatticeBasis(B.matrix, B.mode, path.stem)


def lattice_to_dict(B: LatticeBasis) -> dict:
    """Formato de archivo de retículo, con etiqueta si existe"""
    data = B.to_dict()
    if data["n"] is None:
        data.pop("n")
    if B.label:
        data["label"] = B.label
    return data
