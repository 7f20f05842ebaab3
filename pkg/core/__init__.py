"""
ToroExtremal v1.0 - Core Package
"""

from .errors import TorusError, InputError, NumericallyAmbiguous, CertificateRejected
from .config import Settings, get_settings, set_settings
from .lattice_spectrum import LatticeBasis, EigenLevel, dual_basis, enumerate_levels, level_for_index
from .extremality import build_kahler_system, build_immersion_system, solve_feasibility, verify_certificate
from .catalog import catalog_lookup, get_entry, list_entries, parse_lattice_file
from .report import ReportOptions, build_report, emit_report, verify_report_dict

__all__ = [
    'TorusError',
    'InputError',
    'NumericallyAmbiguous',
    'CertificateRejected',
    'Settings',
    'get_settings',
    'set_settings',
    'LatticeBasis',
    'EigenLevel',
    'dual_basis',
    'enumerate_levels',
    'level_for_index',
    'build_kahler_system',
    'build_immersion_system',
    'solve_feasibility',
    'verify_certificate',
    'catalog_lookup',
    'get_entry',
    'list_entries',
    'parse_lattice_file',
    'ReportOptions',
    'build_report',
    'emit_report',
    'verify_report_dict',
]
