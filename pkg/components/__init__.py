"""
ToroExtremal v1.0 - Components Package
"""

from .certificate_view import render_derivatives, render_identities, render_system_section
from .report_view import render_discrepancies, render_report
from .spectrum_view import levels_frame, render_dual, render_lattice, render_levels

__all__ = [
    'render_lattice',
    'render_dual',
    'render_levels',
    'levels_frame',
    'render_system_section',
    'render_identities',
    'render_derivatives',
    'render_discrepancies',
    'render_report'
]
