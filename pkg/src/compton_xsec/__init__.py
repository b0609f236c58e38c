"""Compton ionization of hydrogen and Compton disintegration of positronium.

Non-relativistic A^2 first-Born cross sections (FDCS and DDCS), the
Coulomb-resonance analysis for positronium, figure scan drivers and a
partial-wave oracle for the bound-free matrix element.
"""

from .constants import ALPHA, C_LIGHT, HARTREE_EV, from_au, to_au
from .kinematics import (
    HYDROGEN,
    POSITRONIUM,
    KinematicInput,
    ResolvedKinematics,
    Target,
    TargetKind,
    TMode,
    resolve,
    resonance_energy,
)
from .amplitudes import (
    HydrogenAngle,
    SquaredAmplitude,
    j0_coulomb,
    msq_hydrogen,
    msq_positronium,
    msq_resonance_limit,
)
from .cross_sections import CrossSectionSample, Units, convert_units, fdcs
from .quadrature import IntegrationResult, ddcs_phi1, integrate_2d_adaptive
from .scans import ScanRecord, ScanTable, figure_scan, trace_resonance_line

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "C_LIGHT",
    "HARTREE_EV",
    "HYDROGEN",
    "POSITRONIUM",
    "CrossSectionSample",
    "HydrogenAngle",
    "IntegrationResult",
    "KinematicInput",
    "ResolvedKinematics",
    "ScanRecord",
    "ScanTable",
    "SquaredAmplitude",
    "TMode",
    "Target",
    "TargetKind",
    "Units",
    "convert_units",
    "ddcs_phi1",
    "fdcs",
    "figure_scan",
    "from_au",
    "integrate_2d_adaptive",
    "j0_coulomb",
    "msq_hydrogen",
    "msq_positronium",
    "msq_resonance_limit",
    "resolve",
    "resonance_energy",
    "to_au",
    "trace_resonance_line",
]
