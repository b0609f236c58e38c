"""Physical constants and unit conversions.

Everything is in atomic units (hbar = m_e = |e| = 1) internally. The speed of
light is taken as exactly 137 so that alpha * c == 1 holds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "ALPHA",
    "AU_TO_CM2_PER_EV_SR2",
    "BARN_CM2",
    "C_LIGHT",
    "CONSTANTS",
    "Constants",
    "HARTREE_EV",
    "UnknownUnitError",
    "from_au",
    "to_au",
]


@dataclass(frozen=True)
class Constants:
    c: float = 137.0
    alpha: float = 1.0 / 137.0
    hartree_eV: float = 27.2114
    au_to_cm2_per_eV_sr2: float = 1.03e-18
    barn_cm2: float = 1e-24


CONSTANTS = Constants()

C_LIGHT = CONSTANTS.c
ALPHA = CONSTANTS.alpha
HARTREE_EV = CONSTANTS.hartree_eV
AU_TO_CM2_PER_EV_SR2 = CONSTANTS.au_to_cm2_per_eV_sr2
BARN_CM2 = CONSTANTS.barn_cm2


class UnknownUnitError(ValueError):
    pass


# multiplicative factor: value_in_unit * factor = value_in_au
_TO_AU = {
    # energies
    "au": 1.0,
    "hartree": 1.0,
    "eV": 1.0 / HARTREE_EV,
    "keV": 1000.0 / HARTREE_EV,
    # angles
    "rad": 1.0,
    "deg": 3.141592653589793 / 180.0,
}


def _factor(unit: str) -> float:
    try:
        return _TO_AU[unit]
    except KeyError:
        raise UnknownUnitError(
            f"unknown unit {unit!r}; expected one of {sorted(_TO_AU)}"
        ) from None


def to_au(value, unit: str):
    """Convert ``value`` given in ``unit`` to atomic units (radians for angles)."""
    return value * _factor(unit)


def from_au(value, unit: str):
    """Inverse of :func:`to_au`."""
    return value / _factor(unit)
