"""Hardware calculators linking beam and channel parameters to squeezing strengths.

Public signatures carry their units in the argument names (keV, nA, m, nm,
angstrom); everything is converted to SI internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError, GeometryError

__all__ = [
    "FINE_STRUCTURE",
    "ELECTRON_REST_KEV",
    "COULOMB_EV_NM",
    "HBAR_EV_S",
    "SPEED_OF_LIGHT",
    "ELEMENTARY_CHARGE",
    "EPSILON_0",
    "BeamParams",
    "ChannelGeometry",
    "CavityParams",
    "kev_to_joule",
    "joule_to_kev",
    "nm_to_m",
    "m_to_nm",
    "beta_from_energy",
    "electron_speed",
    "mutual_capacitance",
    "chi_int_cylindrical",
    "chi_int_general",
    "capacitor_energy",
    "capacitor_voltage",
    "pair_coulomb_phase",
    "mean_electron_spacing",
    "cavity_amplitude",
    "chi_from_coupling",
    "inelastic_loss_share",
    "batch_size",
    "design_summary",
]

FINE_STRUCTURE = 7.2973525693e-3
ELECTRON_REST_KEV = 510.99895
COULOMB_EV_NM = 1.43996  # e^2 / (4 pi eps0)
HBAR_EV_S = 6.582119569e-16
SPEED_OF_LIGHT = 2.99792458e8
ELEMENTARY_CHARGE = 1.602176634e-19
HBAR_J_S = HBAR_EV_S * ELEMENTARY_CHARGE
# fixed by alpha, e, hbar and c so the capacitance and alpha/beta routes agree exactly
EPSILON_0 = ELEMENTARY_CHARGE**2 / (4 * math.pi * FINE_STRUCTURE * HBAR_J_S * SPEED_OF_LIGHT)


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and positive, got {value!r}")


def _non_negative(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class BeamParams:
    kinetic_energy_kev: float
    current_na: float

    def __post_init__(self):
        _positive("kinetic energy", self.kinetic_energy_kev)
        _positive("current", self.current_na)

    @property
    def beta(self) -> float:
        return beta_from_energy(self.kinetic_energy_kev)

    @property
    def spacing_m(self) -> float:
        return mean_electron_spacing(self.current_na, self.kinetic_energy_kev)


@dataclass(frozen=True)
class ChannelGeometry:
    """Two parallel cylindrical channels of ``length_m``, ``separation_m`` apart."""

    length_m: float
    separation_m: float
    radius_m: float

    def __post_init__(self):
        _positive("length", self.length_m)
        _positive("radius", self.radius_m)
        if not self.separation_m > 2 * self.radius_m:
            raise GeometryError("channels overlap: need separation > 2 * radius")

    @property
    def capacitance(self) -> float:
        return mutual_capacitance(self)


@dataclass(frozen=True)
class CavityParams:
    coupling: complex

    @property
    def chi_meas(self) -> float:
        return chi_from_coupling(self.coupling)


def kev_to_joule(kev: float) -> float:
    return kev * 1e3 * ELEMENTARY_CHARGE


def joule_to_kev(joule: float) -> float:
    return joule / ELEMENTARY_CHARGE / 1e3


def nm_to_m(nm: float) -> float:
    return nm * 1e-9


def m_to_nm(m: float) -> float:
    return m * 1e9


def beta_from_energy(energy_kev: float) -> float:
    """``v/c`` of an electron with kinetic energy ``energy_kev``."""
    _non_negative("kinetic energy", energy_kev)
    gamma = 1.0 + energy_kev / ELECTRON_REST_KEV
    # 1 - 1/gamma^2 written to avoid cancellation at low energy
    return math.sqrt((gamma - 1.0) * (gamma + 1.0)) / gamma


def electron_speed(energy_kev: float) -> float:
    """Electron speed in m/s."""
    return beta_from_energy(energy_kev) * SPEED_OF_LIGHT


def mutual_capacitance(geom: ChannelGeometry) -> float:
    """``C = l eps0 pi / arccosh(d / 2r)`` in farads."""
    ratio = geom.separation_m / (2 * geom.radius_m)
    if not ratio > 1:
        raise GeometryError("channels overlap: need separation > 2 * radius")
    return geom.length_m * EPSILON_0 * math.pi / math.acosh(ratio)


def chi_int_cylindrical(d_over_r: float, energy_kev: float) -> float:
    """Twisting strength ``4 (alpha/beta) arccosh(d / 2r)`` of two cylindrical channels."""
    if not (math.isfinite(d_over_r) and d_over_r > 2):
        raise GeometryError(f"d/r must exceed 2, got {d_over_r!r}")
    _positive("kinetic energy", energy_kev)
    return 4.0 * FINE_STRUCTURE / beta_from_energy(energy_kev) * math.acosh(d_over_r / 2)


def chi_int_general(length_m: float, energy_kev: float, capacitance_f: float) -> float:
    """Twisting strength ``e^2 l / (v hbar C)`` for a channel of capacitance ``C``."""
    _positive("length", length_m)
    _positive("kinetic energy", energy_kev)
    _positive("capacitance", capacitance_f)
    return ELEMENTARY_CHARGE**2 * length_m / (electron_speed(energy_kev) * HBAR_J_S * capacitance_f)


def capacitor_energy(n_r: int, n_l: int, capacitance_f: float) -> float:
    """Electrostatic energy ``e^2 (n_R - n_L)^2 / (8C)`` in eV."""
    _positive("capacitance", capacitance_f)
    diff = n_r - n_l
    return ELEMENTARY_CHARGE * diff * diff / (8 * capacitance_f)


def capacitor_voltage(n_r: int, n_l: int, capacitance_f: float) -> float:
    """Potential difference ``e (n_R - n_L) / (2C)`` in volts."""
    _positive("capacitance", capacitance_f)
    return ELEMENTARY_CHARGE * (n_r - n_l) / (2 * capacitance_f)


def pair_coulomb_phase(separation_m: float, path_m: float, energy_kev: float) -> float:
    """Phase accumulated by two electrons ``separation_m`` apart over ``path_m``.

    Static Coulomb energy times transit time over hbar; retardation is ignored.
    """
    _positive("separation", separation_m)
    _non_negative("path length", path_m)
    _positive("kinetic energy", energy_kev)
    energy_ev = COULOMB_EV_NM / m_to_nm(separation_m)
    return energy_ev * (path_m / electron_speed(energy_kev)) / HBAR_EV_S


def mean_electron_spacing(current_na: float, energy_kev: float) -> float:
    """Mean distance between consecutive electrons of a beam, in meters."""
    _positive("current", current_na)
    _positive("kinetic energy", energy_kev)
    rate = current_na * 1e-9 / ELEMENTARY_CHARGE
    return electron_speed(energy_kev) / rate


def cavity_amplitude(n_r: int, chi_meas: float) -> float:
    """Coherent amplitude ``n_R sqrt(chi_meas / 2)`` imprinted on the probe cavity."""
    _non_negative("chi_meas", chi_meas)
    if n_r < 0:
        raise DomainError(f"n_R must be >= 0, got {n_r!r}")
    return n_r * math.sqrt(chi_meas / 2)


def chi_from_coupling(g_q: complex) -> float:
    """Measurement strength ``2 |g_Q|^2``."""
    return 2.0 * abs(g_q) ** 2


def inelastic_loss_share(thickness_nm: float, mean_free_path_nm: float) -> float:
    """Fraction of electrons scattered inelastically, ``1 - exp(-t/lambda)``."""
    _non_negative("thickness", thickness_nm)
    _positive("mean free path", mean_free_path_nm)
    return -math.expm1(-thickness_nm / mean_free_path_nm)


def batch_size(dose_per_a2: float, pixel_angstrom: float) -> int:
    """Electrons per pixel for a dose budget, rounded to an integer."""
    _positive("dose", dose_per_a2)
    _positive("pixel size", pixel_angstrom)
    return int(round(dose_per_a2 * pixel_angstrom**2))


def design_summary(
    energy_kev: float = 100.0,
    d_over_r: float = 10.0,
    current_na: float = 1.0,
    dose_per_a2: float = 20.0,
    pixel_angstrom: float = 1.0,
    length_m: float = 1.0,
    radius_m: float = 1e-6,
) -> dict:
    """All derived hardware quantities for one operating point."""
    geom = ChannelGeometry(length_m, d_over_r * radius_m, radius_m)
    cap = mutual_capacitance(geom)
    spacing = mean_electron_spacing(current_na, energy_kev)
    n = batch_size(dose_per_a2, pixel_angstrom)
    return {
        "energy_kev": energy_kev,
        "beta": beta_from_energy(energy_kev),
        "d_over_r": d_over_r,
        "chi_int": chi_int_cylindrical(d_over_r, energy_kev),
        "length_m": length_m,
        "radius_m": radius_m,
        "capacitance_f": cap,
        "chi_int_from_capacitance": chi_int_general(length_m, energy_kev, cap),
        "current_na": current_na,
        "electron_spacing_m": spacing,
        "pair_phase_rad_per_m": pair_coulomb_phase(spacing, 1.0, energy_kev),
        "dose_per_a2": dose_per_a2,
        "pixel_angstrom": pixel_angstrom,
        "batch_size": n,
        "capacitor_voltage_one_electron_v": capacitor_voltage(1, 0, cap),
    }
