"""Physical-unit conversions used at the configuration boundary.

All propagation code runs in atomic units (atom platform) or in hopping
units t0 = hbar = a = 1 (lattice platform).  Laboratory units appear only
when a config file is parsed, through the helpers below.
"""

import math

# 1 hartree in eV
HARTREE_EV = 27.2114

# 1 atomic unit of field in MV/cm
FIELD_AU_MV_CM = 5.142e3

# 1 bohr in angstrom
BOHR_ANGSTROM = 0.5292

# Planck constant in eV*s (photon energy per unit ordinary frequency)
PLANCK_EV_S = 4.135667696e-15

# atomic unit of time in seconds, hbar / hartree
ATOMIC_TIME_S = PLANCK_EV_S / (2.0 * math.pi * HARTREE_EV)

# vacuum speed of light in m/s
SPEED_OF_LIGHT_M_S = 2.99792458e8

# 1 atomic unit of intensity (E^2 in a.u.) in W/cm^2
INTENSITY_AU_W_CM2 = 3.50945e16


def ev_to_au(energy_ev: float) -> float:
    return energy_ev / HARTREE_EV


def au_to_ev(energy_au: float) -> float:
    return energy_au * HARTREE_EV


def mv_cm_to_au(field_mv_cm: float) -> float:
    return field_mv_cm / FIELD_AU_MV_CM


def angstrom_to_au(length_angstrom: float) -> float:
    return length_angstrom / BOHR_ANGSTROM


def thz_to_ev(frequency_thz: float) -> float:
    """Photon energy in eV for an ordinary (not angular) frequency in THz."""
    return PLANCK_EV_S * frequency_thz * 1e12


def thz_to_au_angular(frequency_thz: float) -> float:
    """Angular frequency in rad per atomic time unit."""
    return 2.0 * math.pi * frequency_thz * 1e12 * ATOMIC_TIME_S


def intensity_to_au_field(intensity_w_cm2: float) -> float:
    """Peak field amplitude in a.u. for a given intensity in W/cm^2."""
    return math.sqrt(intensity_w_cm2 / INTENSITY_AU_W_CM2)


def wavelength_nm_to_au_angular(wavelength_nm: float) -> float:
    """Angular frequency in a.u. for a vacuum wavelength in nm."""
    photon_ev = PLANCK_EV_S * SPEED_OF_LIGHT_M_S / (wavelength_nm * 1e-9)
    return ev_to_au(photon_ev)
