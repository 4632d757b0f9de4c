"""Config parsing: strict validation and unit conversion at the boundary."""

import math
from pathlib import Path

import pytest

from amptrack.config import build_system, parse_config
from amptrack.exceptions import ConfigError
from amptrack.grid import AtomSystem
from amptrack.lattice import HubbardSystem

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def write_cfg(tmp_path, text) -> Path:
    path = tmp_path / "experiment.cfg"
    path.write_text(text)
    return path


MINIMAL_ATOM = """
[experiment]
platform = atom
k_p = 50

[pulse]
omega0_au = 0.8
e0_au = 0.08
cycles = 2

[reference]
ip_au = 0.579

[driven]
ip_au = 0.5

[numerics]
box_half_width = 60
n_points = 512
dt = 0.05
"""

MINIMAL_HUBBARD = """
[experiment]
platform = hubbard
k_p = 100

[pulse]
omega0_over_t0 = 4.43
e0_over_t0 = 2.61
cycles = 2

[lattice]
sites = 2

[reference]
u_over_t0 = 8

[driven]
u_over_t0 = 1
"""


class TestBundledConfigs:
    def test_atom_default_lab_units(self):
        cfg = parse_config(CONFIG_DIR / "atom_default.cfg")
        assert cfg.platform == "atom"
        assert cfg.feedback.k_p == 1000.0
        # 800 nm and 1e14 W/cm^2 in atomic units
        assert cfg.pulse.omega0 == pytest.approx(0.05695, abs=2e-4)
        assert cfg.pulse.e0 == pytest.approx(0.0534, abs=2e-4)
        assert cfg.pulse.cycles == 10
        assert cfg.atom.reference_ip == 0.579
        assert cfg.atom.driven_ip == 0.5
        assert cfg.atom.numerics.n_points == 4096
        assert cfg.physical["wavelength_nm"] == 800.0

    def test_hubbard_default_lab_units(self):
        cfg = parse_config(CONFIG_DIR / "hubbard_default.cfg")
        assert cfg.platform == "hubbard"
        # 375 THz against t0 = 0.35 eV, 24 MV/cm against a = 3.8 angstrom
        assert cfg.pulse.omega0 == pytest.approx(4.431, abs=2e-3)
        assert cfg.pulse.e0 == pytest.approx(2.606, abs=2e-3)
        assert cfg.hubbard.sites == 10
        assert cfg.hubbard.n_up == 5 and cfg.hubbard.n_down == 5
        assert cfg.hubbard.u_reference == 10.0
        assert cfg.hubbard.u_driven == 1.0
        assert cfg.hubbard.numerics.dt == 0.005

    def test_as_dict_materializes_defaults(self):
        cfg = parse_config(CONFIG_DIR / "hubbard_default.cfg")
        echo = cfg.as_dict()
        assert echo["feedback"]["epsilon"] == 1e-6
        assert echo["feedback"]["output_stride"] == 1
        assert echo["hubbard"]["numerics"]["max_substeps"] == 64
        assert echo["pulse"]["duration"] == cfg.pulse.duration
        assert echo["physical_inputs"]["frequency_thz"] == 375.0


class TestStrictValidation:
    def test_unknown_key_is_named(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL_ATOM + "\nchirp = 3\n")
        with pytest.raises(ConfigError, match="chirp"):
            parse_config(path)

    def test_unknown_section_is_named(self, tmp_path):
        path = write_cfg(tmp_path, MINIMAL_ATOM + "\n[detector]\ngain = 1\n")
        with pytest.raises(ConfigError, match="detector"):
            parse_config(path)

    def test_platform_specific_keys_do_not_leak(self, tmp_path):
        # a lattice section is meaningless for the atom platform
        path = write_cfg(tmp_path, MINIMAL_ATOM + "\n[lattice]\nsites = 4\n")
        with pytest.raises(ConfigError, match="lattice"):
            parse_config(path)

    def test_both_unit_alternatives_rejected(self, tmp_path):
        text = MINIMAL_ATOM.replace(
            "omega0_au = 0.8", "omega0_au = 0.8\nwavelength_nm = 800"
        )
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(write_cfg(tmp_path, text))

    def test_missing_section_rejected(self, tmp_path):
        text = MINIMAL_ATOM.replace("[driven]\nip_au = 0.5\n", "")
        with pytest.raises(ConfigError, match=r"\[driven\]"):
            parse_config(write_cfg(tmp_path, text))

    def test_missing_key_rejected(self, tmp_path):
        text = MINIMAL_HUBBARD.replace("k_p = 100", "")
        with pytest.raises(ConfigError, match="k_p"):
            parse_config(write_cfg(tmp_path, text))

    def test_negative_amplitude_rejected(self, tmp_path):
        text = MINIMAL_ATOM.replace("e0_au = 0.08", "e0_au = -0.08")
        with pytest.raises(ConfigError, match="amplitude"):
            parse_config(write_cfg(tmp_path, text))

    def test_non_numeric_value_rejected(self, tmp_path):
        text = MINIMAL_ATOM.replace("k_p = 50", "k_p = strong")
        with pytest.raises(ConfigError, match="not a number"):
            parse_config(write_cfg(tmp_path, text))

    def test_bad_platform_rejected(self, tmp_path):
        text = MINIMAL_ATOM.replace("platform = atom", "platform = spin")
        with pytest.raises(ConfigError, match="spin"):
            parse_config(write_cfg(tmp_path, text))

    def test_seed_range_checked(self, tmp_path):
        text = MINIMAL_ATOM.replace("k_p = 50", "k_p = 50\nseed = -1")
        with pytest.raises(ConfigError, match="seed"):
            parse_config(write_cfg(tmp_path, text))

    def test_overfilled_sector_rejected(self, tmp_path):
        text = MINIMAL_HUBBARD.replace("sites = 2", "sites = 2\nn_up = 3")
        with pytest.raises(ConfigError, match="filling"):
            parse_config(write_cfg(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config(tmp_path / "nope.cfg")


class TestBuildSystem:
    def test_atom_systems_are_calibrated(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, MINIMAL_ATOM))
        driven = build_system(cfg, "driven")
        assert isinstance(driven, AtomSystem)
        # ip = 0.5 calibrates to the textbook softening sqrt(2)
        assert driven.atom.alpha == pytest.approx(math.sqrt(2), abs=0.02)
        assert driven.dt == 0.05

    def test_hubbard_roles_differ_in_interaction(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, MINIMAL_HUBBARD))
        ref = build_system(cfg, "reference")
        driven = build_system(cfg, "driven")
        assert isinstance(ref, HubbardSystem)
        assert ref.model.u == 8.0 and driven.model.u == 1.0
        assert ref.model.t0 == 1.0 and ref.model.a == 1.0
        assert ref.basis.n_up == 1 and ref.basis.n_down == 1

    def test_role_is_checked(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, MINIMAL_HUBBARD))
        with pytest.raises(ValueError, match="role"):
            build_system(cfg, "witness")
