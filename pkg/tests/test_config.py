import textwrap

import pytest

from decobolt.config import ConfigError, load_config, parse_config, parse_quantity
from decobolt.quantities import AMU


def write(tmp_path, text, name="s.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


@pytest.mark.parametrize("value, dim, expected", [
    ("10 um", "length", 1e-5),
    ("0.5 nm", "length", 5e-10),
    ("720 amu", "mass", 720 * AMU),
    ("1 ms", "time", 1e-3),
    ("300 mK", "temperature", 0.3),
    ("2 g/cm^3", "density", 2000.0),
    (7, "rate", 7.0),
    ("1e-5", "dimensionless", 1e-5),
])
def test_parse_quantity(value, dim, expected):
    assert parse_quantity(value, dim, "x") == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("value, dim, match", [
    ("10 K", "length", "not a length unit"),
    ("ten um", "length", "cannot parse"),
    (True, "length", "boolean"),
    ([1], "length", "expected a number"),
])
def test_parse_quantity_errors(value, dim, match):
    with pytest.raises(ConfigError, match=match):
        parse_quantity(value, dim, "body.radius")


def test_channel_defaults(tmp_path):
    cfg = load_config(write(tmp_path, """
        [body]
        radius = "0.5 nm"
        mass_density = 1e4
        internal_temperature = "900 K"

        [[channel]]
        kind = "thermal_emission"

        [[channel]]
        kind = "rayleigh"
        temperature = "300 K"
        radius = "1 nm"
    """))
    emission, rayleigh = cfg.environment
    assert emission.temperature == 900.0 and emission.radius == 5e-10
    assert rayleigh.radius == 1e-9
    assert cfg.experiment.grid is None and cfg.outputs.stride == 1


def test_unknown_keys_are_addressed(tmp_path):
    with pytest.raises(ConfigError, match=r"channel\[1\]: unknown key\(s\) colour"):
        load_config(write(tmp_path, """
            [body]
            radius = 1e-6
            mass_density = 1e4
            [[channel]]
            kind = "rayleigh"
            temperature = 1
            [[channel]]
            kind = "rayleigh"
            temperature = 1
            colour = "red"
        """))
    with pytest.raises(ConfigError, match="top level: unknown key"):
        parse_config({"body": {"radius": 1, "mass_density": 1}, "extra": 1})


def test_missing_and_invalid_fields(tmp_path):
    with pytest.raises(ConfigError, match="body: required section missing"):
        parse_config({})
    with pytest.raises(ConfigError, match="channel\\[0\\].temperature: required"):
        parse_config({"body": {"radius": 1, "mass_density": 1}, "channel": [{"kind": "gas"}]})
    with pytest.raises(ConfigError, match="experiment"):
        parse_config({"body": {"radius": 1, "mass_density": 1},
                      "experiment": {"grid": {"extent": 1e-6, "points": 100, "dt": 1e-6}}})
    with pytest.raises(ConfigError, match="body"):
        parse_config({"body": {"radius": -1, "mass_density": 1}})


def test_custom_spectra_and_relative_paths(tmp_path):
    (tmp_path / "nu.csv").write_text("k,density\n0,0\n1e6,1\n2e6,0\n")
    cfg = load_config(write(tmp_path, """
        [body]
        radius = "1 um"
        mass_density = 1e3

        [[channel]]
        kind = "custom"
        rate = "3 Hz"
        spectrum = "tabulated"
        file = "nu.csv"

        [[channel]]
        kind = "custom"
        rate = "1 kHz"
        spectrum = "planck"
        power = 2
        temperature = "4 K"

        [outputs]
        trajectory = "out/traj.csv"
    """))
    assert [c.spectrum.rate for c in cfg.environment] == [3.0, 1000.0]
    assert cfg.outputs.trajectory == tmp_path / "out" / "traj.csv"


def test_toml_syntax_error(tmp_path):
    with pytest.raises(ConfigError, match="s.toml"):
        load_config(write(tmp_path, "[body\nradius = 1"))
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
