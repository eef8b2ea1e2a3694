import json

import numpy as np
import pytest

from signsat import config, records
from signsat.errors import ConfigError


GOOD = """\
# uniform example
[run]
seed = 42

[design]
kind = uniform_example
beta = 1.0, 0.5
link = periodic_gdot(a=3)

[simulate]
n = 250

[idscan]
b_grid = 1,0.7; 2,1
"""


def test_parse_good():
    cfg = config.parse_config(GOOD, "good.ini")
    assert cfg["run"]["seed"] == 42
    assert cfg["design"]["beta"] == (1.0, 0.5)
    assert cfg["design"]["link"] == "periodic_gdot(a=3.0)"
    assert cfg["simulate"]["n"] == 250
    assert cfg["idscan"]["b_grid"] == ((1.0, 0.7), (2.0, 1.0))
    assert cfg["sstest"]["b_reps"] == 199
    design = config.build_design(cfg)
    assert design.link.a == 3.0


def test_float_round_trip():
    x = 0.1 + 0.2
    cfg = config.parse_config(f"[sstest]\nalpha = {x!r}\n")
    assert cfg["sstest"]["alpha"] == x


@pytest.mark.parametrize("text,line", [
    ("[run]\nseed = x\n", 2),
    ("[run]\nseed = 1\n[nope]\n", 3),
    ("[run]\n\nbogus = 1\n", 3),
    ("seed = 1\n", 1),
    ("[design]\nkind = square\n", 2),
    ("[design]\nlink = cauchy\n", 2),
    ("[geom]\nwindow = 1, 2\n", 2),
    ("[run]\nseed = 1\nseed = 2\n", 3),
])
def test_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as exc:
        config.parse_config(text, "bad.ini")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"bad.ini:{line}:")


def test_build_design_errors():
    cfg = config.parse_config("[design]\nkind = chamberlain\nbeta = 1\n", "c.ini")
    with pytest.raises(ConfigError) as exc:
        config.build_design(cfg)
    assert exc.value.line == 3
    cfg = config.parse_config("[design]\nfixed_effect = location_shift\n")
    with pytest.raises(ConfigError):
        config.build_design(cfg)


def test_override_and_echo():
    cfg = config.defaults()
    cfg.override("simulate", "n", "17")
    assert cfg["simulate"]["n"] == 17
    with pytest.raises(ConfigError):
        cfg.override("simulate", "n", "many")
    echo = cfg.echo(("run", "simulate"))
    assert set(echo) == {"run", "simulate"}


def test_missing_file():
    with pytest.raises(ConfigError):
        config.load_config("/nonexistent/run.ini")


def test_records_rendering():
    text = records.dumps({"a": 0.1, "b": [1, 2.5], "c": True, "d": None, "e": np.float64(1 / 3)})
    data = json.loads(text)
    assert data["a"] == 0.1 and data["e"] == 1 / 3
    assert "0.10000000000000001" in text
    assert records.fmt_real(float("nan")) == '"nan"'


def test_manifest(tmp_path):
    target = records.write_manifest(tmp_path / "x.csv", "simulate", {"run": {"seed": 1}}, ["x.csv"])
    data = json.loads(open(target).read())
    assert data["command"] == "simulate" and data["outputs"] == ["x.csv"]
    assert "time" not in open(target).read()
