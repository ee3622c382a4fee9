"""Built-in scenarios, written in the config grammar so they double as examples."""

import os

from .config import build_system, emit_config, parse_config
from .errors import ValidationError
from .magext import extend, extended_lattice, rationality_k

HEISENBERG = """\
[system]
name = heisenberg
field_strength = 1

[algebra]
dim = 3
labels = X Y Z
bracket = X Y Z 1

[metric]
matrix = identity

[sigma]
entry = X Y 1
"""

# 3-step once extended: the field pairs the centre direction Z with V
PAPER5D = """\
[system]
name = paper5d
field_strength = 1

[algebra]
dim = 5
labels = U V X Y Z
bracket = X Y Z 1
bracket = Y V U 1

[metric]
matrix = identity

[sigma]
entry = X U 1
entry = Z V 1

[lattice]
row = 1/2 0 0 0 0
row = 0 1 0 0 0
row = 0 0 1 0 0
row = 0 0 0 1 0
row = 0 0 0 0 1/2
"""

# same algebra, but a field that vanishes on the derived algebra
PAPER5D_XY = """\
[system]
name = paper5d-xy
field_strength = 1

[algebra]
dim = 5
labels = U V X Y Z
bracket = X Y Z 1
bracket = Y V U 1

[metric]
matrix = identity

[sigma]
entry = X Y 1
"""

ABELIAN2 = """\
[system]
name = abelian2
field_strength = 1

[algebra]
dim = 2
labels = X Y

[metric]
matrix = identity

[sigma]
entry = X Y 1
"""

_TEXT = {
    "heisenberg": HEISENBERG,
    "paper5d": PAPER5D,
    "paper5d-xy": PAPER5D_XY,
    "abelian2": ABELIAN2,
}
BUILTIN_NAMES = ("heisenberg", "paper5d", "paper5d-xy", "t4ext", "abelian2")


def t4ext_text():
    base = build_system(parse_config(PAPER5D))
    ext = extend(base)
    lattice = extended_lattice(base, rationality_k(base))
    return emit_config(ext.as_system(lattice), name="t4ext")


def scenario_text(name_or_path):
    """Config text of a built-in scenario or of a config file."""
    if name_or_path == "t4ext":
        return t4ext_text()
    if name_or_path in _TEXT:
        return _TEXT[name_or_path]
    if os.path.isfile(name_or_path):
        with open(name_or_path, encoding="utf-8") as fh:
            return fh.read()
    raise ValidationError(f"unknown scenario {name_or_path!r}; built-ins are {', '.join(BUILTIN_NAMES)}")


def load_scenario_config(name_or_path):
    """(ScenarioConfig, MagneticSystem) for a built-in name or a config path."""
    cfg = parse_config(scenario_text(name_or_path), source=name_or_path)
    return cfg, build_system(cfg)


def load_scenario(name_or_path):
    return load_scenario_config(name_or_path)[1]
