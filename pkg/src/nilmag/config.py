"""Line-oriented scenario configuration files.

Grammar (one statement per line, ``#`` starts a comment)::

    [section]
    key = value

Sections and keys:

    [system]     name = <id>; field_strength = <number>; seed = <int>
    [algebra]    dim = <int> (optional); labels = <l1> <l2> ...;
                 bracket = <a> <b> <c> <p/q>      (repeatable: [a,b] has p/q along c)
    [metric]     matrix = identity | row = <p/q> ...  (one row line per basis vector)
    [sigma]      entry = <a> <b> <p/q>            (repeatable: s(a,b) = p/q)
    [lattice]    row = <p/q> ...                  (one line per basis vector)
    [integrate]  step, t_end, sample_stride
    [chaos]      step, t_end, renorm_interval, transient_fraction
    [sweep]      t_end, step

Rationals are integers or ``p/q`` strings.  Unknown sections or keys,
repeated single-valued keys and duplicate bracket/entry triples are parse
errors reported with line and column.
"""

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, ValidationError
from .liealg import InnerProduct, LatticeBasis, LieAlgebra, TwoForm, nilpotency_step, validate
from .magext import MagneticSystem

_SECTIONS = {
    "system": {"name", "field_strength", "seed"},
    "algebra": {"dim", "labels", "bracket"},
    "metric": {"matrix", "row"},
    "sigma": {"entry"},
    "lattice": {"row"},
    "integrate": {"step", "t_end", "sample_stride"},
    "chaos": {"step", "t_end", "renorm_interval", "transient_fraction"},
    "sweep": {"step", "t_end"},
}
_REPEATABLE = {("algebra", "bracket"), ("metric", "row"), ("sigma", "entry"), ("lattice", "row")}
_RUN_SECTIONS = ("integrate", "chaos", "sweep")


@dataclass
class ScenarioConfig:
    name: str = None
    field_strength: float = 1.0
    seed: int = None
    labels: tuple = None
    brackets: list = field(default_factory=list)
    metric_rows: list = None  # None means identity
    sigma_entries: list = field(default_factory=list)
    lattice_rows: list = None
    runs: dict = field(default_factory=dict)
    text: str = ""

    @property
    def hash(self):
        return config_hash(self.text)


def _rational(token, line, column):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {token!r}", line, column) from None


def _number(token, line, column, kind=float):
    try:
        return kind(token)
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, got {token!r}", line, column) from None


def _tokens(value, start_col):
    """Split on whitespace, keeping 1-based column numbers."""
    out, col = [], start_col
    for part in value.split():
        idx = value.index(part, col - start_col)
        out.append((part, start_col + idx))
        col = start_col + idx + len(part)
    return out


def parse_config(text, source="<config>"):
    cfg = ScenarioConfig(text=text)
    section = None
    seen_single = set()
    seen_brackets = set()
    seen_entries = set()
    metric_identity = None
    dim = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, indent + 1)
            section = stripped[1:-1].strip()
            if section not in _SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno, indent + 2)
            continue
        if section is None:
            raise ParseError("statement outside any section", lineno, indent + 1)
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, indent + 1)
        key, value = stripped.split("=", 1)
        key = key.strip()
        value_col = indent + len(stripped.split("=", 1)[0]) + 2
        value_col += len(value) - len(value.lstrip())
        value = value.strip()
        if key not in _SECTIONS[section]:
            raise ParseError(f"unknown key {key!r} in [{section}]", lineno, indent + 1)
        if (section, key) not in _REPEATABLE:
            if (section, key) in seen_single:
                raise ParseError(f"key {key!r} repeated in [{section}]", lineno, indent + 1)
            seen_single.add((section, key))
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, value_col)
        toks = _tokens(value, value_col)

        if section == "system":
            if key == "name":
                cfg.name = value
            elif key == "field_strength":
                cfg.field_strength = float(_rational(value, lineno, value_col))
            else:
                cfg.seed = _number(value, lineno, value_col, int)
        elif section == "algebra":
            if key == "dim":
                dim = _number(value, lineno, value_col, int)
            elif key == "labels":
                cfg.labels = tuple(t for t, _ in toks)
            else:
                if cfg.labels is None:
                    raise ParseError("'labels' must precede brackets", lineno, indent + 1)
                if len(toks) != 4:
                    raise ParseError("bracket needs: label_i label_j label_k coefficient", lineno, value_col)
                for t, col in toks[:3]:
                    if t not in cfg.labels:
                        raise ParseError(f"unknown basis label {t!r}", lineno, col)
                a, b, c = (t for t, _ in toks[:3])
                if a == b:
                    raise ParseError(f"[{a},{a}] vanishes; remove the entry", lineno, value_col)
                pair = tuple(sorted((cfg.labels.index(a), cfg.labels.index(b))))
                triple = pair + (cfg.labels.index(c),)
                if triple in seen_brackets:
                    raise ParseError(f"duplicate bracket entry for ({a}, {b}, {c})", lineno, value_col)
                seen_brackets.add(triple)
                cfg.brackets.append((a, b, c, _rational(toks[3][0], lineno, toks[3][1])))
        elif section == "metric":
            if key == "matrix":
                if value != "identity":
                    raise ParseError("matrix takes the value 'identity'; give other metrics as rows",
                                     lineno, value_col)
                metric_identity = lineno
            else:
                if cfg.metric_rows is None:
                    cfg.metric_rows = []
                cfg.metric_rows.append([_rational(t, lineno, col) for t, col in toks])
        elif section == "sigma":
            if cfg.labels is None:
                raise ParseError("[algebra] labels must precede [sigma]", lineno, indent + 1)
            if len(toks) != 3:
                raise ParseError("entry needs: label_i label_j value", lineno, value_col)
            for t, col in toks[:2]:
                if t not in cfg.labels:
                    raise ParseError(f"unknown basis label {t!r}", lineno, col)
            a, b = toks[0][0], toks[1][0]
            if a == b:
                raise ParseError("diagonal 2-form entries vanish", lineno, value_col)
            pair = frozenset((a, b))
            if pair in seen_entries:
                raise ParseError(f"duplicate sigma entry for ({a}, {b})", lineno, value_col)
            seen_entries.add(pair)
            cfg.sigma_entries.append((a, b, _rational(toks[2][0], lineno, toks[2][1])))
        elif section == "lattice":
            if cfg.lattice_rows is None:
                cfg.lattice_rows = []
            cfg.lattice_rows.append([_rational(t, lineno, col) for t, col in toks])
        else:
            kind = int if key == "sample_stride" else float
            cfg.runs.setdefault(section, {})[key] = _number(value, lineno, value_col, kind)

    if cfg.labels is None:
        raise ParseError("missing [algebra] labels")
    if dim is not None and dim != len(cfg.labels):
        raise ParseError(f"dim = {dim} but {len(cfg.labels)} labels given")
    if metric_identity is not None and cfg.metric_rows is not None:
        raise ParseError("metric given both as identity and as rows", metric_identity, 1)
    return cfg


def build_system(cfg):
    """Turn a parsed config into a validated MagneticSystem."""
    n = len(cfg.labels)
    algebra = LieAlgebra.from_brackets(cfg.labels, cfg.brackets)
    report = validate(algebra)
    if not report.passed:
        raise ValidationError(f"Jacobi identity fails on {report.triple} (residual {report.residual})")
    if nilpotency_step(algebra) is None:
        raise ValidationError("scenario algebras must be nilpotent")
    metric = InnerProduct.identity(n) if cfg.metric_rows is None else InnerProduct(cfg.metric_rows)
    sigma = TwoForm.from_entries(cfg.labels, cfg.sigma_entries)
    lattice = None if cfg.lattice_rows is None else LatticeBasis(cfg.lattice_rows)
    return MagneticSystem(algebra, metric, sigma, lattice, cfg.field_strength)


def load_config_text(text, source="<config>"):
    cfg = parse_config(text, source)
    return cfg, build_system(cfg)


def _fmt(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_float(x):
    return format(float(x), ".17g")


def emit_config(system, name=None, seed=None, runs=None):
    """Canonical config text for a system; parsing it back yields an equal system."""
    L = system.algebra
    lines = ["[system]"]
    if name:
        lines.append(f"name = {name}")
    lines.append(f"field_strength = {_fmt_float(system.field_strength)}")
    if seed is not None:
        lines.append(f"seed = {int(seed)}")
    lines += ["", "[algebra]", f"dim = {L.dim}", "labels = " + " ".join(L.labels)]
    for i, j, k, c in L.entries():
        lines.append(f"bracket = {L.labels[i]} {L.labels[j]} {L.labels[k]} {_fmt(c)}")
    lines += ["", "[metric]"]
    g = system.metric.matrix
    if all(g[i][j] == (1 if i == j else 0) for i in range(L.dim) for j in range(L.dim)):
        lines.append("matrix = identity")
    else:
        lines += ["row = " + " ".join(_fmt(x) for x in row) for row in g]
    entries = system.sigma.entries()
    if entries:
        lines += ["", "[sigma]"]
        lines += [f"entry = {L.labels[i]} {L.labels[j]} {_fmt(v)}" for i, j, v in entries]
    if system.lattice is not None:
        lines += ["", "[lattice]"]
        lines += ["row = " + " ".join(_fmt(x) for x in v) for v in system.lattice.vectors]
    for section in _RUN_SECTIONS:
        params = (runs or {}).get(section)
        if params:
            lines += ["", f"[{section}]"]
            lines += [f"{k} = {v}" for k, v in sorted(params.items())]
    return "\n".join(lines) + "\n"


def canonical_text(text):
    """Comment-free, whitespace-normalised text used for hashing."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and not line.startswith("["):
            k, v = line.split("=", 1)
            line = f"{k.strip()} = {' '.join(v.split())}"
        out.append(line)
    return "\n".join(out) + "\n"


def config_hash(text):
    return hashlib.sha256(canonical_text(text).encode("utf-8")).hexdigest()
