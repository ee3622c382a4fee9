"""Euler flows on the dual of a Lie algebra.

For the quadratic Hamiltonian ``h(lam) = 1/2 <lam, lam>`` the Euler field is
``lam_dot(Y) = lam([dh, Y])`` with ``dh = G^{-1} lam``.  A magnetic term
``c * s(dh, Y)`` gives the restriction of the centrally extended system to the
level ``p_W = c``.

Coordinates are ``p_i = lam(e_i)`` in the algebra's basis order.  Dynamics run
in 64-bit floats; the ``*_exact`` variants accept Fractions and are used for
pointwise conservation checks.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _kernels, exact
from .errors import DimensionError, DivergenceError, ValidationError
from .liealg import InnerProduct, LieAlgebra, TwoForm, is_cocycle

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class FieldSpec:
    algebra: LieAlgebra
    metric: InnerProduct
    sigma: TwoForm = None
    c: float = 0.0

    def __post_init__(self):
        n = self.algebra.dim
        if self.metric.dim != n:
            raise DimensionError("metric dimension does not match the algebra")
        if self.sigma is not None:
            if self.sigma.dim != n:
                raise DimensionError("2-form dimension does not match the algebra")
            if not is_cocycle(self.algebra, self.sigma).closed:
                raise ValidationError("magnetic 2-form is not closed")

    @classmethod
    def geodesic(cls, system):
        return cls(system.algebra, system.metric)

    @classmethod
    def magnetic(cls, system, c=None):
        c = system.field_strength if c is None else c
        return cls(system.algebra, system.metric, system.sigma, float(c))

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def is_magnetic(self):
        return self.sigma is not None

    @cached_property
    def arrays(self):
        """Sparse float triplets consumed by the compiled kernels."""
        entries = self.algebra.entries()
        bi = np.array([e[0] for e in entries], dtype=np.int64)
        bj = np.array([e[1] for e in entries], dtype=np.int64)
        bk = np.array([e[2] for e in entries], dtype=np.int64)
        bc = np.array([float(e[3]) for e in entries], dtype=np.float64)
        gi, gj, gv = _triplets(np.array(self.metric.inverse(), dtype=float))
        if self.sigma is None:
            mag = np.zeros((self.dim, self.dim))
        else:
            mag = self.c * np.array(self.sigma.matrix, dtype=float)
        mi, mj, mv = _triplets(mag)
        return bi, bj, bk, bc, gi, gj, gv, mi, mj, mv

    @cached_property
    def is_zero_field(self):
        arrays = self.arrays
        return arrays[3].size == 0 and arrays[9].size == 0


def _triplets(m):
    i, j = np.nonzero(m)
    return i.astype(np.int64), j.astype(np.int64), m[i, j].astype(np.float64)


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = DEFAULT_STEP
    t_end: float = 10.0
    sample_stride: int = 1

    def __post_init__(self):
        if not (self.step > 0 and self.t_end > 0):
            raise ValidationError("step and t_end must be positive")
        if self.step > self.t_end:
            raise ValidationError("step must not exceed t_end")
        if int(self.sample_stride) < 1:
            raise ValidationError("sample_stride must be a positive integer")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.step))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    drifts: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def final(self):
        return self.states[-1]


def _state(spec, lam):
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (spec.dim,):
        raise DimensionError(f"expected a state with {spec.dim} coordinates, got shape {lam.shape}")
    return lam


def sharp(metric, lam):
    """Metric inverse applied to a covector (works on stacked states too)."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != metric.dim:
        raise DimensionError("covector and metric dimensions differ")
    ginv = np.array(metric.inverse(), dtype=float)
    return lam @ ginv.T


def hamiltonian(metric, lam):
    """1/2 lam^T G^{-1} lam; broadcasts over leading axes."""
    lam = np.asarray(lam, dtype=float)
    return 0.5 * np.einsum("...i,...i->...", lam, sharp(metric, lam))


def euler_field(spec, lam):
    """Velocity of the geodesic Euler flow; any magnetic part of ``spec`` is ignored."""
    lam = _state(spec, lam)
    arrays = spec.arrays[:7] + _triplets(np.zeros((spec.dim, spec.dim)))
    out, dh = np.empty_like(lam), np.empty_like(lam)
    _kernels.field(*arrays, lam, dh, out)
    return out


def magnetic_euler_field(spec, lam):
    lam = _state(spec, lam)
    out, dh = np.empty_like(lam), np.empty_like(lam)
    _kernels.field(*spec.arrays, lam, dh, out)
    return out


def velocity(spec, lam):
    """Full field of the spec: magnetic when a 2-form is present."""
    return magnetic_euler_field(spec, lam) if spec.is_magnetic else euler_field(spec, lam)


def field_jacobian(spec, lam):
    """Analytic Jacobian ``J[b, m] = d lam_dot_b / d lam_m`` of the spec's full field."""
    lam = _state(spec, lam)
    n = spec.dim
    arrays = spec.arrays
    dh = sharp(spec.metric, lam)
    J = np.empty((n, n))
    e, ddh, out = np.zeros(n), np.empty(n), np.empty(n)
    for m in range(n):
        e[:] = 0.0
        e[m] = 1.0
        _kernels.tangent(*arrays, lam, dh, e, ddh, out)
        J[:, m] = out
    return J


def euler_field_exact(spec, lam):
    """Exact version of the full field at a rational covector."""
    lam = exact.vec(lam)
    L = spec.algebra
    if len(lam) != L.dim:
        raise DimensionError("state dimension mismatch")
    dh = exact.matvec(spec.metric.inverse(), lam)
    out = []
    for y in range(L.dim):
        v = sum((dh[a] * exact.dot(lam, L.basis_bracket(a, y)) for a in range(L.dim) if dh[a]), Fraction(0))
        if spec.sigma is not None and spec.c:
            c = exact.to_fraction(spec.c)
            v += c * sum((dh[a] * spec.sigma.matrix[a][y] for a in range(L.dim)), Fraction(0))
        out.append(v)
    return tuple(out)


def hamiltonian_exact(metric, lam):
    lam = exact.vec(lam)
    return exact.dot(lam, exact.matvec(metric.inverse(), lam)) / 2


def default_observables(spec):
    """Hamiltonian always; p_W when the basis ends with W (a central extension)."""
    metric = spec.metric
    obs = {"hamiltonian": lambda s: hamiltonian(metric, s)}
    if spec.algebra.labels[-1] == "W":
        obs["p_W"] = lambda s: np.asarray(s)[..., -1]
    return obs


def relative_drift(values):
    values = np.asarray(values, dtype=float)
    ref = values[0]
    return float(np.max(np.abs(values - ref)) / max(1.0, abs(ref)))


def integrate(spec, lam0, cfg, observables=None):
    """Fixed-step classical RK4 of the spec's field with drift bookkeeping.

    ``observables`` maps names to functions of a state array (last axis =
    coordinates); they are evaluated on the sampled states and must broadcast.
    """
    lam0 = _state(spec, lam0)
    if not np.all(np.isfinite(lam0)):
        raise ValidationError("initial state is not finite")
    if observables is None:
        observables = default_observables(spec)
    nsteps = cfg.n_steps
    stride = int(cfg.sample_stride)
    samples, filled, status, fail = _kernels.rk4_path(*spec.arrays, lam0, float(cfg.step), nsteps, stride)
    if status != _kernels.OK:
        last = (fail - 1) * cfg.step
        raise DivergenceError(f"non-finite state after t = {last:.6g}", time=last)
    states = samples[:filled]
    times = np.arange(filled) * (stride * cfg.step)
    values = {name: np.asarray(f(states), dtype=float) for name, f in observables.items()}
    drifts = {name: relative_drift(v) for name, v in values.items()}
    return Trajectory(times, states, drifts, values)


def flow(spec, lam0, t, step=DEFAULT_STEP):
    """State at time ``t`` (a multiple of ``step``)."""
    cfg = IntegratorConfig(step=step, t_end=t, sample_stride=max(1, int(round(t / step))))
    return integrate(spec, lam0, cfg, observables={}).final


def write_trajectory_csv(traj, path, labels):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(["t"] + [f"p_{name}" for name in labels]) + "\n")
        for t, row in zip(traj.times, traj.states):
            fh.write(",".join(format(float(x), ".17g") for x in (t, *row)) + "\n")

