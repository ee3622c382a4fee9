"""Lyapunov exponents along Euler trajectories.

The maximal exponent is estimated with Benettin's method (one tangent vector,
periodic renormalisation); the full spectrum with a QR-reorthonormalised
tangent frame.  Both integrate the variational equation with the analytic
Jacobian in the same RK4 step as the base state.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import DivergenceError, NilmagError, ValidationError
from .euler import DEFAULT_STEP, FieldSpec, hamiltonian
from .orbits import T4_LABELS, orbit_sample

TANGENT_STREAM = 1


@dataclass(frozen=True)
class LyapunovConfig:
    step: float = DEFAULT_STEP
    renorm_interval: float = 1.0
    transient_fraction: float = 0.1
    seed: int = 0
    check_convergence: bool = True
    # relative change allowed when the step is halved; the absolute floor
    # keeps near-zero exponents from being flagged on rounding noise
    convergence_rtol: float = 0.3
    convergence_atol: float = 1e-3

    def __post_init__(self):
        if self.step <= 0 or self.renorm_interval <= 0:
            raise ValidationError("step and renorm_interval must be positive")
        if not 0 <= self.transient_fraction < 1:
            raise ValidationError("transient_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class LyapunovReport:
    mle: float
    fit_window: tuple
    renorm_interval: float
    seed: int
    step: float
    t_end: float
    converged: bool = None
    mle_half_step: float = None
    spectrum: tuple = None

    def to_json(self):
        out = {
            "mle": self.mle,
            "fit_window": list(self.fit_window),
            "renorm_interval": self.renorm_interval,
            "seed": self.seed,
            "step": self.step,
            "t_end": self.t_end,
            "converged": self.converged,
            "mle_half_step": self.mle_half_step,
        }
        if self.spectrum is not None:
            out["spectrum"] = list(self.spectrum)
        return out


def initial_tangent(n, seed, columns=1):
    rng = np.random.default_rng([seed, TANGENT_STREAM])
    v = rng.standard_normal((n, columns))
    if columns == 1:
        return v / np.linalg.norm(v)
    q, r = np.linalg.qr(v)
    return q * np.sign(np.diag(r))


def _run(spec, lam0, V0, t_end, step, cfg):
    lam0 = np.asarray(lam0, dtype=float)
    if lam0.shape != (spec.dim,) or not np.all(np.isfinite(lam0)):
        raise ValidationError("initial state must be a finite vector of the algebra's dimension")
    nsteps = int(round(t_end / step))
    if nsteps < 1:
        raise ValidationError("t_end must cover at least one step")
    renorm = max(1, int(round(cfg.renorm_interval / step)))
    transient = int(round(cfg.transient_fraction * nsteps))
    sums, elapsed, status, fail = _kernels.lyapunov_run(
        *spec.arrays, lam0, np.ascontiguousarray(V0), float(step), nsteps, renorm, transient)
    if status != _kernels.OK:
        last = (fail - 1) * step
        raise DivergenceError(f"base trajectory diverged after t = {last:.6g}", time=last)
    if elapsed <= 0:
        return np.zeros(V0.shape[1]), (t_end, t_end)
    return sums / elapsed, (t_end - elapsed, t_end)


def _converged(a, b, cfg):
    return bool(abs(a - b) <= max(cfg.convergence_rtol * abs(a), cfg.convergence_atol))


def mle_benettin(spec, lam0, t_end, cfg=None):
    cfg = cfg or LyapunovConfig()
    n = spec.dim
    if spec.is_zero_field:
        return LyapunovReport(0.0, (cfg.transient_fraction * t_end, t_end), cfg.renorm_interval,
                              cfg.seed, cfg.step, t_end, True, 0.0 if cfg.check_convergence else None)
    v0 = initial_tangent(n, cfg.seed)
    rates, window = _run(spec, lam0, v0, t_end, cfg.step, cfg)
    mle = float(rates[0])
    converged = half = None
    if cfg.check_convergence:
        rates2, _ = _run(spec, lam0, v0, t_end, cfg.step / 2, cfg)
        half = float(rates2[0])
        converged = _converged(mle, half, cfg)
    return LyapunovReport(mle, window, cfg.renorm_interval, cfg.seed, cfg.step, t_end, converged, half)


def lyapunov_spectrum(spec, lam0, t_end, cfg=None):
    """Full spectrum by QR reorthonormalisation, sorted descending."""
    cfg = cfg or LyapunovConfig()
    n = spec.dim
    if spec.is_zero_field:
        return LyapunovReport(0.0, (cfg.transient_fraction * t_end, t_end), cfg.renorm_interval, cfg.seed,
                              cfg.step, t_end, True, None, (0.0,) * n)
    V0 = initial_tangent(n, cfg.seed, columns=n)
    rates, window = _run(spec, lam0, V0, t_end, cfg.step, cfg)
    spectrum = tuple(float(x) for x in sorted(rates, reverse=True))
    converged = half = None
    if cfg.check_convergence:
        rates2, _ = _run(spec, lam0, V0, t_end, cfg.step / 2, cfg)
        half = float(max(rates2))
        converged = _converged(spectrum[0], half, cfg)
    return LyapunovReport(spectrum[0], window, cfg.renorm_interval, cfg.seed, cfg.step, t_end,
                          converged, half, spectrum)


def level_sample(metric, energy, seed):
    """A seeded covector with Hamiltonian equal to ``energy``."""
    if energy <= 0:
        raise ValidationError("energy must be positive")
    v = np.random.default_rng(seed).standard_normal(metric.dim)
    return v * np.sqrt(energy / hamiltonian(metric, v))


@dataclass
class SweepRow:
    coords: dict
    seed: int
    report: LyapunovReport = None
    error: str = None

    @property
    def mle(self):
        return None if self.report is None else self.report.mle


@dataclass
class SweepTable:
    kind: str
    rows: list = field(default_factory=list)

    @property
    def columns(self):
        first = ("k1", "k2") if self.kind == "orbit" else ("c", "energy")
        return first + ("seed", "mle", "converged", "t_end", "step", "status")

    def mle_values(self):
        return [r.mle for r in self.rows if r.report is not None]

    def to_csv(self):
        lines = [",".join(self.columns)]
        for r in self.rows:
            a, b = (r.coords[name] for name in self.columns[:2])
            if r.report is None:
                rest = ["", "", "", "", r.error]
            else:
                rep = r.report
                rest = [format(rep.mle, ".17g"), "" if rep.converged is None else str(rep.converged).lower(),
                        format(rep.t_end, ".17g"), format(rep.step, ".17g"), "ok"]
            lines.append(",".join([format(a, ".17g"), format(b, ".17g"), str(r.seed)] + rest))
        return "\n".join(lines) + "\n"

    def to_json(self):
        vals = self.mle_values()
        return {
            "kind": self.kind,
            "rows": [{**r.coords, "seed": r.seed, "error": r.error,
                      **({} if r.report is None else r.report.to_json())} for r in self.rows],
            "mle_min": min(vals) if vals else None,
            "mle_max": max(vals) if vals else None,
        }


def sweep_point(system, kind, point, seed, t_end, cfg):
    """State and field for one grid point, then a Benettin run."""
    cfg = replace(cfg, seed=seed)
    if kind == "orbit":
        spec = FieldSpec.geodesic(system)
        lam0 = orbit_sample(point[0], point[1], seed)
    else:
        spec = FieldSpec.magnetic(system, c=point[0])
        lam0 = level_sample(system.metric, point[1], seed)
    return mle_benettin(spec, lam0, t_end, cfg)


def sweep(system, grid, seeds, t_end, cfg=None, kind=None, workers=1):
    """One Benettin run per grid point and seed, ordered by grid index then seed.

    ``kind="orbit"`` reads grid points as (k1, k2) on the t4 extension;
    ``kind="level"`` reads them as (c, energy) for the system's magnetic field.
    A diverging point is recorded in its row and the sweep continues.
    """
    cfg = cfg or LyapunovConfig()
    if kind is None:
        kind = "orbit" if system.algebra.labels == T4_LABELS else "level"
    if kind == "orbit" and system.algebra.labels != T4_LABELS:
        raise ValidationError("orbit sweeps need the t4 extension (basis U, V, X, Y, Z, W)")
    names = ("k1", "k2") if kind == "orbit" else ("c", "energy")
    jobs = [(tuple(float(x) for x in p), int(s)) for p in grid for s in seeds]

    def one(job):
        point, seed = job
        try:
            return SweepRow(dict(zip(names, point)), seed, sweep_point(system, kind, point, seed, t_end, cfg))
        except NilmagError as exc:
            return SweepRow(dict(zip(names, point)), seed, None, f"{exc.category}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    return SweepTable(kind, rows)
