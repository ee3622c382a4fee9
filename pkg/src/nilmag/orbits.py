"""Casimirs, coadjoint orbits and energy levels of the six-dimensional t4 algebra.

States use the extension's basis order ``(U, V, X, Y, Z, W)``, i.e. the base
order with ``W`` appended last.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

T4_LABELS = ("U", "V", "X", "Y", "Z", "W")
_U, _V, _X, _Y, _Z, _W = range(6)

SAMPLE_HALF_WIDTH = 2.0


@dataclass(frozen=True)
class OrbitSpec:
    k1: float
    k2: float
    alpha: complex
    regular: bool

    @classmethod
    def from_casimirs(cls, k1, k2):
        a = alpha(k1, k2) if k2 + k1 * k1 != 0 else complex("nan")
        return cls(float(k1), float(k2), a, is_regular(k1, k2))

    def to_json(self):
        return {"k1": self.k1, "k2": self.k2, "alpha_re": self.alpha.real,
                "alpha_im": self.alpha.imag, "regular": self.regular}


@dataclass(frozen=True)
class LevelSpec:
    c: float
    d: float
    b: float


def _t4_state(lam):
    lam = np.asarray(lam)
    if lam.shape[-1] != 6:
        raise DimensionError(f"t4 states have 6 coordinates, got {lam.shape[-1]}")
    return lam


def casimirs_t4(lam):
    """(K1, K2) = (p_W, p_W p_Y - p_Z p_U).  Works on Fractions and stacked float arrays."""
    if isinstance(lam, (tuple, list)) and len(lam) == 6 and not isinstance(lam[0], (list, tuple, np.ndarray)):
        pu, pw, py, pz = lam[_U], lam[_W], lam[_Y], lam[_Z]
        return pw, pw * py - pz * pu
    lam = _t4_state(lam)
    pu, py, pz, pw = lam[..., _U], lam[..., _Y], lam[..., _Z], lam[..., _W]
    return pw, pw * py - pz * pu


def casimir_observables():
    return {
        "K1": lambda s: casimirs_t4(np.asarray(s, dtype=float))[0],
        "K2": lambda s: casimirs_t4(np.asarray(s, dtype=float))[1],
    }


def is_regular(k1, k2):
    return k1 * k2 != 0


def alpha(k1, k2):
    """Principal square root of (k2 - k1^2) / (k2 + k1^2)."""
    den = k2 + k1 * k1
    if den == 0:
        raise ValidationError("alpha has a pole at k2 + k1^2 = 0")
    return cmath.sqrt(complex((k2 - k1 * k1) / den))


def orbit_sample(k1, k2, seed):
    """A float state on the coadjoint orbit K = (k1, k2).

    Sets p_W = k1, draws p_U, p_Z, p_X, p_V (in that order) uniformly from
    [-2, 2] with a seeded generator and solves K2 = k2 for p_Y.
    """
    if k1 == 0:
        raise ValidationError("orbit sampling needs k1 != 0 (p_Y cannot be solved for)")
    rng = np.random.default_rng(seed)
    pu, pz, px, pv = rng.uniform(-SAMPLE_HALF_WIDTH, SAMPLE_HALF_WIDTH, size=4)
    py = (k2 + pz * pu) / k1
    lam = np.empty(6)
    lam[[_U, _V, _X, _Y, _Z, _W]] = pu, pv, px, py, pz, k1
    return lam


def level_spec(c, d):
    if c <= 0 or d <= 0:
        raise ValidationError("c and d must be positive")
    return LevelSpec(float(c), float(d), (d * d + c * c) / 2.0)


def k2_for_target_speed(D):
    """k2 with sqrt(2 k2 - 1) = D at k1 = 1."""
    if D <= 0:
        raise ValidationError("target speed must be positive")
    return (D * D + 1.0) / 2.0


def speed_from_energy(b, c=1.0):
    """Base speed d on the level with extension energy b and moment c: b = (d^2 + c^2) / 2."""
    if b <= 0 or c <= 0:
        raise ValidationError("energy and moment must be positive")
    rad = 2.0 * b - c * c
    if rad < 0:
        raise ValidationError(f"energy {b} is below the moment floor c^2/2 = {c * c / 2}")
    return math.sqrt(rad)
