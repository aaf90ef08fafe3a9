"""Point-mass-with-friction dynamics: exact discrete stepping of the linear
system  p_dot = v,  v_dot = -theta * v + beta * u  per axis.

The three axes decouple, so the matrix exponential reduces to a scalar
closed form per axis and stepping is exact for any dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Discrete action set: null action plus the six axis directions, in this
# fixed order (action id = list position).
ACTIONS: tuple[tuple[int, int, int], ...] = (
    (0, 0, 0),
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)
K = len(ACTIONS)

# Below this value of theta*dt the closed form divides by ~0; switch to the
# frictionless (double-integrator) limit, which agrees to well under 1e-6.
_LIMIT_SWITCH = 1e-12


class State(NamedTuple):
    p: tuple[float, float, float]
    v: tuple[float, float, float]


@dataclass(frozen=True)
class DynamicsParams:
    theta: tuple[float, float, float] = (0.25, 0.25, 0.25)
    beta: float = 1.0
    dt: float = 0.2

    def __post_init__(self):
        if any(t < 0 for t in self.theta):
            raise ValueError("friction coefficients must be >= 0")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")


def axis_coeffs(params: DynamicsParams):
    """Per-axis step coefficients (E, B, C) so that, with u = beta * u_axis,

        v' = v * E + u * B
        p' = p + v * B + u * C

    For theta > 0: E = exp(-theta dt), B = (1 - E) / theta, C = (dt - B) / theta.
    In the theta -> 0 limit: E = 1, B = dt, C = dt^2 / 2.
    """
    out = []
    dt = params.dt
    for theta in params.theta:
        if theta * dt < _LIMIT_SWITCH:
            out.append((1.0, dt, 0.5 * dt * dt))
        else:
            e = math.exp(-theta * dt)
            b = -math.expm1(-theta * dt) / theta
            c = (dt - b) / theta
            out.append((e, b, c))
    return tuple(out)


def step(x: State, a: int, params: DynamicsParams) -> State:
    """One exact discrete step under action id `a`."""
    u = ACTIONS[a]
    coeffs = axis_coeffs(params)
    p = []
    v = []
    for axis in range(3):
        e, b, c = coeffs[axis]
        ua = params.beta * u[axis]
        va = x.v[axis]
        v.append(va * e + ua * b)
        p.append(x.p[axis] + va * b + ua * c)
    return State(p=(p[0], p[1], p[2]), v=(v[0], v[1], v[2]))


def state_matrix(theta) -> np.ndarray:
    """Continuous-time 6x6 state matrix: position-velocity coupling plus the
    friction terms -theta on the velocity diagonal."""
    a = np.zeros((6, 6))
    for i in range(3):
        a[i, 3 + i] = 1.0
        a[3 + i, 3 + i] = -float(theta[i])
    return a
