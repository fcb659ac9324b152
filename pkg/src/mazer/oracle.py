"""Brute-force coupled-channel solver used to cross-check the closed forms.

Integrates the stationary equation psi'' = (M - u**2) psi for the three bare
channels across the cavity with fixed-step classical Runge-Kutta, never
diagonalizing M, and extracts reflection/transmission amplitudes by matching
to plane waves outside.

Two matching strategies are available:

``"stabilized"`` (default)
    Start from the three purely outgoing solutions at z = s and integrate them
    back to z = 0.  The 6x3 solution block is re-orthonormalized by QR at
    regular checkpoints; the triangular factors are kept and undone at the end.
    Exponential growth inside wide barriers never overflows and the columns
    never collapse onto the dominant evanescent mode.

``"fundamental"``
    Integrate the full 6x6 fundamental matrix from z = 0 to z = s and solve the
    6x6 linear matching system for ``(R1, Rj, R0, T1, Tj, T0)`` directly.  Loses
    roughly ``exp(s*|xi|)`` in accuracy inside tunneling barriers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from mazer.model import SystemParams, coupling_matrix
from mazer.scattering import ChannelAmplitudes, channel_amplitudes

METHODS = ("stabilized", "fundamental")


class SingularMatchingError(ArithmeticError):
    """Matching system at the cavity boundary is numerically singular."""

    def __init__(self, condition_number: float):
        self.condition_number = condition_number
        super().__init__(f"singular matching system (condition number {condition_number:.3e})")

    def __reduce__(self):
        return type(self), (self.condition_number,)


@dataclass(frozen=True)
class OracleConfig:
    steps: int = 4096
    scheme_order: int = 4
    method: str = "stabilized"
    # QR checkpoint spacing in steps for the stabilized method
    renorm_every: int = 16

    def __post_init__(self):
        if self.steps < 100:
            raise ValueError(f"steps must be >= 100, got {self.steps}")
        if self.scheme_order != 4:
            raise ValueError(f"only the 4th-order scheme is implemented, got order {self.scheme_order}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.renorm_every < 1:
            raise ValueError("renorm_every must be >= 1")


def first_order_generator(m: np.ndarray, u: float) -> np.ndarray:
    """Matrix A of y' = A y with y = (psi, psi')."""
    dim = m.shape[0]
    a = np.zeros((2 * dim, 2 * dim))
    a[:dim, dim:] = np.eye(dim)
    a[dim:, :dim] = m - u * u * np.eye(dim)
    return a


def rk4_step_matrix(a: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for y' = A y, applied to the identity.

    Because the cavity potential is constant, every step maps y -> S y with
    the same S, so the whole integration is repeated multiplication by S.
    """
    y = np.eye(a.shape[0])
    k1 = a @ y
    k2 = a @ (y + 0.5 * h * k1)
    k3 = a @ (y + 0.5 * h * k2)
    k4 = a @ (y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_condition(mat: np.ndarray, limit: float) -> None:
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > limit:
        raise SingularMatchingError(float(cond))


def _solve_stabilized(m, incident, u, s, config):
    dim = m.shape[0]
    h = s / config.steps
    step = rk4_step_matrix(first_order_generator(m, u), -h)
    phase = np.exp(1j * u * s)
    w = np.vstack([np.eye(dim) * phase, 1j * u * np.eye(dim) * phase])
    triangles = []
    for i in range(1, config.steps + 1):
        w = step @ w
        if i % config.renorm_every == 0 or i == config.steps:
            w, r = np.linalg.qr(w)
            triangles.append(r)

    psi, dpsi = w[:dim], w[dim:]
    incoming = 0.5 * (psi + dpsi / (1j * u))
    outgoing = 0.5 * (psi - dpsi / (1j * u))
    _check_condition(incoming, 1e12)
    coeff = np.linalg.solve(incoming, incident)
    refl = outgoing @ coeff
    trans = coeff
    for r in reversed(triangles):
        trans = solve_triangular(r, trans)
    return refl, trans


def _solve_fundamental(m, incident, u, s, config):
    dim = m.shape[0]
    h = s / config.steps
    step = rk4_step_matrix(first_order_generator(m, u), h)
    phi = np.linalg.matrix_power(step, config.steps)

    eye = np.eye(dim)
    left_refl = phi @ np.vstack([eye, -1j * u * eye])
    right_trans = np.vstack([eye, 1j * u * eye]) * np.exp(1j * u * s)
    system = np.hstack([left_refl, -right_trans])
    rhs = -phi @ np.concatenate([incident, 1j * u * incident])
    _check_condition(system, 1e14)
    x = np.linalg.solve(system, rhs)
    return x[:dim], x[dim:]


def solve_coupled_channels(
    params: SystemParams,
    config: OracleConfig | None = None,
    basis: np.ndarray | None = None,
) -> ChannelAmplitudes:
    """Channel amplitudes for a unit wave incident in |1> from the left, by direct integration.

    ``basis`` optionally rotates the internal channel frame: its columns are
    orthonormal vectors in bare coordinates.  The coupling matrix, incident
    vector and results are transformed accordingly, so any orthogonal basis
    must reproduce the bare-frame answer.
    """
    config = config or OracleConfig()
    m = coupling_matrix(params).m
    incident = np.array([1.0, 0.0, 0.0], dtype=complex)
    if basis is not None:
        basis = np.asarray(basis, dtype=float)
        m = basis.T @ m @ basis
        incident = basis.T @ incident

    if params.s == 0.0:
        refl, trans = np.zeros(3, dtype=complex), incident.copy()
    elif config.method == "stabilized":
        refl, trans = _solve_stabilized(m, incident, params.u, params.s, config)
    else:
        refl, trans = _solve_fundamental(m, incident, params.u, params.s, config)

    if basis is not None:
        refl, trans = basis @ refl, basis @ trans
    return ChannelAmplitudes(*(complex(v) for v in (*refl, *trans)))


def max_amplitude_difference(a: ChannelAmplitudes, b: ChannelAmplitudes) -> float:
    return float(np.max(np.abs(a.as_array() - b.as_array())))


def convergence_study(
    params: SystemParams,
    step_ladder: list[int],
    method: str = "stabilized",
) -> list[tuple[int, float]]:
    """Max modulus error of the oracle amplitudes against the closed form, per step count."""
    if any(b <= a for a, b in zip(step_ladder, step_ladder[1:])):
        raise ValueError("step_ladder must be strictly increasing")
    exact = channel_amplitudes(params)
    out = []
    for steps in step_ladder:
        got = solve_coupled_channels(params, OracleConfig(steps=steps, method=method))
        out.append((steps, max_amplitude_difference(got, exact)))
    return out


def observed_order(errors: list[tuple[int, float]]) -> list[float]:
    """Empirical convergence order between consecutive ladder rungs."""
    orders = []
    for (n1, e1), (n2, e2) in zip(errors, errors[1:]):
        if e1 <= 0.0 or e2 <= 0.0:
            orders.append(math.nan)
        else:
            orders.append(math.log(e1 / e2) / math.log(n2 / n1))
    return orders
