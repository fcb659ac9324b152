"""Incoherent average of the channel probabilities over a Gaussian momentum spread."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mazer.scattering import (
    ChannelProbabilities,
    channel_amplitudes_grid,
    channel_probabilities,
)

# Gaussian truncated at this many standard deviations each side.
TRUNCATION_SIGMAS = 5.0
DEFAULT_QUADRATURE_POINTS = 129


@dataclass(frozen=True)
class PacketSpec:
    u_mean: float
    u_sigma: float = 0.0
    quadrature_points: int = DEFAULT_QUADRATURE_POINTS

    def __post_init__(self):
        if not self.u_mean > 0:
            raise ValueError(f"u_mean must be > 0, got {self.u_mean}")
        if not self.u_sigma >= 0:
            raise ValueError(f"u_sigma must be >= 0, got {self.u_sigma}")
        if self.quadrature_points < 1:
            raise ValueError(f"quadrature_points must be >= 1, got {self.quadrature_points}")


def quadrature(packet: PacketSpec) -> tuple[np.ndarray, np.ndarray]:
    """Abscissae and normalized weights for the momentum average.

    Evenly spaced points over ``u_mean +/- 5 sigma`` with trapezoid weights
    times the Gaussian density; points at ``u <= 0`` are dropped and the
    remaining weights renormalized to sum to one.
    """
    if packet.u_sigma == 0.0 or packet.quadrature_points == 1:
        return np.array([packet.u_mean]), np.array([1.0])
    half = TRUNCATION_SIGMAS * packet.u_sigma
    u = np.linspace(packet.u_mean - half, packet.u_mean + half, packet.quadrature_points)
    trap = np.ones_like(u)
    trap[0] = trap[-1] = 0.5
    w = trap * np.exp(-0.5 * ((u - packet.u_mean) / packet.u_sigma) ** 2)
    keep = u > 0
    if not np.any(keep):
        raise ValueError("momentum grid lies entirely at u <= 0")
    u, w = u[keep], w[keep]
    return u, w / math.fsum(w)


def _weighted_sum(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    # fsum per column: exact rounding, independent of BLAS threading
    flat = values.reshape(values.shape[0], -1)
    out = np.array([math.fsum(weights * flat[:, k]) for k in range(flat.shape[1])])
    return out.reshape(values.shape[1:])


def averaged_probabilities(packet: PacketSpec, n_atoms: int, s) -> ChannelProbabilities:
    """Momentum-averaged channel probabilities; ``s`` may be a scalar or an array."""
    u, w = quadrature(packet)
    s_arr = np.asarray(s, dtype=float)
    grid_u = u.reshape((-1,) + (1,) * s_arr.ndim)
    probs = channel_probabilities(channel_amplitudes_grid(n_atoms, grid_u, s_arr[None, ...]))
    fields = [np.broadcast_to(getattr(probs, f), (u.size,) + s_arr.shape) for f in _FIELDS]
    averaged = [_weighted_sum(w, f) for f in fields]
    if s_arr.ndim == 0:
        averaged = [float(a) for a in averaged]
    return ChannelProbabilities(*averaged)


_FIELDS = ("p_t1", "p_r1", "p_tj", "p_rj", "p_t0", "p_r0", "p1", "pj", "p0")
