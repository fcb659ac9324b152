"""Closed-form scattering of the moving atom by the dressed barrier and well.

Each dressed state |Psi(+/-)> sees a rectangular potential +/-sqrt(N) of width s,
while |Psi(0)> propagates freely.  The bare-channel amplitudes follow by
projecting the outgoing dressed waves back onto ``(|1>, |j>, |0>)``.

The ``*_grid`` variants accept numpy arrays and broadcast, so that dense
sweeps stay vectorized.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from mazer.model import SystemParams

# Below this |s*xi| the sin/tanh ratios switch to their Taylor series.
SERIES_THRESHOLD = 1e-6

Branch = Literal["+", "-"]


@dataclass(frozen=True)
class MesaAmplitudes:
    rho: complex
    tau: complex
    xi: complex


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Reflection (``r*``) and transmission (``t*``) amplitudes of the bare channels.

    Fields are complex scalars, or complex arrays when produced by
    :func:`channel_amplitudes_grid`.
    """

    r1: complex
    rj: complex
    r0: complex
    t1: complex
    tj: complex
    t0: complex

    def as_array(self) -> np.ndarray:
        """Stack as ``(r1, rj, r0, t1, tj, t0)`` along the first axis."""
        return np.array([self.r1, self.rj, self.r0, self.t1, self.tj, self.t0])


@dataclass(frozen=True)
class ChannelProbabilities:
    p_t1: float
    p_r1: float
    p_tj: float
    p_rj: float
    p_t0: float
    p_r0: float
    p1: float
    pj: float
    p0: float

    @property
    def total(self):
        return self.p1 + self.pj + self.p0


def _sign(branch: str) -> float:
    if branch == "+":
        return 1.0
    if branch == "-":
        return -1.0
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def _sin_ratio(q, s):
    """sin(s*q)/q for q >= 0, finite at q = 0."""
    x = s * q
    small = np.abs(x) < SERIES_THRESHOLD
    x2 = x * x
    series = s * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sin(x) / q
    return np.where(small, series, direct)


def _tanh_ratio(k, s):
    """tanh(s*k)/k for k >= 0, finite at k = 0."""
    x = s * k
    small = np.abs(x) < SERIES_THRESHOLD
    x2 = x * x
    series = s * (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.tanh(x) / k
    return np.where(small, series, direct)


def _sech(x):
    # 2 e^{-x} / (1 + e^{-2x}) never overflows for x >= 0
    e = np.exp(-x)
    return 2.0 * e / (1.0 + e * e)


def rectangular_scattering(xi2, u, s):
    """Reflection and transmission amplitudes of a rectangular potential of width ``s``.

    The potential region has internal squared wave number ``xi2`` and the
    asymptotic wave number is ``u``.  Written in terms of even functions of xi
    only, so a single code path covers barrier, well and the turning point
    ``xi2 == 0``.  Inside a tunneling barrier the denominator is scaled by
    ``cosh(s*|xi|)``, which keeps arbitrarily wide barriers finite.

    Returns ``(rho, tau)`` as complex arrays broadcast over the inputs.
    """
    xi2 = np.asarray(xi2, dtype=float)
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    xi2, u, s = np.broadcast_arrays(xi2, u, s)

    allowed = xi2 >= 0.0
    q = np.sqrt(np.where(allowed, xi2, 0.0))
    k = np.sqrt(np.where(allowed, 0.0, -xi2))

    cos_part = np.where(allowed, np.cos(s * q), 1.0)
    sin_part = np.where(allowed, _sin_ratio(q, s), _tanh_ratio(k, s))
    scale = np.where(allowed, 1.0, _sech(s * k))

    denom = cos_part - 1j * (xi2 + u * u) / (2.0 * u) * sin_part
    tau = np.exp(-1j * u * s) * scale / denom
    rho = 1j * (xi2 - u * u) / (2.0 * u) * sin_part / denom
    return rho, tau


def direct_mesa_formula(xi: complex, u: float, s: float) -> tuple[complex, complex]:
    """Textbook evaluation of (rho, tau) from a given complex internal wave number ``xi``.

    Uses alpha, beta and the complex sin/cos verbatim; no series branch or
    scaling, so it is only meant for moderate ``s*|xi|`` and ``xi != 0``.
    """
    alpha = (xi / u - u / xi) / 2.0
    beta = (xi / u + u / xi) / 2.0
    sn = cmath.sin(s * xi)
    tau = cmath.exp(-1j * u * s) / (cmath.cos(s * xi) - 1j * beta * sn)
    rho = 1j * alpha * sn * tau * cmath.exp(1j * u * s)
    return rho, tau


def mesa_amplitudes(branch: Branch, params: SystemParams) -> MesaAmplitudes:
    """(rho, tau) for the barrier (``'+'``) or the well (``'-'``) seen by the dressed states."""
    sign = _sign(branch)
    xi2 = params.u**2 - sign * math.sqrt(params.n_atoms)
    rho, tau = rectangular_scattering(xi2, params.u, params.s)
    return MesaAmplitudes(complex(rho), complex(tau), cmath.sqrt(xi2))


def channel_amplitudes_grid(n_atoms, u, s) -> ChannelAmplitudes:
    """Vectorized bare-channel amplitudes; ``n_atoms``, ``u`` and ``s`` broadcast together."""
    n = np.asarray(n_atoms, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(n < 1) or np.any(n != np.round(n)):
        raise ValueError("n_atoms must be integers >= 1")
    if np.any(~(u > 0)):
        raise ValueError("u must be strictly positive")
    root_n = np.sqrt(n)
    rho_p, tau_p = rectangular_scattering(u * u - root_n, u, s)
    rho_m, tau_m = rectangular_scattering(u * u + root_n, u, s)
    collective = np.sqrt(n - 1.0)
    r1 = (rho_p + rho_m) / (2.0 * n)
    t1 = (tau_p + 2.0 * (n - 1.0) + tau_m) / (2.0 * n)
    return ChannelAmplitudes(
        r1=r1,
        rj=collective * r1,
        r0=(rho_p - rho_m) / np.sqrt(4.0 * n),
        t1=t1,
        tj=collective * (tau_p - 2.0 + tau_m) / (2.0 * n),
        t0=(tau_p - tau_m) / np.sqrt(4.0 * n),
    )


def channel_amplitudes(params: SystemParams) -> ChannelAmplitudes:
    a = channel_amplitudes_grid(params.n_atoms, params.u, params.s)
    return ChannelAmplitudes(*(complex(v) for v in a.as_array()))


def channel_probabilities(amps: ChannelAmplitudes) -> ChannelProbabilities:
    sq = lambda z: np.abs(z) ** 2  # noqa: E731
    p_t1, p_r1 = sq(amps.t1), sq(amps.r1)
    p_tj, p_rj = sq(amps.tj), sq(amps.rj)
    p_t0, p_r0 = sq(amps.t0), sq(amps.r0)
    probs = [p_t1, p_r1, p_tj, p_rj, p_t0, p_r0, p_t1 + p_r1, p_tj + p_rj, p_t0 + p_r0]
    if np.ndim(p_t1) == 0:
        probs = [float(p) for p in probs]
    return ChannelProbabilities(*probs)


def slow_limit_transmission(params: SystemParams):
    """Approximate P_T(1) for u**2 << sqrt(N), where the barrier component is fully reflected.

    Evaluated regardless of whether the approximation is valid.
    """
    return slow_limit_grid(params.n_atoms, params.u, params.s)


def slow_limit_grid(n_atoms, u, s):
    n = float(n_atoms)
    quarter = n**0.25
    phase = s * quarter
    resonant = (1.0 + 4.0 * (n - 1.0) * np.cos(phase)) / (
        1.0 + (quarter / (2.0 * u)) ** 2 * np.sin(phase) ** 2
    )
    return (4.0 * (n - 1.0) ** 2 + resonant) / (4.0 * n * n)


def transmission_extrema(n_atoms: int) -> tuple[float, float]:
    """Slow-atom resonance maximum and minimum of P_T(1), valid for N > 1."""
    if n_atoms <= 1:
        raise ValueError(f"transmission extrema are defined for n_atoms > 1, got {n_atoms}")
    n = float(n_atoms)
    return (1.0 - 1.0 / (2.0 * n)) ** 2, (1.0 - 3.0 / (2.0 * n)) ** 2


def fast_limit_probabilities(params: SystemParams):
    """(p1, pj, p0) in the fast-atom regime u**2 >> sqrt(N).

    The Rabi phase is g*t*sqrt(N) with interaction time t = mu*L/(hbar*chi),
    i.e. ``s*sqrt(N)/(2u)`` in dimensionless units.
    """
    return fast_limit_grid(params.n_atoms, params.u, params.s)


def fast_limit_grid(n_atoms, u, s):
    n = float(n_atoms)
    phi = s * math.sqrt(n) / (2.0 * u)
    c = np.cos(phi)
    p1 = (n - 1.0 + c) ** 2 / n**2
    pj = (n - 1.0) * (c - 1.0) ** 2 / n**2
    p0 = np.sin(phi) ** 2 / n
    return p1, pj, p0
