"""Dimensionless scenario parameters and the single-excitation dressed eigensystem.

Units: momenta in units of kappa (the wave vector whose kinetic energy equals
the single-atom vacuum coupling hbar*g), energies in units of hbar*g, lengths
in units of 1/kappa.  Bare basis ordering is ``(|1>, |j>, |0>)``: moving atom
excited, one symmetric excitation among the N-1 trapped atoms, one photon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Scenario description: atom count N, momentum ratio u = chi/kappa, length s = kappa*L."""

    n_atoms: int
    u: float
    s: float

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise TypeError(f"n_atoms must be an integer, got {self.n_atoms!r}")
        if self.n_atoms < 1:
            raise ValueError(f"n_atoms must be >= 1, got {self.n_atoms}")
        if not self.u > 0 or not math.isfinite(self.u):
            raise ValueError(f"u must be a finite positive number, got {self.u}")
        if not self.s >= 0 or not math.isfinite(self.s):
            raise ValueError(f"s must be a finite non-negative number, got {self.s}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True)
class CouplingMatrix:
    m: np.ndarray


@dataclass(frozen=True)
class DressedEigensystem:
    """Eigenvalues ``(+sqrt N, 0, -sqrt N)`` and eigenvectors as *rows* of ``eigenvectors``.

    Row k holds the bare-basis coefficients of |Psi(+)>, |Psi(0)>, |Psi(-)> in turn.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def coupling_matrix(params: SystemParams) -> CouplingMatrix:
    """Atom-field interaction restricted to the one-excitation sector, in units of hbar*g."""
    c = math.sqrt(params.n_atoms - 1)
    m = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, c], [1.0, c, 0.0]])
    return CouplingMatrix(m)


def dressed_eigensystem(params: SystemParams) -> DressedEigensystem:
    n = params.n_atoms
    root_n = math.sqrt(n)
    a = 1.0 / math.sqrt(2.0 * n)
    b = math.sqrt(n - 1) * a
    h = 1.0 / math.sqrt(2.0)
    vectors = np.array(
        [
            [a, b, h],
            [math.sqrt(n - 1) / root_n, -1.0 / root_n, 0.0],
            [a, b, -h],
        ]
    )
    return DressedEigensystem(np.array([root_n, 0.0, -root_n]), vectors)


def bare_state_decomposition(params: SystemParams) -> tuple[float, float, float]:
    """Coefficients ``(c+, c0, c-)`` with ``|1> = c+|Psi(+)> + c0|Psi(0)> + c-|Psi(-)>``."""
    n = params.n_atoms
    edge = 1.0 / math.sqrt(2.0 * n)
    return edge, math.sqrt(2.0 * (n - 1)) * edge, edge
