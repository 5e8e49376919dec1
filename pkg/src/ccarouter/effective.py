"""Zero-mode reduced model and the register-only mirror dynamics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .model import (
    SystemConfig,
    channel_mode,
    register_couplings,
    register_spectrum,
    zero_mode_index,
)

__all__ = [
    "EffectiveModel",
    "RegisterCouplingMatrix",
    "DressedSplitting",
    "build_effective_hamiltonian",
    "register_coupling_matrix",
    "mirror_propagator_check",
    "dressed_splitting",
]


@dataclass(frozen=True)
class EffectiveModel:
    """Basis ``l_1..l_n, r_1..r_n, f_z, |e>`` (dim 2n+2)."""

    matrix: np.ndarray
    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n + 2

    @property
    def left_indices(self) -> list[int]:
        return list(range(self.n))

    @property
    def right_indices(self) -> list[int]:
        return list(range(self.n, 2 * self.n))

    @property
    def zero_mode(self) -> int:
        return 2 * self.n

    @property
    def atom(self) -> int:
        return 2 * self.n + 1

    def register_indices(self, side: str) -> list[int]:
        return self.left_indices if side in ("l", "left") else self.right_indices


@dataclass(frozen=True)
class RegisterCouplingMatrix:
    A: np.ndarray
    g0: float

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.A)


@dataclass(frozen=True)
class DressedSplitting:
    omega2: float
    energies: tuple[float, float]
    m_parity_ok: bool


def build_effective_hamiltonian(config: SystemConfig) -> EffectiveModel:
    n, N, m = config.n, config.N, config.channel.m
    z = zero_mode_index(N)
    dim = 2 * n + 2
    H = np.zeros((dim, dim))
    gl = register_couplings(n, config.left.g0)
    gr = register_couplings(n, config.right.g0)
    for j in range(n - 1):
        H[j, j + 1] = H[j + 1, j] = gl[j]
        H[n + j, n + j + 1] = H[n + j + 1, n + j] = gr[j]
    fz, e = 2 * n, 2 * n + 1
    w = config.g_I * float(channel_mode(1, z, N))
    H[n - 1, fz] = H[fz, n - 1] = w
    H[2 * n - 1, fz] = H[fz, 2 * n - 1] = (-1) ** (z - 1) * w
    J = config.channel.effective_J * float(channel_mode(m, z, N))
    H[fz, e] = H[e, fz] = J
    return EffectiveModel(matrix=H, n=n)


def register_coupling_matrix(n: int, g0: float) -> RegisterCouplingMatrix:
    g = register_couplings(n, g0)[:-1]
    A = np.diag(g, 1) + np.diag(g, -1)
    return RegisterCouplingMatrix(A=np.atleast_2d(A).astype(float), g0=g0)


def mirror_propagator_check(n: int, g0: float = 1.0) -> tuple[np.ndarray, float]:
    """Return exp(iA tau) at tau = pi/g0 and its max deviation from (-1)^(n-1) I."""
    A = register_coupling_matrix(n, g0).A
    U = expm(1j * A * (np.pi / g0))
    target = (-1) ** (n - 1) * np.eye(n)
    return U, float(np.max(np.abs(U - target)))


def dressed_splitting(config: SystemConfig) -> DressedSplitting:
    N, m = config.N, config.channel.m
    z = zero_mode_index(N)
    psi = float(channel_mode(m, z, N))
    if abs(psi) < 1e-12:
        psi = 0.0
    J = config.channel.effective_J
    # the {f_z, |e>} block is [[0, J psi], [J psi, 0]]
    lo, hi = np.linalg.eigvalsh(np.array([[0.0, J * psi], [J * psi, 0.0]]))
    return DressedSplitting(omega2=float(hi - lo), energies=(float(lo), float(hi)), m_parity_ok=m % 2 == 1)


