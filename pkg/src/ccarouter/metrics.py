"""Haar-averaged fidelities, site leakage and the second-order leakage estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AmplitudeMatrix, Eigensystem, transition_amplitudes
from .model import BasisLayout, SystemConfig, channel_energy, channel_mode, zero_mode_index

__all__ = [
    "RegimeError",
    "FidelityResult",
    "LeakageEstimate",
    "MonteCarloEstimate",
    "average_fidelity",
    "haar_states",
    "monte_carlo_average",
    "monte_carlo_fidelity",
    "site_leakage",
    "perturbative_transmission_leakage",
    "perturbative_reflection_leakage",
    "perturbative_leakage",
    "infidelity_upper_bound",
]


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class FidelityResult:
    F: float
    side: str = "r"
    time: float = 0.0

    @property
    def xi(self) -> float:
        return 1.0 - self.F


@dataclass(frozen=True)
class LeakageEstimate:
    side: str
    delta: float
    per_mode: np.ndarray
    modes: np.ndarray

    @property
    def epsilon_n(self) -> float:
        """Predicted leakage 4*delta out of the boundary cavity d_n."""
        return 4.0 * self.delta

    @property
    def xi(self) -> float:
        """Weak-coupling infidelity 2*delta."""
        return 2.0 * self.delta


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int


def _values(amplitudes) -> np.ndarray:
    if isinstance(amplitudes, AmplitudeMatrix):
        return amplitudes.values
    return np.asarray(amplitudes)


def average_fidelity(amplitudes, n: int | None = None, *, side: str | None = None) -> FidelityResult:
    """Average of |<phi|out>|^2 over Haar-random inputs, from the amplitude block.

    F = (sum_{j,j'} |f_{j'j}|^2 + |tr f|^2) / (n(n+1)).
    """
    f = _values(amplitudes)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"amplitude matrix must be square, got shape {f.shape}")
    if n is None:
        n = f.shape[0]
    elif n != f.shape[0]:
        raise ValueError(f"n={n} does not match amplitude matrix of size {f.shape[0]}")
    F = (np.sum(np.abs(f) ** 2) + np.abs(np.trace(f)) ** 2) / (n * (n + 1))
    if isinstance(amplitudes, AmplitudeMatrix):
        side = side or amplitudes.target
        t = amplitudes.time
    else:
        t = 0.0
    return FidelityResult(F=float(F), side=side or "r", time=t)


def haar_states(n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Rows are Haar-random unit vectors in C^n."""
    z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def monte_carlo_average(amplitudes, samples: int = 10_000, seed: int = 0) -> MonteCarloEstimate:
    f = _values(amplitudes)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    alpha = haar_states(f.shape[1], samples, rng)
    overlap = np.einsum("si,ij,sj->s", alpha.conj(), f, alpha)
    vals = np.abs(overlap) ** 2
    stderr = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloEstimate(mean=float(vals.mean()), stderr=stderr, samples=samples)


def monte_carlo_fidelity(
    eig: Eigensystem, n: int, side: str, t: float, samples: int = 10_000, seed: int = 0
) -> MonteCarloEstimate:
    """Sampled counterpart of :func:`average_fidelity` for a two-register system."""
    N = eig.dim - 2 * n - 1
    if N < 1:
        raise ValueError(f"eigensystem of dim {eig.dim} cannot hold two registers of n={n}")
    lay = BasisLayout(n, N)
    amp = transition_amplitudes(eig, lay.left_indices, lay.register_indices(side), t)
    return monte_carlo_average(amp, samples=samples, seed=seed)


def site_leakage(amplitudes) -> np.ndarray:
    """epsilon_j = 1 - |f_{d_j, l_j}|^2 for each cavity j."""
    f = _values(amplitudes)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"amplitude matrix must be square, got shape {f.shape}")
    return 1.0 - np.abs(np.diag(f)) ** 2


def _tau(config, t):
    return config.tau if t is None else float(t)


def perturbative_transmission_leakage(config: SystemConfig, t: float | None = None) -> LeakageEstimate:
    n, N = config.n, config.N
    z = zero_mode_index(N)
    g_c = config.channel.g_c
    tau = _tau(config, t)
    k = np.arange(1, z)
    lam = channel_energy(k, N, g_c) if k.size else np.zeros(0)
    per_mode = (config.g_I * channel_mode(1, k, N) / lam) ** 2 if k.size else np.zeros(0)
    sign = (-1.0) ** (n + k + z)
    delta = float(np.sum(per_mode * (1 - sign * np.cos(lam * tau))))
    return LeakageEstimate(side="r", delta=delta, per_mode=per_mode, modes=k)


def _reflection_base(config: SystemConfig):
    N, m = config.N, config.channel.m
    z = zero_mode_index(N)
    J = config.channel.J_I
    psi_mz = float(channel_mode(m, z, N))
    if not config.channel.atom_coupled or J == 0 or abs(psi_mz) < 1e-12:
        raise RegimeError(
            "reflection regime undefined: needs a coupled atom with J_I > 0 on an odd site"
        )
    delta_z = 0.5 * (config.g_I * float(channel_mode(1, z, N)) / (J * psi_mz)) ** 2
    return z, J * psi_mz, delta_z


def perturbative_reflection_leakage(config: SystemConfig, t: float | None = None) -> LeakageEstimate:
    z, J_psi, delta_z = _reflection_base(config)
    tau = _tau(config, t)
    delta = delta_z * (1 - (-1) ** (config.n - 1) * np.cos(J_psi * tau))
    return LeakageEstimate(side="l", delta=float(delta), per_mode=np.array([delta_z]), modes=np.array([z]))


def perturbative_leakage(config: SystemConfig, side: str, t: float | None = None) -> LeakageEstimate:
    if side in ("r", "right"):
        return perturbative_transmission_leakage(config, t)
    if side in ("l", "left"):
        return perturbative_reflection_leakage(config, t)
    raise ValueError(f"side must be 'l' or 'r', got {side!r}")


def infidelity_upper_bound(config: SystemConfig, side: str) -> float:
    """(8/n) * (Delta_z^l for reflection, or sum_{k<z} Delta_k^r for transmission)."""
    if side in ("r", "right"):
        total = float(np.sum(perturbative_transmission_leakage(config).per_mode))
    elif side in ("l", "left"):
        total = _reflection_base(config)[2]
    else:
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")
    return 8.0 / config.n * total
