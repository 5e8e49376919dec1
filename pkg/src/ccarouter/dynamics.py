"""Exact time evolution of real-symmetric Hamiltonians by eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Eigensystem",
    "StateVector",
    "AmplitudeMatrix",
    "spectral_decompose",
    "propagator",
    "evolve_state",
    "transition_amplitudes",
    "piecewise_propagators",
    "piecewise_evolve",
]

SYMMETRY_TOL = 1e-12
NORM_TOL = 1e-8


@dataclass(frozen=True)
class Eigensystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    time: float = 0.0

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class AmplitudeMatrix:
    """``values[j', j]`` is the amplitude from ``source[j]`` to ``target[j']``."""

    values: np.ndarray
    source: str = "l"
    target: str = "l"
    time: float = 0.0

    @property
    def n(self) -> int:
        return self.values.shape[1]


def spectral_decompose(H: np.ndarray) -> Eigensystem:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {H.shape}")
    asym = np.max(np.abs(H - H.T)) if H.size else 0.0
    if asym > SYMMETRY_TOL:
        raise ValueError(f"Hamiltonian is not symmetric (max asymmetry {asym:.3e})")
    E, V = np.linalg.eigh(H)
    return Eigensystem(eigenvalues=E, eigenvectors=V)


def propagator(eig: Eigensystem, t: float) -> np.ndarray:
    """U(t) = V exp(-iEt) V^T."""
    V = eig.eigenvectors
    return (V * np.exp(-1j * eig.eigenvalues * t)) @ V.T


def evolve_state(eig: Eigensystem, psi0, t: float) -> StateVector:
    psi0 = np.asarray(psi0, dtype=complex)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalised (norm {norm:.12g})")
    return StateVector(_apply(eig, psi0, t), float(t))


def transition_amplitudes(
    eig: Eigensystem,
    source_indices: Sequence[int],
    target_indices: Sequence[int],
    t: float,
    *,
    source: str = "l",
    target: str = "l",
) -> AmplitudeMatrix:
    src = _check_indices(source_indices, eig.dim, "source")
    tgt = _check_indices(target_indices, eig.dim, "target")
    V = eig.eigenvectors
    phase = np.exp(-1j * eig.eigenvalues * t)
    block = (V[tgt] * phase) @ V[src].T
    return AmplitudeMatrix(block, source=source, target=target, time=float(t))


def _check_indices(indices, dim, name):
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate {name} indices: {idx}")
    if any(i < 0 or i >= dim for i in idx):
        raise IndexError(f"{name} indices {idx} outside [0, {dim})")
    return idx


def _segment_of(segments, sample_times):
    durations = np.array([d for _, d in segments], dtype=float)
    if np.any(durations <= 0):
        raise ValueError("segment durations must be positive")
    times = np.asarray(sample_times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("sample_times must be sorted")
    ends = np.cumsum(durations)
    total = ends[-1]
    if times.size and (times[0] < 0 or times[-1] > total * (1 + 1e-12)):
        raise ValueError(f"sample_times must lie in [0, {total}]")
    # a boundary time belongs to the segment that ends there
    seg = np.searchsorted(ends, times * (1 - 1e-14), side="left")
    seg = np.minimum(seg, len(segments) - 1)
    starts = ends - durations
    return times, seg, starts


def piecewise_propagators(
    segments: Sequence[tuple[Eigensystem, float]], sample_times
) -> list[np.ndarray]:
    """Propagators U(t) for a piecewise-constant schedule at each sample time."""
    if not segments:
        raise ValueError("segment list is empty")
    times, seg, starts = _segment_of(segments, sample_times)
    out = []
    head = np.eye(segments[0][0].dim, dtype=complex)
    done = 0
    for t, s in zip(times, seg):
        while done < s:
            eig, d = segments[done]
            head = propagator(eig, d) @ head
            done += 1
        out.append(propagator(segments[s][0], t - starts[s]) @ head)
    return out


def piecewise_evolve(
    segments: Sequence[tuple[Eigensystem, float]], psi0, sample_times
) -> list[StateVector]:
    if not segments:
        raise ValueError("segment list is empty")
    psi0 = np.asarray(psi0, dtype=complex)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalised (norm {norm:.12g})")
    times, seg, starts = _segment_of(segments, sample_times)
    out = []
    head = psi0
    done = 0
    for t, s in zip(times, seg):
        while done < s:
            eig, d = segments[done]
            head = _apply(eig, head, d)
            done += 1
        out.append(StateVector(_apply(segments[s][0], head, t - starts[s]), float(t)))
    return out


def _apply(eig, psi, t):
    V = eig.eigenvectors
    return V @ (np.exp(-1j * eig.eigenvalues * t) * (V.T @ psi))
