"""Multi-register networks with one switchable atom per channel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import Eigensystem, piecewise_propagators, spectral_decompose
from .metrics import average_fidelity
from .model import ChannelSpec, ConfigError, RegisterSpec, resonant_g0

__all__ = [
    "NetworkChannel",
    "NetworkTopology",
    "Interval",
    "Schedule",
    "FidelityTrace",
    "build_network_hamiltonian",
    "simulate_schedule",
    "fig4_scenario",
    "FIG4_CHANNELS",
    "DEFAULT_SAMPLES",
]

DEFAULT_SAMPLES = 600

# (a, b) register pairs, 1-based, for C1..C8.  C1, C5, C6, C7 form the
# R1->R2->R3->R4->R5 path; the other four give every register degree >= 3.
FIG4_CHANNELS = (
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 5),
    (2, 3),
    (3, 4),
    (4, 5),
    (3, 5),
)


@dataclass(frozen=True)
class NetworkChannel:
    """Channel joining register ``a`` (at cavity 1) to register ``b`` (at cavity N)."""

    spec: ChannelSpec
    a: int
    b: int
    g_I: float

    def __post_init__(self):
        if self.a == self.b:
            raise ConfigError(f"channel endpoints must differ, got {self.a} twice")
        if not self.g_I > 0:
            raise ConfigError(f"g_I must be positive, got {self.g_I!r}")


@dataclass(frozen=True)
class NetworkTopology:
    registers: tuple[RegisterSpec, ...]
    channels: tuple[NetworkChannel, ...]
    labels: tuple[str, ...] = ()
    channel_labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"R{i + 1}" for i in range(len(self.registers))))
        if not self.channel_labels:
            object.__setattr__(self, "channel_labels", tuple(f"C{i + 1}" for i in range(len(self.channels))))
        if len(self.labels) != len(self.registers):
            raise ConfigError("one label per register required")
        if len(self.channel_labels) != len(self.channels):
            raise ConfigError("one label per channel required")
        R = len(self.registers)
        for lab, ch in zip(self.channel_labels, self.channels):
            for end in (ch.a, ch.b):
                if not 0 <= end < R:
                    raise ConfigError(f"channel {lab} has dangling endpoint {end} (registers 0..{R - 1})")
        if R > 1 and not self._connected():
            raise ConfigError("network graph is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for ch in self.channels:
                for x, y in ((ch.a, ch.b), (ch.b, ch.a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == len(self.registers)

    @property
    def register_offsets(self) -> list[int]:
        return list(np.cumsum([0] + [r.n for r in self.registers])[:-1])

    @property
    def channel_offsets(self) -> list[int]:
        base = sum(r.n for r in self.registers)
        return list(base + np.cumsum([0] + [c.spec.N for c in self.channels])[:-1])

    @property
    def atom_offsets(self) -> list[int]:
        base = sum(r.n for r in self.registers) + sum(c.spec.N for c in self.channels)
        return [base + i for i in range(len(self.channels))]

    @property
    def dim(self) -> int:
        return sum(r.n for r in self.registers) + sum(c.spec.N + 1 for c in self.channels)

    def register_indices(self, r: int) -> list[int]:
        off = self.register_offsets[r]
        return list(range(off, off + self.registers[r].n))

    def degree(self, r: int) -> int:
        return sum((ch.a == r) + (ch.b == r) for ch in self.channels)


@dataclass(frozen=True)
class Interval:
    duration: float
    atom_coupled: tuple[bool, ...]

    def __post_init__(self):
        if not self.duration > 0:
            raise ConfigError(f"interval duration must be positive, got {self.duration!r}")
        object.__setattr__(self, "atom_coupled", tuple(bool(a) for a in self.atom_coupled))


@dataclass(frozen=True)
class Schedule:
    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        widths = {len(iv.atom_coupled) for iv in self.intervals}
        if len(widths) > 1:
            raise ConfigError(f"intervals disagree on channel count: {sorted(widths)}")

    @property
    def total_duration(self) -> float:
        return float(sum(iv.duration for iv in self.intervals))

    @property
    def boundaries(self) -> np.ndarray:
        return np.cumsum([iv.duration for iv in self.intervals])


@dataclass(frozen=True)
class FidelityTrace:
    times: np.ndarray
    fidelities: np.ndarray  # (len(times), registers)
    labels: tuple[str, ...]
    populations: np.ndarray | None = field(default=None)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.fidelities[:, self.labels.index(label)]

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        return self.fidelities[i]


def build_network_hamiltonian(topology: NetworkTopology, atom_states: Sequence[bool]) -> np.ndarray:
    if len(atom_states) != len(topology.channels):
        raise ConfigError(
            f"{len(atom_states)} atom states given for {len(topology.channels)} channels"
        )
    H = np.zeros((topology.dim, topology.dim))

    def bond(a, b, w):
        H[a, b] = H[b, a] = w

    for r, reg in enumerate(topology.registers):
        off = topology.register_offsets[r]
        for j, g in enumerate(reg.couplings[:-1]):
            bond(off + j, off + j + 1, g)
    for c, (ch, coupled) in enumerate(zip(topology.channels, atom_states)):
        off = topology.channel_offsets[c]
        N = ch.spec.N
        for i in range(N - 1):
            bond(off + i, off + i + 1, ch.spec.g_c)
        na = topology.register_indices(ch.a)[-1]
        nb = topology.register_indices(ch.b)[-1]
        bond(na, off, ch.g_I)
        bond(nb, off + N - 1, ch.g_I)
        if coupled and ch.spec.J_I:
            bond(off + ch.spec.m - 1, topology.atom_offsets[c], ch.spec.J_I)
    return H


def simulate_schedule(
    topology: NetworkTopology,
    schedule: Schedule,
    source: int = 0,
    alpha=None,
    times=None,
    samples: int = DEFAULT_SAMPLES,
) -> FidelityTrace:
    """Average fidelity between the input of ``source`` and every register over time.

    ``alpha`` only feeds the per-register populations; the fidelities are
    input-state averages.  ``times`` defaults to ``samples`` uniform points
    over the whole schedule.
    """
    R = len(topology.registers)
    src = topology.register_indices(source)
    n_src = len(src)
    if alpha is None:
        alpha = np.zeros(n_src, dtype=complex)
        alpha[0] = 1.0
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (n_src,) or abs(np.linalg.norm(alpha) - 1) > 1e-8:
        raise ValueError("alpha must be a normalised vector over the source register")
    for iv in schedule.intervals:
        if len(iv.atom_coupled) != len(topology.channels):
            raise ConfigError(
                f"schedule lists {len(iv.atom_coupled)} atoms but topology has {len(topology.channels)} channels"
            )

    if not schedule.intervals:
        times = np.array([0.0])
        props = [np.eye(topology.dim, dtype=complex)]
    else:
        if times is None:
            times = np.linspace(0.0, schedule.total_duration, samples)
        times = np.asarray(times, dtype=float)
        cache: dict[tuple[bool, ...], Eigensystem] = {}
        segments = []
        for iv in schedule.intervals:
            if iv.atom_coupled not in cache:
                cache[iv.atom_coupled] = spectral_decompose(build_network_hamiltonian(topology, iv.atom_coupled))
            segments.append((cache[iv.atom_coupled], iv.duration))
        props = piecewise_propagators(segments, times)

    fid = np.zeros((len(times), R))
    pops = np.zeros((len(times), R))
    for s, U in enumerate(props):
        cols = U[:, src]
        psi = cols @ alpha
        for r in range(R):
            idx = topology.register_indices(r)
            pops[s, r] = np.sum(np.abs(psi[idx]) ** 2)
            if len(idx) == n_src:
                fid[s, r] = average_fidelity(cols[idx]).F
            else:
                fid[s, r] = np.nan
    return FidelityTrace(times=times, fidelities=fid, labels=topology.labels, populations=pops)


def fig4_scenario(
    g_I: float = 1e-4,
    J_I: float = 0.05,
    N: int = 7,
    n: int = 2,
    m: int = 3,
    channels: Sequence[tuple[int, int]] = FIG4_CHANNELS,
    path: Sequence[int] = (1, 5, 6, 7),
) -> tuple[NetworkTopology, Schedule]:
    """Five registers, eight channels, photon routed R1 -> R2 -> R3 -> R4 -> R5.

    ``channels`` holds 1-based register pairs and ``path`` the 1-based channels
    opened one per interval after an initial storage interval; a final
    storage interval closes the schedule.  Durations are tau = pi/g0.
    """
    g0 = resonant_g0(g_I, n, N)
    tau = np.pi / g0
    reg = RegisterSpec(n=n, g0=g0)
    spec = ChannelSpec(N=N, m=m, J_I=J_I, atom_coupled=True)
    chans = tuple(NetworkChannel(spec, a - 1, b - 1, g_I) for a, b in channels)
    topo = NetworkTopology(registers=(reg,) * 5, channels=chans)
    closed = (True,) * len(chans)
    intervals = [Interval(tau, closed)]
    for c in path:
        state = list(closed)
        state[c - 1] = False
        intervals.append(Interval(tau, tuple(state)))
    intervals.append(Interval(tau, closed))
    return topo, Schedule(tuple(intervals))
