"""Single-excitation Hamiltonians for two registers joined by an atom-switched channel.

Energies are in units of the channel hopping ``g_c`` (default 1) and the
frame rotates at the common cavity frequency, so every diagonal entry is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ConfigError",
    "NoZeroModeError",
    "RegisterSpec",
    "ChannelSpec",
    "SystemConfig",
    "BasisLayout",
    "ValidityReport",
    "register_couplings",
    "register_spectrum",
    "channel_mode",
    "channel_modes",
    "channel_energy",
    "zero_mode_index",
    "resonant_g0",
    "build_full_hamiltonian",
    "mirror_permutation",
    "validity_report",
    "RATIO_THRESHOLD",
]

# "much smaller than" is flagged at one tenth
RATIO_THRESHOLD = 0.1


class ConfigError(ValueError):
    pass


class NoZeroModeError(ConfigError):
    def __init__(self, N: int):
        super().__init__(f"N={N} is even: no zero mode; switching protocol undefined")
        self.N = N


@dataclass(frozen=True)
class RegisterSpec:
    n: int
    g0: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"register needs n >= 1 cavities, got {self.n!r}")
        if not self.g0 > 0:
            raise ConfigError(f"register coupling scale g0 must be positive, got {self.g0!r}")

    @property
    def couplings(self) -> np.ndarray:
        return register_couplings(self.n, self.g0)

    @property
    def spectrum(self) -> np.ndarray:
        return register_spectrum(self.n, self.g0)


@dataclass(frozen=True)
class ChannelSpec:
    N: int
    m: int = 1
    J_I: float = 0.0
    atom_coupled: bool = False
    g_c: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"channel needs N >= 1 cavities, got {self.N!r}")
        if not 1 <= self.m <= self.N:
            raise ConfigError(f"atom site m={self.m} outside [1, {self.N}]")
        if self.J_I < 0:
            raise ConfigError(f"J_I must be >= 0, got {self.J_I!r}")
        if not self.g_c > 0:
            raise ConfigError(f"g_c must be positive, got {self.g_c!r}")

    @property
    def effective_J(self) -> float:
        """Atom-cavity coupling actually present in the Hamiltonian."""
        return self.J_I if self.atom_coupled else 0.0

    @property
    def z(self) -> int:
        return zero_mode_index(self.N)

    def with_atom(self, coupled: bool) -> ChannelSpec:
        return replace(self, atom_coupled=bool(coupled))


@dataclass(frozen=True)
class SystemConfig:
    left: RegisterSpec
    right: RegisterSpec
    channel: ChannelSpec
    g_I: float

    def __post_init__(self):
        if self.left.n != self.right.n:
            raise ConfigError(f"registers must be identical: n={self.left.n} vs n={self.right.n}")
        if not self.g_I > 0:
            raise ConfigError(f"g_I must be positive, got {self.g_I!r}")

    @classmethod
    def resonant(
        cls,
        n: int,
        N: int,
        g_I: float,
        *,
        m: int = 1,
        J_I: float = 0.0,
        atom_coupled: bool | None = None,
        g_c: float = 1.0,
        g0: float | None = None,
    ) -> SystemConfig:
        """Build a config whose g0 satisfies the transfer condition g_I psi_{1,z} = g_n.

        ``atom_coupled`` defaults to ``J_I > 0``.  Passing ``g0`` overrides the
        resonance condition.
        """
        if atom_coupled is None:
            atom_coupled = J_I > 0
        channel = ChannelSpec(N=N, m=m, J_I=J_I, atom_coupled=atom_coupled, g_c=g_c)
        if g0 is None:
            g0 = resonant_g0(g_I, n, N)
        reg = RegisterSpec(n=n, g0=g0)
        return cls(left=reg, right=reg, channel=channel, g_I=g_I)

    @property
    def n(self) -> int:
        return self.left.n

    @property
    def N(self) -> int:
        return self.channel.N

    @property
    def g0(self) -> float:
        return self.left.g0

    @property
    def tau(self) -> float:
        """Transfer time pi/g0."""
        return np.pi / self.g0

    @property
    def layout(self) -> BasisLayout:
        return BasisLayout(self.n, self.N)

    def with_atom(self, coupled: bool) -> SystemConfig:
        return replace(self, channel=self.channel.with_atom(coupled))


@dataclass(frozen=True)
class BasisLayout:
    """Index map ``l_1..l_n, c_1..c_N, r_1..r_n, |e>`` onto ``0..2n+N``."""

    n: int
    N: int

    @property
    def total_dim(self) -> int:
        return 2 * self.n + self.N + 1

    def left(self, j: int) -> int:
        self._check(j, self.n, "l")
        return j - 1

    def cavity(self, i: int) -> int:
        self._check(i, self.N, "c")
        return self.n + i - 1

    def right(self, j: int) -> int:
        self._check(j, self.n, "r")
        return self.n + self.N + j - 1

    @property
    def atom(self) -> int:
        return 2 * self.n + self.N

    @property
    def left_indices(self) -> list[int]:
        return list(range(self.n))

    @property
    def right_indices(self) -> list[int]:
        return list(range(self.n + self.N, 2 * self.n + self.N))

    @property
    def channel_indices(self) -> list[int]:
        return list(range(self.n, self.n + self.N))

    def register_indices(self, side: str) -> list[int]:
        if side in ("l", "left"):
            return self.left_indices
        if side in ("r", "right"):
            return self.right_indices
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")

    def label(self, index: int) -> str:
        if not 0 <= index < self.total_dim:
            raise IndexError(index)
        if index < self.n:
            return f"l{index + 1}"
        if index < self.n + self.N:
            return f"c{index - self.n + 1}"
        if index < 2 * self.n + self.N:
            return f"r{index - self.n - self.N + 1}"
        return "e"

    @staticmethod
    def _check(j, top, name):
        if not 1 <= j <= top:
            raise IndexError(f"{name}_{j} outside 1..{top}")


@dataclass(frozen=True)
class ValidityReport:
    omega0: float
    omega1: float
    omega2: float
    weak_coupling: bool
    switch_regime: bool
    m_parity_ok: bool

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "weak_coupling": self.weak_coupling,
            "switch_regime": self.switch_regime,
            "m_parity_ok": self.m_parity_ok,
        }


def register_couplings(n: int, g0: float) -> np.ndarray:
    """Mirror-symmetric hoppings g_j = g0 sqrt(j(2n+1-j))/2 for j = 1..n.

    The first n-1 entries are the register bonds; the last is the interface
    value g_n used by the transfer condition.
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"n must be >= 1, got {n!r}")
    if not g0 > 0:
        raise ConfigError(f"g0 must be positive, got {g0!r}")
    j = np.arange(1, n + 1)
    return g0 * np.sqrt(j * (2 * n + 1 - j)) / 2


def register_spectrum(n: int, g0: float) -> np.ndarray:
    if int(n) != n or n < 1:
        raise ConfigError(f"n must be >= 1, got {n!r}")
    if not g0 > 0:
        raise ConfigError(f"g0 must be positive, got {g0!r}")
    q = np.arange(1, n + 1)
    return g0 * (2 * q - n - 1).astype(float)


def _check_mode_index(x, N, name):
    if int(N) != N or N < 1:
        raise ConfigError(f"N must be >= 1, got {N!r}")
    a = np.asarray(x)
    if np.any(a < 1) or np.any(a > N):
        raise IndexError(f"{name}={x} outside [1, {N}]")


def channel_mode(i, k, N: int):
    """Amplitude psi_{i,k} of bare-channel mode k on cavity i (vectorised)."""
    _check_mode_index(i, N, "i")
    _check_mode_index(k, N, "k")
    return np.sqrt(2.0 / (N + 1)) * np.sin(np.multiply(i, k) * np.pi / (N + 1))


def channel_modes(N: int) -> np.ndarray:
    """Full N x N matrix ``[psi_{i,k}]``; rows are sites, columns modes."""
    idx = np.arange(1, N + 1)
    return channel_mode(idx[:, None], idx[None, :], N)


def channel_energy(k, N: int, g_c: float = 1.0):
    _check_mode_index(k, N, "k")
    return 2.0 * g_c * np.cos(np.asarray(k) * np.pi / (N + 1))


def zero_mode_index(N: int) -> int:
    if int(N) != N or N < 1:
        raise ConfigError(f"N must be >= 1, got {N!r}")
    if N % 2 == 0:
        raise NoZeroModeError(N)
    return (N + 1) // 2


def resonant_g0(g_I: float, n: int, N: int) -> float:
    """g0 for which the interface hopping g_I psi_{1,z} equals g_n."""
    if not g_I > 0:
        raise ConfigError(f"g_I must be positive, got {g_I!r}")
    if int(n) != n or n < 1:
        raise ConfigError(f"n must be >= 1, got {n!r}")
    z = zero_mode_index(N)
    return float(2.0 * g_I * channel_mode(1, z, N) / np.sqrt(n * (n + 1)))


def build_full_hamiltonian(config: SystemConfig) -> np.ndarray:
    n, N = config.n, config.N
    lay = config.layout
    H = np.zeros((lay.total_dim, lay.total_dim))

    def bond(a, b, w):
        H[a, b] = H[b, a] = w

    gl = config.left.couplings
    gr = config.right.couplings
    for j in range(1, n):
        bond(lay.left(j), lay.left(j + 1), gl[j - 1])
        bond(lay.right(j), lay.right(j + 1), gr[j - 1])
    for i in range(1, N):
        bond(lay.cavity(i), lay.cavity(i + 1), config.channel.g_c)
    bond(lay.left(n), lay.cavity(1), config.g_I)
    bond(lay.right(n), lay.cavity(N), config.g_I)
    J = config.channel.effective_J
    if J:
        bond(lay.cavity(config.channel.m), lay.atom, J)
    return H


def mirror_permutation(layout: BasisLayout) -> np.ndarray:
    """Permutation matrix exchanging l_j <-> r_j and c_i <-> c_{N+1-i}."""
    perm = np.arange(layout.total_dim)
    for j in range(1, layout.n + 1):
        perm[layout.left(j)] = layout.right(j)
        perm[layout.right(j)] = layout.left(j)
    for i in range(1, layout.N + 1):
        perm[layout.cavity(i)] = layout.cavity(layout.N + 1 - i)
    M = np.zeros((layout.total_dim, layout.total_dim))
    M[perm, np.arange(layout.total_dim)] = 1.0
    return M


def validity_report(config: SystemConfig, ratio_threshold: float = RATIO_THRESHOLD) -> ValidityReport:
    N, m = config.N, config.channel.m
    z = zero_mode_index(N)
    g_c = config.channel.g_c
    lam = config.left.spectrum
    omega0 = float(abs(lam[0] - lam[-1]))
    # N = 1 has no neighbouring mode; treat the gap as infinite
    omega1 = float(abs(channel_energy(z + 1, N, g_c) - channel_energy(z, N, g_c))) if N > 1 else np.inf
    psi_mz = float(channel_mode(m, z, N))
    if abs(psi_mz) < 1e-12:
        psi_mz = 0.0
    J = config.channel.effective_J
    omega2 = 2.0 * J * abs(psi_mz)
    coupling = max(omega0, config.g_I * abs(float(channel_mode(1, z, N))), J * abs(psi_mz))
    return ValidityReport(
        omega0=omega0,
        omega1=omega1,
        omega2=omega2,
        weak_coupling=bool(coupling < ratio_threshold * omega1),
        switch_regime=bool(config.g0 < ratio_threshold * config.channel.J_I),
        m_parity_ok=bool(m % 2 == 1),
    )
