import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccarouter.model import (
    BasisLayout,
    ChannelSpec,
    ConfigError,
    NoZeroModeError,
    RegisterSpec,
    SystemConfig,
    build_full_hamiltonian,
    channel_energy,
    channel_mode,
    channel_modes,
    mirror_permutation,
    register_couplings,
    register_spectrum,
    resonant_g0,
    validity_report,
    zero_mode_index,
)


def test_register_couplings_values():
    assert register_couplings(2, 1.0) == pytest.approx([1.0, np.sqrt(6) / 2])
    assert register_couplings(1, 1.0) == pytest.approx([np.sqrt(2) / 2])
    assert register_couplings(2, 3.0)[0] == pytest.approx(3.0)


@pytest.mark.parametrize("n, g0", [(0, 1.0), (2, 0.0), (2, -1.0)])
def test_register_couplings_rejects(n, g0):
    with pytest.raises(ConfigError):
        register_couplings(n, g0)


def test_register_spectrum():
    assert register_spectrum(2, 1.0) == pytest.approx([-1, 1])
    assert register_spectrum(3, 1.0) == pytest.approx([-2, 0, 2])
    lam = register_spectrum(9, 0.3)
    assert np.diff(lam) / (2 * 0.3) == pytest.approx(np.ones(8))
    assert lam.sum() == pytest.approx(0.0, abs=1e-12)


def test_channel_mode_and_energy():
    assert channel_mode(1, 4, 7) == pytest.approx(0.5)
    assert channel_mode(1, 1, 7) == pytest.approx(0.5 * np.sin(np.pi / 8))
    assert channel_mode(1, 1, 7) == pytest.approx(0.191342, abs=1e-6)
    assert channel_energy(4, 7) == pytest.approx(0.0, abs=1e-15)
    assert np.all(np.diff(channel_energy(np.arange(1, 8), 7)) < 0)
    with pytest.raises(IndexError):
        channel_mode(0, 1, 7)
    with pytest.raises(IndexError):
        channel_energy(8, 7)


@pytest.mark.parametrize("N", [1, 2, 7, 8, 51, 101])
def test_channel_modes_orthonormal_and_diagonalise(N):
    psi = channel_modes(N)
    assert np.max(np.abs(psi.T @ psi - np.eye(N))) < 1e-12
    chain = np.diag(np.ones(N - 1), 1) + np.diag(np.ones(N - 1), -1)
    lam = channel_energy(np.arange(1, N + 1), N)
    assert np.max(np.abs(psi.T @ chain @ psi - np.diag(lam))) < 1e-10
    assert lam == pytest.approx(-lam[::-1], abs=1e-12)


def test_zero_mode_index():
    assert zero_mode_index(7) == 4
    assert zero_mode_index(101) == 51
    with pytest.raises(NoZeroModeError, match="no zero mode"):
        zero_mode_index(6)


def test_resonant_g0_values():
    assert resonant_g0(0.1, 2, 7) == pytest.approx(0.1 * 0.5 * 2 / np.sqrt(6))
    assert resonant_g0(0.1, 2, 7) == pytest.approx(0.040825, abs=1e-6)
    assert resonant_g0(1.0, 1, 7) == pytest.approx(np.sqrt(2) / 2)
    with pytest.raises(NoZeroModeError):
        resonant_g0(0.1, 2, 8)


@settings(max_examples=200, deadline=None)
@given(
    g_I=st.floats(1e-6, 1.0),
    n=st.integers(1, 20),
    half=st.integers(0, 100),
)
def test_resonant_g0_round_trip(g_I, n, half):
    N = 2 * half + 1
    g0 = resonant_g0(g_I, n, N)
    g_n = register_couplings(n, g0)[-1]
    assert g_n == pytest.approx(g_I * channel_mode(1, zero_mode_index(N), N), rel=1e-14)


def test_specs_validate():
    with pytest.raises(ConfigError):
        RegisterSpec(0, 1.0)
    with pytest.raises(ConfigError):
        ChannelSpec(N=7, m=8)
    with pytest.raises(ConfigError):
        ChannelSpec(N=7, J_I=-1)
    reg = RegisterSpec(2, 0.1)
    with pytest.raises(ConfigError):
        SystemConfig(reg, RegisterSpec(3, 0.1), ChannelSpec(7), g_I=0.1)
    with pytest.raises(ConfigError):
        SystemConfig(reg, reg, ChannelSpec(7), g_I=0.0)
    # even N builds, but switching is refused
    cfg = SystemConfig(reg, reg, ChannelSpec(8), g_I=0.1)
    assert build_full_hamiltonian(cfg).shape == (13, 13)
    with pytest.raises(NoZeroModeError):
        validity_report(cfg)


def test_basis_layout():
    lay = BasisLayout(2, 7)
    assert lay.total_dim == 12
    idx = [lay.left(1), lay.left(2)] + [lay.cavity(i) for i in range(1, 8)] + [lay.right(1), lay.right(2), lay.atom]
    assert sorted(idx) == list(range(12))
    assert [lay.label(i) for i in (0, 2, 9, 11)] == ["l1", "c1", "r1", "e"]


def test_full_hamiltonian_smallest():
    cfg = SystemConfig(RegisterSpec(1, 1.0), RegisterSpec(1, 1.0), ChannelSpec(1), g_I=0.3)
    H = build_full_hamiltonian(cfg)
    expected = np.zeros((4, 4))
    expected[:3, :3] = [[0, 0.3, 0], [0.3, 0, 0.3], [0, 0.3, 0]]
    assert np.array_equal(H, expected)


def _edge_list_hamiltonian(cfg):
    """Independent assembly: explicit labelled edges placed through a name table."""
    n, N = cfg.n, cfg.N
    names = [f"l{j}" for j in range(1, n + 1)] + [f"c{i}" for i in range(1, N + 1)]
    names += [f"r{j}" for j in range(1, n + 1)] + ["e"]
    pos = {s: i for i, s in enumerate(names)}
    g0 = cfg.g0
    edges = []
    for j in range(1, n):
        gj = g0 * np.sqrt(j * (2 * n + 1 - j)) / 2
        edges += [(f"l{j}", f"l{j + 1}", gj), (f"r{j}", f"r{j + 1}", gj)]
    edges += [(f"c{i}", f"c{i + 1}", cfg.channel.g_c) for i in range(1, N)]
    edges += [(f"l{n}", "c1", cfg.g_I), (f"r{n}", f"c{N}", cfg.g_I)]
    if cfg.channel.atom_coupled:
        edges.append((f"c{cfg.channel.m}", "e", cfg.channel.J_I))
    H = np.zeros((len(names), len(names)))
    for a, b, w in edges:
        H[pos[a], pos[b]] += w
        H[pos[b], pos[a]] += w
    return H


@pytest.mark.parametrize("n, N, m, J", [(2, 7, 3, 0.0), (2, 7, 3, 0.05), (4, 11, 5, 0.2), (1, 3, 2, 0.1)])
def test_full_hamiltonian_matches_edge_list(n, N, m, J):
    cfg = SystemConfig.resonant(n, N, 0.01, m=m, J_I=J)
    H = build_full_hamiltonian(cfg)
    assert np.array_equal(H, H.T)
    assert np.all(np.diag(H) == 0)
    assert np.allclose(H, _edge_list_hamiltonian(cfg), atol=0, rtol=1e-15)
    bonds = np.count_nonzero(np.triu(H))
    assert bonds == 2 * (n - 1) + (N - 1) + 2 + (1 if J else 0)


def test_atom_uncoupled_zeroes_row():
    cfg = SystemConfig.resonant(2, 7, 0.01, m=3, J_I=0.05, atom_coupled=False)
    H = build_full_hamiltonian(cfg)
    assert not H[cfg.layout.atom].any()


@pytest.mark.parametrize("m, J, coupled", [(3, 0.05, False), (4, 0.05, True), (4, 0.0, False)])
def test_mirror_symmetry(m, J, coupled):
    cfg = SystemConfig.resonant(2, 7, 1e-3, m=m, J_I=J, atom_coupled=coupled)
    H = build_full_hamiltonian(cfg)
    M = mirror_permutation(cfg.layout)
    if coupled:
        # the atom sits on the reflection axis, so it maps to itself
        assert m == (7 + 1) // 2
    assert np.array_equal(H @ M, M @ H)


def test_mirror_broken_by_off_centre_atom():
    cfg = SystemConfig.resonant(2, 7, 1e-3, m=3, J_I=0.05)
    H = build_full_hamiltonian(cfg)
    M = mirror_permutation(cfg.layout)
    assert not np.array_equal(H @ M, M @ H)


def test_validity_report():
    cfg = SystemConfig.resonant(2, 7, 1e-3, m=3, J_I=0.05)
    rep = validity_report(cfg)
    assert rep.omega1 == pytest.approx(2 * np.cos(3 * np.pi / 8))
    assert rep.omega1 == pytest.approx(0.76537, abs=1e-5)
    assert rep.omega0 == pytest.approx(2 * cfg.g0)
    assert rep.omega2 == pytest.approx(0.05)
    assert rep.weak_coupling and rep.switch_regime and rep.m_parity_ok

    off = SystemConfig.resonant(2, 7, 1e-3, m=3, J_I=0.0)
    assert validity_report(off).omega2 == 0.0

    even = SystemConfig.resonant(2, 7, 1e-3, m=2, J_I=0.05)
    rep = validity_report(even)
    assert rep.omega2 == 0.0 and not rep.m_parity_ok

    strong = SystemConfig.resonant(2, 7, 0.5, m=3, J_I=0.05)
    rep = validity_report(strong)
    assert not rep.weak_coupling and not rep.switch_regime
