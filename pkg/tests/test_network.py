import numpy as np
import pytest

from ccarouter.dynamics import spectral_decompose, transition_amplitudes
from ccarouter.metrics import average_fidelity
from ccarouter.model import ChannelSpec, ConfigError, RegisterSpec, SystemConfig, build_full_hamiltonian
from ccarouter.network import (
    Interval,
    NetworkChannel,
    NetworkTopology,
    Schedule,
    build_network_hamiltonian,
    fig4_scenario,
    simulate_schedule,
)


def _pair(cfg: SystemConfig) -> NetworkTopology:
    ch = NetworkChannel(cfg.channel, 0, 1, cfg.g_I)
    return NetworkTopology((cfg.left, cfg.right), (ch,))


def test_two_register_network_is_full_model_permuted():
    cfg = SystemConfig.resonant(2, 7, 1e-3, m=3, J_I=0.05)
    topo = _pair(cfg)
    Hn = build_network_hamiltonian(topo, [True])
    Hf = build_full_hamiltonian(cfg)
    lay = cfg.layout
    # network order: l, r, channel, atom
    order = lay.left_indices + lay.right_indices + lay.channel_indices + [lay.atom]
    assert np.array_equal(Hn, Hf[np.ix_(order, order)])


def test_two_register_network_reproduces_transfer():
    cfg = SystemConfig.resonant(2, 7, 1e-3)
    topo = _pair(cfg)
    trace = simulate_schedule(topo, Schedule((Interval(cfg.tau, (False,)),)), times=[cfg.tau])
    eig = spectral_decompose(build_full_hamiltonian(cfg))
    amp = transition_amplitudes(eig, cfg.layout.left_indices, cfg.layout.right_indices, cfg.tau)
    assert trace.fidelities[0, 1] == pytest.approx(average_fidelity(amp).F, abs=1e-12)


def test_topology_validation():
    reg = RegisterSpec(2, 0.1)
    spec = ChannelSpec(7, m=3, J_I=0.05)
    with pytest.raises(ConfigError):
        NetworkChannel(spec, 1, 1, 1e-3)
    with pytest.raises(ConfigError, match="dangling"):
        NetworkTopology((reg, reg), (NetworkChannel(spec, 0, 2, 1e-3),))
    with pytest.raises(ConfigError, match="connected"):
        NetworkTopology((reg, reg, reg), (NetworkChannel(spec, 0, 1, 1e-3),))
    topo = NetworkTopology((reg, reg), (NetworkChannel(spec, 0, 1, 1e-3),))
    with pytest.raises(ConfigError):
        build_network_hamiltonian(topo, [True, False])
    with pytest.raises(ConfigError):
        simulate_schedule(topo, Schedule((Interval(1.0, (True, True)),)))
    with pytest.raises(ConfigError):
        Interval(0.0, (True,))


def test_fig4_scenario_shape():
    topo, sched = fig4_scenario()
    assert len(topo.registers) == 5 and len(topo.channels) == 8
    assert all(topo.degree(r) >= 3 for r in range(5))
    assert topo.dim == 10 + 56 + 8
    tau = sched.intervals[0].duration
    assert sched.total_duration == pytest.approx(6 * tau)
    open_ = [[c for c, a in enumerate(iv.atom_coupled) if not a] for iv in sched.intervals]
    assert open_ == [[], [0], [4], [5], [6], []]
    path = [(topo.channels[c].a, topo.channels[c].b) for c in (0, 4, 5, 6)]
    assert path == [(0, 1), (1, 2), (2, 3), (3, 4)]


def test_boundary_cavity_carries_one_bond_per_channel():
    topo, _ = fig4_scenario()
    H = build_network_hamiltonian(topo, [True] * 8)
    for r in range(5):
        d_n = topo.register_indices(r)[-1]
        interface = [i for i in np.flatnonzero(H[d_n]) if i not in topo.register_indices(r)]
        assert len(interface) == topo.degree(r)


def test_empty_schedule():
    topo, _ = fig4_scenario()
    trace = simulate_schedule(topo, Schedule(()))
    assert trace.times.tolist() == [0.0]
    assert trace.fidelities[0, 0] == pytest.approx(1.0)


@pytest.fixture(scope="module")
def fig4_trace():
    topo, sched = fig4_scenario()
    return topo, sched, simulate_schedule(topo, sched, alpha=np.array([0.6, 0.8j]))


def test_probability_conserved(fig4_trace):
    topo, sched, _ = fig4_trace
    from ccarouter.dynamics import piecewise_evolve

    cache = {}
    segs = []
    for iv in sched.intervals:
        cache.setdefault(iv.atom_coupled, spectral_decompose(build_network_hamiltonian(topo, iv.atom_coupled)))
        segs.append((cache[iv.atom_coupled], iv.duration))
    psi0 = np.zeros(topo.dim, complex)
    psi0[0] = 1
    for s in piecewise_evolve(segs, psi0, np.linspace(0, sched.total_duration, 50)):
        assert np.sum(np.abs(s.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-9)


def test_router_hand_off(fig4_trace):
    _, sched, trace = fig4_trace
    tau = sched.intervals[0].duration
    for k in range(1, 6):
        assert int(np.argmax(trace.at(k * tau))) == k - 1
    assert trace["R5"][-1] >= 0.99
    assert np.all(trace.fidelities <= 1 + 1e-10) and np.all(trace.fidelities >= 0)


def test_storage_keeps_photon_in_source(fig4_trace):
    # all atoms coupled: probability leaves R1 by at most 10 (g_I/J_I)^2
    topo, sched, trace = fig4_trace
    tau = sched.intervals[0].duration
    mask = trace.times <= tau
    bound = 10 * (1e-4 / 0.05) ** 2
    assert np.all(trace.populations[mask, 0] >= 1 - bound)
    assert trace["R1"][mask][-1] >= 0.999


def test_all_closed_storage_bound():
    topo, sched = fig4_scenario()
    tau = sched.intervals[0].duration
    closed = Schedule(tuple(Interval(tau, (True,) * 8) for _ in range(6)))
    trace = simulate_schedule(topo, closed, samples=121)
    # F_1 returns to 1 at every multiple of tau; populations never leak far
    for k in range(7):
        assert trace.at(k * tau)[0] >= 1 - 10 * (1e-4 / 0.05) ** 2
    assert np.all(trace.populations[:, 0] >= 1 - 10 * (1e-4 / 0.05) ** 2)
