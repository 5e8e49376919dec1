"""Command-line entry point: ``ccarouter {spectrum,sweep,switch,network}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics import spectral_decompose, transition_amplitudes
from .metrics import (
    RegimeError,
    average_fidelity,
    infidelity_upper_bound,
    monte_carlo_average,
    perturbative_leakage,
    site_leakage,
)
from .model import ConfigError, SystemConfig, build_full_hamiltonian, channel_energy, channel_mode, validity_report
from .network import DEFAULT_SAMPLES, simulate_schedule
from .scenario import ScenarioError, SweepSection, SystemSection, load_scenario

SPECTRUM_HEADER = ("k", "Lambda", "psi_1k")
SWEEP_HEADER = (
    "g_I",
    "xi_numeric",
    "xi_perturbative",
    "xi_leading",
    "xi_bound",
    "weak_coupling",
    "switch_regime",
)
SWITCH_HEADER = ("quantity", "value")


class ValidationError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_csv(header: Sequence[str], rows, out: Path | str | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


def cmd_spectrum(N: int, g_c: float = 1.0) -> list[tuple[int, float, float]]:
    k = np.arange(1, N + 1)
    lam = channel_energy(k, N, g_c)
    lam[np.abs(lam) < 1e-13] = 0.0
    psi = channel_mode(1, k, N)
    return [(int(a), float(b), float(c)) for a, b, c in zip(k, lam, psi)]


@dataclass(frozen=True)
class SweepRow:
    g_I: float
    xi_numeric: float
    xi_perturbative: float
    xi_leading: float
    xi_bound: float
    weak_coupling: bool
    switch_regime: bool

    def as_tuple(self):
        return (
            self.g_I,
            self.xi_numeric,
            self.xi_perturbative,
            self.xi_leading,
            self.xi_bound,
            self.weak_coupling,
            self.switch_regime,
        )


def sweep_point(config: SystemConfig, side: str) -> SweepRow:
    """Simulated and predicted infidelity of one operation at t = tau.

    ``xi_perturbative`` is 2*Delta_d; ``xi_leading`` is 4*Delta_d/n, which is
    what leakage confined to d_n gives when inserted in the average fidelity.
    """
    eig = spectral_decompose(build_full_hamiltonian(config))
    lay = config.layout
    amp = transition_amplitudes(eig, lay.left_indices, lay.register_indices(side), config.tau, target=side)
    xi = average_fidelity(amp).xi
    est = perturbative_leakage(config, side)
    rep = validity_report(config)
    return SweepRow(
        g_I=config.g_I,
        xi_numeric=xi,
        xi_perturbative=est.xi,
        xi_leading=4.0 * est.delta / config.n,
        xi_bound=infidelity_upper_bound(config, side),
        weak_coupling=rep.weak_coupling,
        switch_regime=rep.switch_regime,
    )


def cmd_sweep(system: SystemSection, sweep: SweepSection) -> list[SweepRow]:
    side = sweep.side
    if side == "r":
        system = SystemSection(**{**system.__dict__, "J_I": 0.0, "atom_coupled": False})
    elif system.J_I <= 0 or system.m % 2 == 0:
        raise ValidationError("reflection sweep needs J_I > 0 and an odd atom site m")
    else:
        system = SystemSection(**{**system.__dict__, "atom_coupled": True})
    return [sweep_point(system.config(float(g)), side) for g in sweep.grid()]


def cmd_switch(
    config: SystemConfig, t: float | None = None, mc_samples: int = 0, seed: int = 0
) -> list[tuple[str, object]]:
    """Report amplitudes, fidelities, site leakage and regime flags at time t (default tau)."""
    t = config.tau if t is None else t
    eig = spectral_decompose(build_full_hamiltonian(config))
    lay = config.layout
    rows: list[tuple[str, object]] = [("t", t), ("tau", config.tau), ("g0", config.g0)]
    for side in ("l", "r"):
        amp = transition_amplitudes(eig, lay.left_indices, lay.register_indices(side), t, target=side)
        fid = average_fidelity(amp)
        rows += [(f"F_{side}", fid.F), (f"xi_{side}", fid.xi)]
        for jp in range(config.n):
            for j in range(config.n):
                f = amp.values[jp, j]
                rows += [(f"f_{side}{jp + 1}_l{j + 1}_re", f.real), (f"f_{side}{jp + 1}_l{j + 1}_im", f.imag)]
        for j, eps in enumerate(site_leakage(amp), start=1):
            rows.append((f"epsilon_{side}{j}", eps))
        if mc_samples:
            mc = monte_carlo_average(amp, samples=mc_samples, seed=seed)
            rows += [(f"F_{side}_mc", mc.mean), (f"F_{side}_mc_stderr", mc.stderr)]
    try:
        rep = validity_report(config)
    except ConfigError:
        rep = None
    if rep is not None:
        rows += [("omega0", rep.omega0), ("omega1", rep.omega1), ("omega2", rep.omega2)]
        rows += list(rep.flags.items())
    return rows


def cmd_network(scenario_path: str, samples: int | None = None) -> tuple[list[str], list[list[float]]]:
    scen = load_scenario(scenario_path)
    if scen.network is None:
        raise ValidationError(f"{scenario_path}: missing required key 'network'")
    topo, schedule, source = scen.network.build(scen.units)
    samples = samples or scen.output.sample_points or DEFAULT_SAMPLES
    trace = simulate_schedule(topo, schedule, source=source, samples=samples)
    t = trace.times
    if scen.units == "tau" and schedule.intervals:
        t = t / (np.pi / topo.registers[source].g0)
    header = ["t"] + [f"F_{lab}" for lab in trace.labels]
    rows = [[ti, *f] for ti, f in zip(t, trace.fidelities)]
    return header, rows


def _system_from_args(args) -> SystemConfig:
    coupled = args.coupled if args.coupled is not None else args.J_I > 0
    return SystemConfig.resonant(
        args.n, args.N, args.g_I, m=args.m, J_I=args.J_I, atom_coupled=coupled, g_c=args.g_c, g0=args.g0
    )


def _add_system_flags(p, *, g_I=True):
    p.add_argument("--N", type=int, default=7, help="channel cavities (odd)")
    p.add_argument("--n", type=int, default=2, help="cavities per register")
    p.add_argument("--m", type=int, default=3, help="atom site in the channel")
    p.add_argument("--J-I", dest="J_I", type=float, default=0.0, help="atom-cavity coupling / g_c")
    p.add_argument("--g-c", dest="g_c", type=float, default=1.0)
    if g_I:
        p.add_argument("--g-I", dest="g_I", type=float, default=1e-3, help="register-channel coupling / g_c")
        p.add_argument("--g0", type=float, default=None, help="override the resonant register scale")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccarouter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bare channel spectrum and boundary mode amplitudes")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--g-c", dest="g_c", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("sweep", help="infidelity vs g_I with perturbative estimate and bound")
    p.add_argument("--scenario", help="scenario file or bundled name (fig2a, fig3b, ...)")
    p.add_argument("--side", choices=["l", "r"])
    _add_system_flags(p, g_I=False)
    p.add_argument("--g-I-min", dest="g_I_min", type=float, default=1e-4)
    p.add_argument("--g-I-max", dest="g_I_max", type=float, default=3e-2)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--linear", action="store_true", help="linear instead of log spacing")
    p.add_argument("--out", default=None)

    p = sub.add_parser("switch", help="swap / identity report at time t")
    _add_system_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--coupled", dest="coupled", action="store_true", default=None)
    g.add_argument("--uncoupled", dest="coupled", action="store_false")
    p.add_argument("--t", type=float, default=1.0, help="evolution time in units of tau")
    p.add_argument("--mc-samples", type=int, default=0, help="add a Monte-Carlo fidelity estimate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("network", help="fidelity traces of a scheduled multi-register network")
    p.add_argument("scenario", help="scenario file or bundled name (fig4)")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--out", default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum":
            write_csv(SPECTRUM_HEADER, cmd_spectrum(args.N, args.g_c), args.out)
        elif args.command == "sweep":
            if args.scenario:
                scen = load_scenario(args.scenario)
                if scen.system is None or scen.sweep is None:
                    raise ValidationError(f"{args.scenario}: sweep needs 'system' and 'sweep' sections")
                system, sweep = scen.system, scen.sweep
                out = args.out or scen.output.path
            else:
                if args.side is None:
                    raise ValidationError("--side is required without --scenario")
                system = SystemSection(N=args.N, n=args.n, m=args.m, J_I=args.J_I, g_c=args.g_c)
                sweep = SweepSection(args.side, args.g_I_min, args.g_I_max, args.points, not args.linear)
                out = args.out
            rows = cmd_sweep(system, sweep)
            write_csv(SWEEP_HEADER, [r.as_tuple() for r in rows], out)
        elif args.command == "switch":
            config = _system_from_args(args)
            rows = cmd_switch(config, args.t * config.tau, args.mc_samples, args.seed)
            write_csv(SWITCH_HEADER, rows, args.out)
        elif args.command == "network":
            header, rows = cmd_network(args.scenario, args.samples)
            write_csv(header, rows, args.out)
    except (ValidationError, ScenarioError, ConfigError, RegimeError) as exc:
        print(f"ccarouter {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
