"""JSON scenario files: schema validation, typed sections and round-tripping."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .model import ChannelSpec, ConfigError, RegisterSpec, SystemConfig, resonant_g0
from .network import Interval, NetworkChannel, NetworkTopology, Schedule

__all__ = [
    "ScenarioError",
    "Scenario",
    "SystemSection",
    "SweepSection",
    "NetworkSection",
    "RegisterEntry",
    "ChannelEntry",
    "IntervalEntry",
    "OutputSection",
    "SCHEMA",
    "parse_scenario",
    "load_scenario",
    "bundled_scenarios",
]

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int1 = {"type": "integer", "minimum": 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj(
    {
        "units": {"enum": ["tau", "1/g_c"]},
        "description": {"type": "string"},
        "system": _obj(
            {
                "N": _int1,
                "n": _int1,
                "m": _int1,
                "J_I": {"type": "number", "minimum": 0},
                "g_I": _pos,
                "g_c": _pos,
                "g0": _pos,
                "atom_coupled": {"type": "boolean"},
            },
            required=("N", "n"),
        ),
        "sweep": _obj(
            {
                "side": {"enum": ["l", "r"]},
                "g_I_min": _pos,
                "g_I_max": _pos,
                "points": _int1,
                "log_scale": {"type": "boolean"},
            },
            required=("side", "g_I_min", "g_I_max", "points"),
        ),
        "network": _obj(
            {
                "g_I": _pos,
                "g0": _pos,
                "source": {"type": "string"},
                "registers": {
                    "type": "array",
                    "minItems": 1,
                    "items": _obj({"label": {"type": "string"}, "n": _int1}, required=("label", "n")),
                },
                "channels": {
                    "type": "array",
                    "items": _obj(
                        {
                            "label": {"type": "string"},
                            "between": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                            "N": _int1,
                            "m": _int1,
                            "J_I": {"type": "number", "minimum": 0},
                            "g_c": _pos,
                            "g_I": _pos,
                        },
                        required=("label", "between", "N", "m", "J_I"),
                    ),
                },
                "schedule": {
                    "type": "array",
                    "items": _obj(
                        {"duration": _pos, "uncoupled": {"type": "array", "items": {"type": "string"}}},
                        required=("duration",),
                    ),
                },
            },
            required=("registers", "channels", "schedule"),
        ),
        "output": _obj({"path": {"type": "string"}, "sample_points": _int1}),
    },
    required=("units",),
)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SystemSection:
    N: int
    n: int
    m: int = 1
    J_I: float = 0.0
    g_I: float | None = None
    g_c: float = 1.0
    g0: float | None = None
    atom_coupled: bool | None = None

    def config(self, g_I: float | None = None) -> SystemConfig:
        g_I = self.g_I if g_I is None else g_I
        if g_I is None:
            raise ScenarioError("system.g_I: required when no sweep supplies it")
        return SystemConfig.resonant(
            self.n, self.N, g_I, m=self.m, J_I=self.J_I, atom_coupled=self.atom_coupled, g_c=self.g_c, g0=self.g0
        )


@dataclass(frozen=True)
class SweepSection:
    side: str
    g_I_min: float
    g_I_max: float
    points: int
    log_scale: bool = True

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.g_I_min])
        if self.log_scale:
            return np.logspace(np.log10(self.g_I_min), np.log10(self.g_I_max), self.points)
        return np.linspace(self.g_I_min, self.g_I_max, self.points)


@dataclass(frozen=True)
class RegisterEntry:
    label: str
    n: int


@dataclass(frozen=True)
class ChannelEntry:
    label: str
    between: tuple[str, str]
    N: int
    m: int
    J_I: float
    g_c: float = 1.0
    g_I: float | None = None


@dataclass(frozen=True)
class IntervalEntry:
    duration: float
    uncoupled: tuple[str, ...] = ()


@dataclass(frozen=True)
class NetworkSection:
    registers: tuple[RegisterEntry, ...]
    channels: tuple[ChannelEntry, ...]
    schedule: tuple[IntervalEntry, ...]
    g_I: float | None = None
    g0: float | None = None
    source: str | None = None

    def _g_I(self, ch: ChannelEntry) -> float:
        g = ch.g_I if ch.g_I is not None else self.g_I
        if g is None:
            raise ScenarioError(f"network.channels[{ch.label}].g_I: no value and no network-level default")
        return g

    def g0_value(self) -> float:
        if self.g0 is not None:
            return self.g0
        if not self.channels:
            raise ScenarioError("network.g0: required when there are no channels to derive it from")
        first = self.channels[0]
        return resonant_g0(self._g_I(first), self.registers[0].n, first.N)

    def build(self, units: str) -> tuple[NetworkTopology, Schedule, int]:
        labels = [r.label for r in self.registers]
        if len(set(labels)) != len(labels):
            raise ScenarioError(f"network.registers: duplicate labels {labels}")
        g0 = self.g0_value()
        regs = tuple(RegisterSpec(n=r.n, g0=g0) for r in self.registers)
        chans = []
        for i, ch in enumerate(self.channels):
            where = f"network.channels[{i}]"
            try:
                a, b = (labels.index(x) for x in ch.between)
            except ValueError:
                raise ScenarioError(f"{where}.between: unknown register in {list(ch.between)}") from None
            try:
                spec = ChannelSpec(N=ch.N, m=ch.m, J_I=ch.J_I, atom_coupled=True, g_c=ch.g_c)
                chans.append(NetworkChannel(spec, a, b, self._g_I(ch)))
            except ConfigError as exc:
                raise ScenarioError(f"{where}: {exc}") from None
        clabels = [c.label for c in self.channels]
        if len(set(clabels)) != len(clabels):
            raise ScenarioError(f"network.channels: duplicate labels {clabels}")
        scale = np.pi / g0 if units == "tau" else 1.0
        intervals = []
        for i, iv in enumerate(self.schedule):
            unknown = [c for c in iv.uncoupled if c not in clabels]
            if unknown:
                raise ScenarioError(f"network.schedule[{i}].uncoupled: unknown channels {unknown}")
            intervals.append(Interval(iv.duration * scale, tuple(c not in iv.uncoupled for c in clabels)))
        try:
            topo = NetworkTopology(regs, tuple(chans), labels=tuple(labels), channel_labels=tuple(clabels))
        except ConfigError as exc:
            raise ScenarioError(f"network: {exc}") from None
        source = self.source or labels[0]
        if source not in labels:
            raise ScenarioError(f"network.source: unknown register {source!r}")
        return topo, Schedule(tuple(intervals)), labels.index(source)


@dataclass(frozen=True)
class OutputSection:
    path: str | None = None
    sample_points: int | None = None


@dataclass(frozen=True)
class Scenario:
    units: str
    description: str | None = None
    system: SystemSection | None = None
    sweep: SweepSection | None = None
    network: NetworkSection | None = None
    output: OutputSection = field(default_factory=OutputSection)

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items() if v is not None}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            return x

        return clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _load_json(text: str, name: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _validate(doc, name):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = err.json_path
            if err.validator == "additionalProperties":
                extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
                msg = f"unknown key(s) {extra}"
            elif err.validator == "required":
                msg = f"missing required key {err.message.split()[0]}"
            else:
                msg = err.message
            lines.append(f"{name}: {where}: {msg}")
        raise ScenarioError("\n".join(lines))


def parse_scenario(doc, name: str = "<scenario>") -> Scenario:
    """Build a :class:`Scenario` from a decoded JSON document or JSON text."""
    if isinstance(doc, (str, bytes)):
        doc = _load_json(doc, name)
    _validate(doc, name)
    system = SystemSection(**doc["system"]) if "system" in doc else None
    sweep = SweepSection(**doc["sweep"]) if "sweep" in doc else None
    network = None
    if "network" in doc:
        net = doc["network"]
        network = NetworkSection(
            registers=tuple(RegisterEntry(**r) for r in net["registers"]),
            channels=tuple(ChannelEntry(**{**c, "between": tuple(c["between"])}) for c in net["channels"]),
            schedule=tuple(
                IntervalEntry(iv["duration"], tuple(iv.get("uncoupled", ()))) for iv in net["schedule"]
            ),
            g_I=net.get("g_I"),
            g0=net.get("g0"),
            source=net.get("source"),
        )
    output = OutputSection(**doc.get("output", {}))
    return Scenario(
        units=doc["units"], description=doc.get("description"), system=system, sweep=sweep, network=network, output=output
    )


def bundled_scenarios() -> dict[str, Path]:
    root = resources.files("ccarouter") / "scenarios"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")}


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load a scenario from a path, or a bundled one by name (``fig4``)."""
    path = Path(path_or_name)
    if not path.exists():
        bundled = bundled_scenarios()
        if str(path_or_name) in bundled:
            path = bundled[str(path_or_name)]
        else:
            raise ScenarioError(f"{path_or_name}: no such file or bundled scenario ({', '.join(sorted(bundled))})")
    return parse_scenario(path.read_text(), name=str(path))
