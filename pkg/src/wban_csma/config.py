"""Scenario and sweep configuration files.

The grammar is INI-style key/value sections::

    [scenario]
    nodes = 2 2 2 2 2 2 2 2     # per-UP counts; or nodes_per_up = 2
    arrival_rates = 2.0         # pkts/s, scalar or 8 values
    ber = 2e-5
    payload_bytes = 100
    eap1_len = 0.1              # seconds
    rap1_len = 0.8
    mechanism = rtscts          # basic | rtscts
    traffic = saturated         # saturated | nonsaturated

    [phy]                       # optional overrides of the defaults
    sifs = 75e-6
    ...                         # any PhyMacConfig field name

    [up3]                       # optional per-priority overrides
    cw_min = 8
    cw_max = 16
    m = 2
    x = 5

    [sweep]                     # presence turns the file into a sweep
    parameter = arrival_rate    # arrival_rate | ber | payload_bytes |
                                # rap1_len | node_count | mechanism
    values = 0.5 1.0 1.5 2.0
    replications = 20
    seed = 1

Unset scenario/PHY/priority keys fall back to the built-in defaults.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigParseError, ValidationError
from .params import (
    DEFAULT_PHY,
    DEFAULT_UP_TABLE,
    NUM_PRIORITIES,
    Mechanism,
    PhyMacConfig,
    Scenario,
    Traffic,
    UserPriorityParams,
)


class SweepParameter(Enum):
    ARRIVAL_RATE = "arrival_rate"
    BER = "ber"
    PAYLOAD_BYTES = "payload_bytes"
    RAP1_LEN = "rap1_len"
    NODE_COUNT = "node_count"
    MECHANISM = "mechanism"


@dataclass(frozen=True)
class SweepSpec:
    """A base scenario plus one swept parameter."""

    base: Scenario
    parameter: SweepParameter
    values: tuple
    replications: int = 20
    seed: int = 1

    def __post_init__(self):
        if not self.values:
            raise ValidationError("sweep values must be non-empty")
        if self.replications < 1:
            raise ValidationError("replications must be >= 1")
        for v in self.values:
            apply_sweep_value(self.base, self.parameter, v)

    def scenarios(self):
        return [apply_sweep_value(self.base, self.parameter, v) for v in self.values]


def apply_sweep_value(base: Scenario, parameter: SweepParameter, value) -> Scenario:
    """Scenario obtained by overriding one parameter of the base."""
    if parameter is SweepParameter.ARRIVAL_RATE:
        rate = float(value)
        if rate < 0:
            raise ValidationError("arrival rates must be nonnegative")
        return base.replace(arrival_rates=rate)
    if parameter is SweepParameter.BER:
        return base.replace(ber=float(value))
    if parameter is SweepParameter.PAYLOAD_BYTES:
        return base.replace(payload_bytes=int(value))
    if parameter is SweepParameter.RAP1_LEN:
        return base.replace(rap1_len=float(value))
    if parameter is SweepParameter.NODE_COUNT:
        total = int(value)
        active = base.active_priorities()
        if not active:
            raise ValidationError("node_count sweep needs at least one active priority")
        if total % len(active):
            raise ValidationError(
                f"node count {total} not divisible by the {len(active)} active priorities"
            )
        per = total // len(active)
        counts = tuple(per if i in active else 0 for i in range(NUM_PRIORITIES))
        return base.replace(node_counts=counts)
    if parameter is SweepParameter.MECHANISM:
        if isinstance(value, Mechanism):
            return base.replace(mechanism=value)
        return base.replace(mechanism=_parse_enum(Mechanism, str(value), "mechanism"))
    raise ValidationError(f"unknown sweep parameter {parameter}")


def _parse_enum(enum_cls, text: str, label: str):
    def norm(s):
        return s.strip().lower().replace("-", "").replace("_", "").replace("/", "")

    normalized = norm(text)
    for member in enum_cls:
        if norm(member.value) == normalized:
            return member
    allowed = ", ".join(m.value for m in enum_cls)
    raise ValidationError(f"{label} must be one of: {allowed} (got {text!r})")


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def parse_config(path):
    """Read a config file into a Scenario, or a SweepSpec when a [sweep]
    section is present."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as handle:
            parser.read_file(handle, source=str(path))
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigParseError(str(exc)) from exc
    try:
        scenario = _scenario_from(parser)
        if parser.has_section("sweep"):
            return _sweep_from(parser, scenario)
        return scenario
    except (ValueError, KeyError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc


def _scenario_from(parser: configparser.ConfigParser) -> Scenario:
    phy_kwargs = {}
    if parser.has_section("phy"):
        int_fields = {
            "preamble_bits",
            "phy_header_bits",
            "mac_header_bits",
            "fcs_bits",
            "ctrl_frame_bits",
            "retry_limit",
        }
        known = {f.name for f in dataclasses.fields(PhyMacConfig)}
        for key, raw in parser.items("phy"):
            if key not in known:
                raise ValidationError(f"unknown [phy] key {key!r}")
            phy_kwargs[key] = int(float(raw)) if key in int_fields else float(raw)
    phy = PhyMacConfig(**phy_kwargs) if phy_kwargs else DEFAULT_PHY

    table = list(DEFAULT_UP_TABLE)
    for i in range(NUM_PRIORITIES):
        section = f"up{i}"
        if parser.has_section(section):
            row = {
                k: int(float(v)) for k, v in parser.items(section)
            }
            base = table[i]
            table[i] = UserPriorityParams(
                priority=i,
                cw_min=row.get("cw_min", base.cw_min),
                cw_max=row.get("cw_max", base.cw_max),
                m=row.get("m", base.m),
                x=row.get("x", base.x),
            )

    kwargs = {"phy": phy, "up_table": tuple(table)}
    sec = parser["scenario"] if parser.has_section("scenario") else {}
    if "nodes" in sec:
        counts = _ints(sec["nodes"])
        if len(counts) != NUM_PRIORITIES:
            raise ValidationError("nodes must list 8 per-priority counts")
        kwargs["node_counts"] = tuple(counts)
    elif "nodes_per_up" in sec:
        kwargs["node_counts"] = (int(sec["nodes_per_up"]),) * NUM_PRIORITIES
    else:
        kwargs["node_counts"] = (2,) * NUM_PRIORITIES
    if "arrival_rates" in sec:
        rates = _floats(sec["arrival_rates"])
        kwargs["arrival_rates"] = rates[0] if len(rates) == 1 else tuple(rates)
    if "ber" in sec:
        kwargs["ber"] = float(sec["ber"])
    if "payload_bytes" in sec:
        kwargs["payload_bytes"] = int(sec["payload_bytes"])
    if "eap1_len" in sec:
        kwargs["eap1_len"] = float(sec["eap1_len"])
    if "rap1_len" in sec:
        kwargs["rap1_len"] = float(sec["rap1_len"])
    if "mechanism" in sec:
        kwargs["mechanism"] = _parse_enum(Mechanism, sec["mechanism"], "mechanism")
    if "traffic" in sec:
        kwargs["traffic"] = _parse_enum(Traffic, sec["traffic"], "traffic")
    return Scenario(**kwargs)


def _sweep_from(parser: configparser.ConfigParser, base: Scenario) -> SweepSpec:
    sec = parser["sweep"]
    if "parameter" not in sec:
        raise ValidationError("[sweep] section needs a 'parameter' key")
    parameter = _parse_enum(SweepParameter, sec["parameter"], "sweep parameter")
    raw_values = sec.get("values", "")
    if parameter is SweepParameter.MECHANISM:
        values = tuple(
            _parse_enum(Mechanism, tok, "mechanism") for tok in raw_values.split()
        )
    elif parameter in (SweepParameter.PAYLOAD_BYTES, SweepParameter.NODE_COUNT):
        values = tuple(_ints(raw_values))
    else:
        values = tuple(_floats(raw_values))
    return SweepSpec(
        base=base,
        parameter=parameter,
        values=values,
        replications=sec.getint("replications", 20),
        seed=sec.getint("seed", 1),
    )
