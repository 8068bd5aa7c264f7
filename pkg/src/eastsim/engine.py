"""Round-based simulation driver.

One run deploys the nodes, senses temperatures and forms the A/B/C
partition (the initial phase), then repeats for every round:

    sense -> open-loop compensate -> move -> presence / n_c -> assign -> account -> record
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import controller as ctl
from .errors import ConfigError
from .linkmodel import RadioConstants, required_tx_power, temp_to_rssi_loss
from .regioning import (
    REGIONS,
    RegionPartition,
    current_counts,
    partition,
    presence,
    prr,
    rssi_census,
)
from .topology import MobilitySchedule, Network, deploy, link_distance, reference_waypoints, step_nodes

REF_MOBILITY_ALIASES = {
    "static": "static",
    "center": "center-hold",
    "center-hold": "center-hold",
    "perimeter": "perimeter-circuit",
    "perimeter-circuit": "perimeter-circuit",
}
NODE_MOBILITY_KINDS = ("static", "random-displacement")
TEMP_PROCESSES = ("static-field", "per-round-jitter")


@dataclass(frozen=True)
class TemperatureProcess:
    """``static-field`` keeps each node's initial draw; ``per-round-jitter``
    perturbs that draw with fresh Gaussian noise every round (clipped)."""

    kind: str = "static-field"
    sigma: float = 0.5
    t_min: float = -10.0
    t_max: float = 53.0


@dataclass(frozen=True)
class SimConfig:
    nodes: int = 100
    rounds: int = 1200
    side: float = 100.0
    temp_min: float = -10.0
    temp_max: float = 53.0
    radio: RadioConstants = field(default_factory=RadioConstants)
    scheme: str = ctl.EAST
    node_mobility: str = "random-displacement"
    node_step: float = 2.0
    ref_mobility: str = "static"
    ref_x: float = 0.0
    ref_y: float = 0.0
    ref_range: float = math.inf
    temp_process: str = "static-field"
    temp_jitter: float = 0.5
    repartition_every: int = 0
    band_halfwidth: float = 2.0
    desired_offset: int = 5
    seed: int = 42

    def validate(self) -> "SimConfig":
        if self.nodes < 1:
            raise ConfigError("nodes must be >= 1")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if not self.side > 0:
            raise ConfigError("side must be positive")
        if not (math.isfinite(self.temp_min) and math.isfinite(self.temp_max) and self.temp_min <= self.temp_max):
            raise ConfigError("temperature range must be finite and ordered")
        if self.scheme not in ctl.SCHEMES:
            raise ConfigError(f"scheme must be one of {', '.join(ctl.SCHEMES)}")
        if self.node_mobility not in NODE_MOBILITY_KINDS:
            raise ConfigError(f"node_mobility must be one of {', '.join(NODE_MOBILITY_KINDS)}")
        if self.node_step < 0:
            raise ConfigError("node_step must be >= 0")
        if self.ref_mobility not in REF_MOBILITY_ALIASES:
            raise ConfigError(f"ref_mobility must be one of {', '.join(REF_MOBILITY_ALIASES)}")
        if not (0 <= self.ref_x <= self.side and 0 <= self.ref_y <= self.side):
            raise ConfigError("reference point must lie inside the field")
        if not self.ref_range > 0:
            raise ConfigError("ref_range must be positive")
        if self.temp_process not in TEMP_PROCESSES:
            raise ConfigError(f"temp_process must be one of {', '.join(TEMP_PROCESSES)}")
        if self.temp_jitter < 0:
            raise ConfigError("temp_jitter must be >= 0")
        if self.repartition_every < 0:
            raise ConfigError("repartition_every must be >= 0")
        if self.band_halfwidth < 0:
            raise ConfigError("band_halfwidth must be >= 0")
        if self.desired_offset < 0:
            raise ConfigError("desired_offset must be >= 0")
        return self

    def node_schedule(self) -> MobilitySchedule:
        return MobilitySchedule(kind=self.node_mobility, step=self.node_step, side=self.side)

    def reference_schedule(self) -> MobilitySchedule:
        return MobilitySchedule(
            kind=REF_MOBILITY_ALIASES[self.ref_mobility],
            point=(self.ref_x, self.ref_y),
            total_rounds=self.rounds,
            side=self.side,
        )

    def temperature_process(self) -> TemperatureProcess:
        return TemperatureProcess(self.temp_process, self.temp_jitter, self.temp_min, self.temp_max)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radio"] = asdict(self.radio)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        radio = d.pop("radio", None)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**d)
        if radio is not None:
            cfg = replace(cfg, radio=RadioConstants(**radio))
        return cfg


@dataclass(frozen=True)
class RegionMetrics:
    count: int
    n_c: int
    n_d: int
    threshold: float
    p_save_levels: float
    p_save_db: float
    prr: float
    level_sum: float
    p_save_max: float


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    ref_x: float
    ref_y: float
    regions: tuple[RegionMetrics, RegionMetrics, RegionMetrics]
    total_p_save: float
    total_p_save_db: float
    traffic: ctl.ControlTraffic
    constraints: tuple[tuple[bool, bool, bool], ...]


@dataclass
class NodeTrace:
    """Per-round, per-node arrays of shape (rounds, nodes)."""

    temp: np.ndarray
    rssi_loss: np.ndarray
    level: np.ndarray
    p_save: np.ndarray
    clamped: np.ndarray
    tx_power_dbm: np.ndarray


@dataclass
class SimResult:
    config: SimConfig
    metrics: list[RoundMetrics]
    partition: RegionPartition
    network: Network
    trace: NodeTrace | None = None

    @property
    def traffic(self) -> ctl.ControlTraffic:
        total = ctl.ControlTraffic()
        for m in self.metrics:
            total = total + m.traffic
        return total

    def summary(self, digits: int | None = None) -> dict:
        return summarize(self.metrics, digits=digits)


def sense_temperatures(
    net: Network,
    process: TemperatureProcess,
    rng: np.random.Generator,
    base: np.ndarray,
) -> Network:
    """Refresh node temperatures from their initial draw ``base``."""
    if process.kind == "per-round-jitter" and process.sigma > 0:
        t = base + rng.normal(0.0, process.sigma, size=len(base))
    else:
        t = base.copy()
    net.temp = np.clip(t, process.t_min, process.t_max)
    return net


def _rng_streams(seed: int) -> tuple[np.random.Generator, ...]:
    # independent streams so the assignment scheme never shifts the random trace
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))


def _form(net: Network, cfg: SimConfig) -> RegionPartition:
    p = partition(
        net.rssi_loss,
        rssi_census(net.rssi_loss),
        halfwidth=cfg.band_halfwidth,
        desired_offset=cfg.desired_offset,
    )
    net.region = p.labels.copy()
    return p


def run(config: SimConfig | None = None, *, record_nodes: bool = False) -> SimResult:
    """Execute a full run. Deterministic for a given config (including seed)."""
    cfg = (config or SimConfig()).validate()
    deploy_rng, temp_rng, move_rng = _rng_streams(cfg.seed)
    process = cfg.temperature_process()
    node_sched = cfg.node_schedule()
    ref_sched = cfg.reference_schedule()

    # initial phase
    net = deploy(cfg.nodes, cfg.side, deploy_rng)
    base = deploy_rng.uniform(cfg.temp_min, cfg.temp_max, size=cfg.nodes)
    net.temp = base.copy()
    net.rssi_loss = temp_to_rssi_loss(net.temp)
    part = _form(net, cfg)
    first = part

    n = cfg.nodes
    if record_nodes:
        trace = NodeTrace(
            temp=np.empty((cfg.rounds, n)),
            rssi_loss=np.empty((cfg.rounds, n)),
            level=np.empty((cfg.rounds, n)),
            p_save=np.empty((cfg.rounds, n)),
            clamped=np.empty((cfg.rounds, n), dtype=bool),
            tx_power_dbm=np.empty((cfg.rounds, n)),
        )
    else:
        trace = None

    prev_clamped = None
    prev_levels = None
    metrics: list[RoundMetrics] = []

    for rnd in range(cfg.rounds):
        if rnd > 0:
            sense_temperatures(net, process, temp_rng, base)
            net.rssi_loss = temp_to_rssi_loss(net.temp)
            step_nodes(net, node_sched, move_rng)
            if cfg.repartition_every and rnd % cfg.repartition_every == 0:
                part = _form(net, cfg)
                prev_clamped = None

        ref = reference_waypoints(ref_sched, rnd)
        dist = link_distance(net.positions, np.asarray(ref))
        reachable = dist <= cfg.ref_range
        net.present = presence(part, net.rssi_loss)
        n_c = current_counts(part, net.present)
        prr_vals = prr(part, net.present).as_array()

        if cfg.scheme == ctl.EAST:
            a = ctl.east_assign(part, net.rssi_loss, net.present, reachable)
            clamped_full = np.zeros(n, dtype=bool)
            clamped_full[a.node_id] = a.clamped
            traffic = ctl.account_control_traffic(
                ctl.EAST, int(reachable.sum()),
                labels=part.labels, clamped=clamped_full, prev_clamped=prev_clamped,
            )
            prev_clamped = clamped_full
        else:
            mode = "per-node" if cfg.scheme == ctl.CLASSICAL_PER_NODE else "region-max"
            a = ctl.classical_assign(net.rssi_loss, mode, labels=part.labels)
            levels_full = np.full(n, np.nan)
            levels_full[a.node_id] = a.new_level
            traffic = ctl.account_control_traffic(
                cfg.scheme, int(reachable.sum()), levels=levels_full, prev_levels=prev_levels,
            )
            prev_levels = levels_full

        save = a.p_save
        save_db = a.p_save_db
        by_region, total = ctl.aggregate_p_save(a)
        by_region_db, total_db = ctl.aggregate_p_save(a, db=True)
        level_sum = np.bincount(a.region, weights=a.new_level, minlength=3)
        save_max = np.zeros(3)
        np.maximum.at(save_max, a.region, save)
        checks = ctl.constraints_passed(ctl.check_constraints(part, net.rssi_loss, net.present))

        regions = tuple(
            RegionMetrics(
                count=int(part.counts[k]),
                n_c=int(n_c[k]),
                n_d=int(part.n_d[k]),
                threshold=float(part.thresholds[k]),
                p_save_levels=float(by_region[k]),
                p_save_db=float(by_region_db[k]),
                prr=float(prr_vals[k]),
                level_sum=float(level_sum[k]),
                p_save_max=float(save_max[k]),
            )
            for k in range(3)
        )
        metrics.append(RoundMetrics(
            round=rnd,
            ref_x=ref[0],
            ref_y=ref[1],
            regions=regions,
            total_p_save=total,
            total_p_save_db=total_db,
            traffic=traffic,
            constraints=tuple(tuple(bool(v) for v in row) for row in checks),
        ))

        if trace is not None:
            trace.temp[rnd] = net.temp
            trace.rssi_loss[rnd] = net.rssi_loss
            trace.level[rnd] = np.nan
            trace.level[rnd, a.node_id] = a.new_level
            trace.p_save[rnd] = 0.0
            trace.p_save[rnd, a.node_id] = save
            trace.clamped[rnd] = False
            trace.clamped[rnd, a.node_id] = a.clamped
            trace.tx_power_dbm[rnd] = np.nan
            trace.tx_power_dbm[rnd, a.node_id] = required_tx_power(dist[a.node_id], a.new_rssi, cfg.radio)

    return SimResult(config=cfg, metrics=metrics, partition=first, network=net, trace=trace)


def _sig(v: float, digits: int | None) -> float:
    if digits is None or not math.isfinite(v):
        return v
    return float(f"{v:.{digits}g}")


def _stats(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {"min": float(arr.min()), "max": float(arr.max()), "mean": float(arr.mean())}


def prr_band(lo: float, hi: float) -> str:
    """Format a PRR range as whole percentages, e.g. ``(80-98)``."""
    return f"({round(lo * 100):d}-{round(hi * 100):d})"


def summarize(metrics: list[RoundMetrics], digits: int | None = None) -> dict:
    """Aggregate a run into a Table-I-shaped record.

    With ``digits`` set, every per-round value is first rounded to that many
    significant digits, so the summary can be recomputed exactly from a CSV
    written at the same precision.
    """
    if not metrics:
        raise ValueError("nothing to summarize")
    q = lambda v: _sig(v, digits)  # noqa: E731
    regions = {}
    for k, name in enumerate(REGIONS):
        rm = [m.regions[k] for m in metrics]
        prr_vals = [q(r.prr) for r in rm]
        passes = np.array([m.constraints[k] for m in metrics], dtype=float).mean(axis=0)
        regions[name] = {
            "count": rm[0].count,
            "n_d": rm[0].n_d,
            "n_c": _stats([r.n_c for r in rm]),
            "threshold_dbm": q(rm[0].threshold) if math.isfinite(rm[0].threshold) else None,
            "p_save_levels": _stats([q(r.p_save_levels) for r in rm]),
            "p_save_db": _stats([q(r.p_save_db) for r in rm]),
            "p_save_node_max": max(q(r.p_save_max) for r in rm),
            "prr": {"min": min(prr_vals), "max": max(prr_vals), "band": prr_band(min(prr_vals), max(prr_vals))},
            "constraint_pass_rate": {
                "rssi_sum": float(passes[0]),
                "n_c_ge_n_d": float(passes[1]),
                "above_ge_below": float(passes[2]),
            },
        }
    return {
        "rounds": len(metrics),
        "regions": regions,
        "total_p_save": _stats([q(m.total_p_save) for m in metrics]),
        "total_p_save_db": _stats([q(m.total_p_save_db) for m in metrics]),
        "traffic": {
            "beacons": sum(m.traffic.beacons for m in metrics),
            "acks": sum(m.traffic.acks for m in metrics),
            "power_adjust_msgs": sum(m.traffic.power_adjust_msgs for m in metrics),
        },
    }
