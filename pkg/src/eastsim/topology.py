"""Node deployment, distances and mobility schedules on a square field."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

MIN_LINK_DISTANCE_M = 1.0

# Reference-node circuit: center, then the four corners in order.
PERIMETER_PATH = ((50.0, 50.0), (0.0, 0.0), (0.0, 100.0), (100.0, 100.0), (100.0, 0.0), (0.0, 0.0))

REGION_NONE = -1


@dataclass(frozen=True)
class NodeState:
    id: int
    x: float
    y: float
    temp: float
    rssi_loss: float
    region: str | None
    present: bool


@dataclass
class Network:
    """Struct-of-arrays view of the sensor nodes.

    ``region`` holds integer codes (0=A, 1=B, 2=C, -1 unassigned).
    """

    ids: np.ndarray
    x: np.ndarray
    y: np.ndarray
    side: float
    temp: np.ndarray = None
    rssi_loss: np.ndarray = None
    region: np.ndarray = None
    present: np.ndarray = None

    def __post_init__(self) -> None:
        n = len(self.ids)
        if self.temp is None:
            self.temp = np.full(n, np.nan)
        if self.rssi_loss is None:
            self.rssi_loss = np.full(n, np.nan)
        if self.region is None:
            self.region = np.full(n, REGION_NONE, dtype=int)
        if self.present is None:
            self.present = np.ones(n, dtype=bool)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def copy(self) -> "Network":
        return Network(
            self.ids.copy(), self.x.copy(), self.y.copy(), self.side,
            self.temp.copy(), self.rssi_loss.copy(), self.region.copy(), self.present.copy(),
        )

    def nodes(self) -> list[NodeState]:
        labels = "ABC"
        return [
            NodeState(
                id=int(self.ids[i]),
                x=float(self.x[i]),
                y=float(self.y[i]),
                temp=float(self.temp[i]),
                rssi_loss=float(self.rssi_loss[i]),
                region=labels[self.region[i]] if self.region[i] >= 0 else None,
                present=bool(self.present[i]),
            )
            for i in range(len(self))
        ]


@dataclass(frozen=True)
class MobilitySchedule:
    """How a node (or the reference node) moves from round to round.

    kind:
      ``static``               stays at ``point`` (reference) or does not move (sensors)
      ``center-hold``          reference node pinned to the field center
      ``perimeter-circuit``    reference node follows :data:`PERIMETER_PATH`
      ``random-displacement``  sensors jitter by up to ``step`` metres per axis
    """

    kind: str = "static"
    step: float = 0.0
    point: tuple[float, float] = (0.0, 0.0)
    total_rounds: int = 1
    side: float = 100.0
    waypoints: tuple[tuple[float, float], ...] = field(default=PERIMETER_PATH)

    KINDS = ("static", "center-hold", "perimeter-circuit", "random-displacement")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown mobility kind {self.kind!r}")
        if self.step < 0:
            raise ConfigError("mobility step must be non-negative")


def deploy(n: int, side: float = 100.0, rng_seed=None) -> Network:
    """Place ``n`` nodes uniformly at random in a ``side`` x ``side`` square."""
    if n < 1:
        raise ConfigError("need at least one node")
    if not side > 0:
        raise ConfigError("side must be positive")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    xy = rng.uniform(0.0, side, size=(n, 2))
    return Network(ids=np.arange(n), x=xy[:, 0].copy(), y=xy[:, 1].copy(), side=float(side))


def distance(a, b):
    """Euclidean distance between points (or rows of point arrays)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.hypot(a[..., 0] - b[..., 0], a[..., 1] - b[..., 1])
    return float(d) if np.ndim(d) == 0 else d


def link_distance(a, b):
    """Distance clamped to at least 1 m, for path-loss use."""
    d = np.maximum(distance(a, b), MIN_LINK_DISTANCE_M)
    return float(d) if np.ndim(d) == 0 else d


def reference_waypoints(schedule: MobilitySchedule, round_: int) -> tuple[float, float]:
    """Reference-node position at ``round_``.

    The perimeter circuit spends an equal share of the run on each leg and
    moves linearly within a leg, ending on the final waypoint in the last round.
    """
    if round_ < 0:
        raise ValueError("round must be non-negative")
    if schedule.kind == "center-hold":
        return (schedule.side / 2.0, schedule.side / 2.0)
    if schedule.kind == "static":
        return tuple(float(v) for v in schedule.point)
    if schedule.kind != "perimeter-circuit":
        raise ConfigError(f"{schedule.kind!r} is not a reference-node schedule")

    pts = np.asarray(schedule.waypoints, dtype=float) * (schedule.side / 100.0)
    legs = len(pts) - 1
    if schedule.total_rounds <= 1:
        return tuple(float(v) for v in pts[0])
    u = min(round_, schedule.total_rounds - 1) / (schedule.total_rounds - 1) * legs
    leg = min(int(u), legs - 1)
    frac = u - leg
    pos = pts[leg] + frac * (pts[leg + 1] - pts[leg])
    return (float(pos[0]), float(pos[1]))


def _reflect(v: np.ndarray, side: float) -> np.ndarray:
    # fold onto [0, 2*side) then mirror the upper half, handles any overshoot
    period = 2.0 * side
    v = np.mod(v, period)
    return np.where(v > side, period - v, v)


def step_nodes(net: Network, schedule: MobilitySchedule, rng: np.random.Generator) -> Network:
    """Move sensor nodes one round; walls reflect. Mutates and returns ``net``."""
    if len(net) == 0:
        raise ValueError("empty network")
    if schedule.kind != "random-displacement" or schedule.step == 0:
        return net
    s = schedule.step
    dxy = rng.uniform(-s, s, size=(len(net), 2))
    net.x = _reflect(net.x + dxy[:, 0], net.side)
    net.y = _reflect(net.y + dxy[:, 1], net.side)
    return net
