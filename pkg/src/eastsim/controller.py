"""EAST threshold-clamp power assignment, the classical baseline, and bookkeeping."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linkmodel import LEVEL_OFFSET_DBM, rssi_loss_to_power_level
from .regioning import RegionPartition, current_counts, threshold_split

log = logging.getLogger(__name__)

ADJUST_TOLERANCE = 0.01

EAST = "east"
CLASSICAL_PER_NODE = "classical-per-node"
CLASSICAL_REGION_MAX = "classical-region-max"
SCHEMES = (EAST, CLASSICAL_PER_NODE, CLASSICAL_REGION_MAX)


@dataclass
class PowerAssignment:
    """Per-node result of one assignment pass (struct of arrays).

    ``p_save`` is in power-level units, ``p_save_db`` is the matching drop
    in compensated RSSI loss. Nodes with RSSI loss at or below -40 dBm are
    left out, so ``node_id`` may be shorter than the network.
    """

    node_id: np.ndarray
    region: np.ndarray
    old_rssi: np.ndarray
    new_rssi: np.ndarray
    old_level: np.ndarray
    new_level: np.ndarray
    clamped: np.ndarray

    @property
    def p_save(self) -> np.ndarray:
        return self.old_level - self.new_level

    @property
    def p_save_db(self) -> np.ndarray:
        return self.old_rssi - self.new_rssi

    def __len__(self) -> int:
        return len(self.node_id)


def _valid(rssi: np.ndarray) -> np.ndarray:
    ok = rssi > -LEVEL_OFFSET_DBM
    if not ok.all():
        log.warning("excluding %d node(s) with RSSI loss <= %g dBm", int((~ok).sum()), -LEVEL_OFFSET_DBM)
    return ok


def east_assign(
    p: RegionPartition,
    rssi_loss,
    present: np.ndarray | None = None,
    reachable: np.ndarray | None = None,
) -> PowerAssignment:
    """Clamp nodes at or above their region threshold down to the threshold.

    A region clamps only while its current member count ``n_c`` is at least
    the desired count ``n_d``. Nodes that left their band, or cannot hear the
    reference node, keep their own compensation level.
    """
    r = np.asarray(rssi_loss, dtype=float)
    n = len(r)
    present = np.ones(n, dtype=bool) if present is None else present
    reachable = np.ones(n, dtype=bool) if reachable is None else reachable

    ok = _valid(r)
    n_c = current_counts(p, present)
    region_active = (n_c >= p.n_d) & ~np.isnan(p.thresholds)
    thr = p.thresholds[p.labels]
    with np.errstate(invalid="ignore"):
        clamp = ok & present & reachable & region_active[p.labels] & (r >= thr)

    new_r = np.where(clamp, thr, r)
    idx = np.flatnonzero(ok)
    old_level = rssi_loss_to_power_level(r[idx])
    new_level = rssi_loss_to_power_level(new_r[idx])
    return PowerAssignment(
        node_id=idx,
        region=p.labels[idx],
        old_rssi=r[idx],
        new_rssi=new_r[idx],
        old_level=np.atleast_1d(old_level),
        new_level=np.atleast_1d(new_level),
        clamped=clamp[idx],
    )


def classical_assign(rssi_loss, mode: str = "per-node", labels: np.ndarray | None = None) -> PowerAssignment:
    """Single-region baseline: each node's own level, or the network maximum.

    The baseline is its own reference, so ``p_save`` is zero throughout.
    """
    r = np.asarray(rssi_loss, dtype=float)
    if labels is None:
        labels = np.full(len(r), -1, dtype=int)
    ok = _valid(r)
    idx = np.flatnonzero(ok)
    rv = r[idx]
    if mode == "per-node":
        new_r = rv
    elif mode == "region-max":
        new_r = np.full_like(rv, rv.max() if len(rv) else np.nan)
    else:
        raise ValueError(f"unknown classical mode {mode!r}")
    level = np.atleast_1d(rssi_loss_to_power_level(new_r)) if len(rv) else np.empty(0)
    return PowerAssignment(
        node_id=idx,
        region=labels[idx],
        old_rssi=new_r.copy(),
        new_rssi=new_r,
        old_level=level,
        new_level=level.copy(),
        clamped=np.zeros(len(idx), dtype=bool),
    )


def aggregate_p_save(a: PowerAssignment, db: bool = False) -> tuple[np.ndarray, float]:
    """Sum of per-node savings by region (A, B, C) and overall."""
    save = a.p_save_db if db else a.p_save
    sel = a.region >= 0
    per_region = np.bincount(a.region[sel], weights=save[sel], minlength=3)
    return per_region, float(save.sum())


@dataclass(frozen=True)
class ConstraintResult:
    rssi_sum: float
    rssi_floor: float
    n_c: int
    n_d: int
    above: int
    below: int

    @property
    def rssi_ok(self) -> bool:
        return self.rssi_sum >= self.rssi_floor - 1e-9 * max(1.0, abs(self.rssi_floor))

    @property
    def count_ok(self) -> bool:
        return self.n_c >= self.n_d

    @property
    def balance_ok(self) -> bool:
        return self.above >= self.below

    @property
    def passed(self) -> tuple[bool, bool, bool]:
        return (self.rssi_ok, self.count_ok, self.balance_ok)


def check_constraints(p: RegionPartition, rssi_loss, present: np.ndarray | None = None) -> list[ConstraintResult | None]:
    """Evaluate the three saving constraints per region.

    For each region: present members' summed RSSI loss is at least
    ``threshold * n_c``; ``n_c >= n_d``; at least as many present members
    sit at/above the threshold as below it. Empty regions yield ``None``
    (vacuous pass).
    """
    r = np.asarray(rssi_loss, dtype=float)
    present = np.ones(len(r), dtype=bool) if present is None else present
    n_c = current_counts(p, present)
    above, below = threshold_split(p, r, present)
    out: list[ConstraintResult | None] = []
    for k in range(3):
        if p.counts[k] == 0:
            out.append(None)
            continue
        sel = present & (p.labels == k)
        out.append(ConstraintResult(
            rssi_sum=float(r[sel].sum()),
            rssi_floor=float(p.thresholds[k] * n_c[k]),
            n_c=int(n_c[k]),
            n_d=int(p.n_d[k]),
            above=int(above[k]),
            below=int(below[k]),
        ))
    return out


def constraints_passed(results: list[ConstraintResult | None]) -> np.ndarray:
    """3x3 bool array: rows are regions, columns the three constraints."""
    return np.array([res.passed if res is not None else (True, True, True) for res in results], dtype=bool)


@dataclass(frozen=True)
class ControlTraffic:
    beacons: int = 0
    acks: int = 0
    power_adjust_msgs: int = 0

    def __add__(self, other: "ControlTraffic") -> "ControlTraffic":
        return ControlTraffic(
            self.beacons + other.beacons,
            self.acks + other.acks,
            self.power_adjust_msgs + other.power_adjust_msgs,
        )


def account_control_traffic(
    scheme: str,
    n_reachable: int,
    *,
    labels: np.ndarray | None = None,
    clamped: np.ndarray | None = None,
    prev_clamped: np.ndarray | None = None,
    levels: np.ndarray | None = None,
    prev_levels: np.ndarray | None = None,
    tol: float = ADJUST_TOLERANCE,
) -> ControlTraffic:
    """Control packets exchanged in one round.

    Every round costs one beacon and one ACK per reachable node. EAST sends
    one power-adjust message per region whose clamp decision (the set of
    clamped members) changed; the classical baseline sends one per node whose
    level moved by more than ``tol``. ``prev_*`` of ``None`` means nothing has
    been assigned yet, so every region/node counts as changed.
    """
    if scheme == EAST:
        if labels is None or clamped is None:
            raise ValueError("EAST accounting needs labels and clamped")
        regions = np.unique(labels[labels >= 0])
        if prev_clamped is None:
            adjust = len(regions)
        else:
            diff = clamped != prev_clamped
            adjust = int(np.count_nonzero(np.bincount(labels[diff & (labels >= 0)], minlength=3)))
    elif scheme in (CLASSICAL_PER_NODE, CLASSICAL_REGION_MAX):
        if levels is None:
            raise ValueError("classical accounting needs levels")
        if prev_levels is None:
            adjust = len(levels)
        else:
            adjust = int(np.count_nonzero(~(np.abs(levels - prev_levels) <= tol)))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return ControlTraffic(beacons=1, acks=int(n_reachable), power_adjust_msgs=adjust)
