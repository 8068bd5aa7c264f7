"""Split a network into high/medium/low RSSI-loss regions A, B and C."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REGIONS = ("A", "B", "C")
A, B, C = 0, 1, 2


@dataclass(frozen=True)
class Census:
    min: float
    max: float
    avg: float


@dataclass(frozen=True)
class RegionBounds:
    a_max: float
    a_min: float
    b_max: float
    b_min: float
    c_max: float
    c_min: float

    @classmethod
    def from_census(cls, census: Census, halfwidth: float = 2.0) -> "RegionBounds":
        hi = census.avg + halfwidth
        lo = census.avg - halfwidth
        return cls(a_max=census.max, a_min=hi, b_max=hi, b_min=lo, c_max=lo, c_min=census.min)


@dataclass(frozen=True)
class RegionPartition:
    """Formation-time split of the network.

    ``labels[i]`` is the region code of node ``i``. ``thresholds`` holds the
    mean member RSSI loss of each region, NaN for an empty region. ``n_d``
    is frozen at formation as ``count - desired_offset`` (at least 1).
    """

    bounds: RegionBounds
    labels: np.ndarray
    counts: np.ndarray
    n_d: np.ndarray
    thresholds: np.ndarray

    def members(self, region: int) -> np.ndarray:
        return np.flatnonzero(self.labels == region)

    @property
    def member_ids(self) -> dict[str, list[int]]:
        return {name: self.members(k).tolist() for k, name in enumerate(REGIONS)}


@dataclass(frozen=True)
class PrrReport:
    prr_A: float
    prr_B: float
    prr_C: float

    def as_array(self) -> np.ndarray:
        return np.array([self.prr_A, self.prr_B, self.prr_C])


def rssi_census(rssi_loss) -> Census:
    """Min, max and midrange of the RSSI losses.

    ``avg`` is ``(min + max) / 2``, not the arithmetic mean.
    """
    r = np.asarray(rssi_loss, dtype=float)
    if r.size == 0:
        raise ValueError("census of an empty network")
    lo, hi = float(r.min()), float(r.max())
    return Census(min=lo, max=hi, avg=(lo + hi) / 2.0)


def classify(rssi_loss, bounds: RegionBounds) -> np.ndarray:
    """Region code per node: A is (b_max, inf), B is (b_min, b_max], C the rest."""
    r = np.asarray(rssi_loss, dtype=float)
    return np.where(r > bounds.b_max, A, np.where(r > bounds.b_min, B, C))


def region_thresholds(labels: np.ndarray, rssi_loss) -> np.ndarray:
    """Mean member RSSI loss per region; NaN where a region has no members."""
    r = np.asarray(rssi_loss, dtype=float)
    out = np.full(3, np.nan)
    for k in range(3):
        sel = labels == k
        if sel.any():
            out[k] = r[sel].mean()
    return out


def partition(
    rssi_loss,
    census: Census | None = None,
    *,
    halfwidth: float = 2.0,
    desired_offset: int = 5,
) -> RegionPartition:
    r = np.asarray(rssi_loss, dtype=float)
    census = census or rssi_census(r)
    bounds = RegionBounds.from_census(census, halfwidth)
    labels = classify(r, bounds)
    counts = np.bincount(labels, minlength=3)
    n_d = np.maximum(counts - desired_offset, 1)
    return RegionPartition(
        bounds=bounds,
        labels=labels,
        counts=counts,
        n_d=n_d,
        thresholds=region_thresholds(labels, r),
    )


def presence(p: RegionPartition, rssi_loss) -> np.ndarray:
    """True where a node's current RSSI loss still falls in its formation band.

    The outer edges of A and C are open: a node that drifts beyond the
    census extremes has not left its region.
    """
    return classify(rssi_loss, p.bounds) == p.labels


def current_counts(p: RegionPartition, present: np.ndarray) -> np.ndarray:
    """n_c per region: formation members that are still present."""
    return np.bincount(p.labels[present], minlength=3)


def threshold_split(p: RegionPartition, rssi_loss, present: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Present members at/above and below their region threshold."""
    r = np.asarray(rssi_loss, dtype=float)
    thr = p.thresholds[p.labels]
    above = present & (r >= thr)
    below = present & (r < thr)
    return np.bincount(p.labels[above], minlength=3), np.bincount(p.labels[below], minlength=3)


def prr(p: RegionPartition, present: np.ndarray) -> PrrReport:
    """Fraction of each region's formation members still present (1.0 if empty)."""
    n_c = current_counts(p, present)
    vals = [n_c[k] / p.counts[k] if p.counts[k] else 1.0 for k in range(3)]
    return PrrReport(*map(float, vals))
