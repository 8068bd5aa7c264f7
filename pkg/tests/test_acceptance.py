"""Exit criteria for the package. Each test prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from eastsim.cli import main
from eastsim.controller import aggregate_p_save, east_assign
from eastsim.engine import SimConfig, run
from eastsim.linkmodel import rssi_loss_to_power_level, temp_to_rssi_loss
from eastsim.regioning import partition, presence, rssi_census


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail
    return emit


def test_01_threshold_power_pairs(report):
    got = [rssi_loss_to_power_level(r) for r in (3.78, -0.61, -5.17)]
    want = [43.24, 31.77, 22.21]
    ok = all(abs(g - w) <= 0.05 for g, w in zip(got, want))
    report(1, ok, f"levels {[round(g, 4) for g in got]} vs {want} (tol 0.05)")


def test_02_rssi_range(report):
    lo, hi = temp_to_rssi_loss(-10.0), temp_to_rssi_loss(53.0)
    ok = abs(lo - (-6.986)) <= 1e-9 and abs(hi - 5.5888) <= 1e-9
    report(2, ok, f"RSSI loss over [-10, 53] C spans [{lo!r}, {hi!r}]")


def test_03_power_level_range(report):
    r = np.linspace(temp_to_rssi_loss(-10.0), temp_to_rssi_loss(53.0), 10001)
    levels = rssi_loss_to_power_level(r)
    lo, hi = levels.min(), levels.max()
    ok = lo <= 20 and hi >= 47 and lo >= 18.5 and hi <= 49.5
    report(3, ok, f"level span [{lo:.3f}, {hi:.3f}] contains [20, 47], inside [18.5, 49.5]")


def test_04_partition_totality(report):
    t0 = time.perf_counter()
    bad = []
    for seed in range(200):
        rng = np.random.default_rng(seed)
        r = temp_to_rssi_loss(rng.uniform(-10, 53, 100))
        p = partition(r, rssi_census(r))
        groups = [r[p.labels == k] for k in range(3)]
        ok = p.counts.sum() == 100 and sum(len(g) for g in groups) == 100
        ok &= all(groups[k].min() > groups[k + 1].max() for k in range(2) if len(groups[k]) and len(groups[k + 1]))
        if all(len(g) for g in groups):
            ok &= p.thresholds[0] > p.thresholds[1] > p.thresholds[2]
        if not ok:
            bad.append(seed)
    dt = time.perf_counter() - t0
    report(4, not bad and dt < 5, f"200 networks, failures {bad}, {dt:.2f}s (< 5s)")


def test_05_dominance_and_nonnegative_saving(report):
    t0 = time.perf_counter()
    worst_save, worst_gap = math.inf, -math.inf
    for seed in range(20):
        east = run(SimConfig(seed=seed), record_nodes=True).trace
        base = run(SimConfig(seed=seed, scheme="classical-per-node"), record_nodes=True).trace
        np.testing.assert_array_equal(east.rssi_loss, base.rssi_loss)
        worst_save = min(worst_save, east.p_save.min())
        worst_gap = max(worst_gap, (east.level - base.level).max())
    dt = time.perf_counter() - t0
    ok = worst_save >= 0 and worst_gap <= 0 and dt < 30
    report(5, ok, f"20 seeds x 1200 rounds: min p_save {worst_save:.3g}, "
                  f"max(EAST - classical) {worst_gap:.3g}, {dt:.1f}s (< 30s)")


def test_06_control_overhead(report):
    t0 = time.perf_counter()
    rows = []
    for seed in range(10):
        common = dict(seed=seed, temp_process="per-round-jitter", temp_jitter=0.5)
        e = run(SimConfig(**common)).traffic.power_adjust_msgs
        c = run(SimConfig(scheme="classical-per-node", **common)).traffic.power_adjust_msgs
        rows.append((e, c))
    dt = time.perf_counter() - t0
    ok = all(e <= 3 * 1200 and c >= 10 * e for e, c in rows) and dt < 30
    ratio = min(c / max(e, 1) for e, c in rows)
    report(6, ok, f"10 seeds, EAST max {max(e for e, _ in rows)} <= 3600, "
                  f"min classical/EAST ratio {ratio:.1f} (>= 10), {dt:.1f}s")


def test_07_region_save_magnitudes(report):
    t0 = time.perf_counter()
    s = run(SimConfig()).summary()
    a, b, c = (s["regions"][r]["p_save_node_max"] for r in "ABC")
    dt = time.perf_counter() - t0
    ok = 1 <= a <= 6 and a >= b >= c and dt < 10
    report(7, ok, f"default config: run-max per-node save A={a:.3f} B={b:.3f} C={c:.3f}; "
                  f"need A in [1, 6] and A >= B >= C")


def test_08_reference_placement(report):
    # With every node in beacon range the reference position cancels out of the
    # saving; a finite range is what makes placement matter.
    t0 = time.perf_counter()
    wins, ties = 0, 0
    for seed in range(10):
        means = {}
        for rng_m in (math.inf, 50.0):
            for mob in ("center", "static"):
                m = run(SimConfig(seed=seed, ref_mobility=mob, ref_range=rng_m)).metrics
                means[mob, rng_m] = np.mean([x.total_p_save_db for x in m])
        ties += means["center", math.inf] == means["static", math.inf]
        wins += means["center", 50.0] >= means["static", 50.0]
    dt = time.perf_counter() - t0
    ok = wins >= 8 and ties == 10 and dt < 60
    report(8, ok, f"50 m beacon range: center >= corner on {wins}/10 seeds (need 8); "
                  f"unlimited range ties {ties}/10; {dt:.1f}s")


def test_09_manifest_reproducibility(report, tmp_path):
    t0 = time.perf_counter()
    assert main(["run", "--seed", "11", "--temp-jitter", "0.5", "--ref-mobility", "perimeter",
                 "--out", str(tmp_path / "first")]) == 0
    manifest = str(tmp_path / "first/manifest.json")
    assert main(["run", "--config", manifest, "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", manifest, "--out", str(tmp_path / "b")]) == 0
    files = [(tmp_path / d / "rounds.csv").read_bytes() for d in ("first", "a", "b")]
    dt = time.perf_counter() - t0
    report(9, files[0] == files[1] == files[2] and dt < 10, f"three rounds.csv byte-identical, {dt:.1f}s")


def _oracle(temps, drift):
    """Straight-line re-derivation of losses, regions, thresholds, clamps and savings."""
    n = len(temps)
    loss = [0.1996 * (t - 25.0) for t in temps]
    lo = loss[0]
    hi = loss[0]
    for v in loss:
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    mid = (lo + hi) / 2.0
    region = []
    for v in loss:
        if v > mid + 2.0:
            region.append(0)
        elif v > mid - 2.0:
            region.append(1)
        else:
            region.append(2)
    count = [0, 0, 0]
    total = [0.0, 0.0, 0.0]
    for v, k in zip(loss, region):
        count[k] += 1
        total[k] += v
    thr = [total[k] / count[k] if count[k] else None for k in range(3)]
    desired = [max(count[k] - 5, 1) for k in range(3)]

    now = [v + d for v, d in zip(loss, drift)]
    here = []
    for v, k in zip(now, region):
        if v > mid + 2.0:
            band = 0
        elif v > mid - 2.0:
            band = 1
        else:
            band = 2
        here.append(band == k)
    current = [0, 0, 0]
    for k, h in zip(region, here):
        if h:
            current[k] += 1

    new_level = []
    save = []
    for i in range(n):
        k = region[i]
        old = ((now[i] + 40.0) / 12.0) ** 2.91
        if here[i] and thr[k] is not None and now[i] >= thr[k] and current[k] >= desired[k]:
            new = ((thr[k] + 40.0) / 12.0) ** 2.91
        else:
            new = old
        new_level.append(new)
        save.append(old - new)
    region_save = [0.0, 0.0, 0.0]
    for k, s in zip(region, save):
        region_save[k] += s
    return loss, region, thr, new_level, save, region_save


def _close(a, b, rel=1e-9):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= rel * np.maximum(np.abs(b), 1e-12) + 1e-12))


def test_10_oracle_equivalence(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    temps = rng.uniform(-10, 53, 1000)
    drift = rng.normal(0, 0.3, 1000)
    loss, region, thr, new_level, save, region_save = _oracle(temps.tolist(), drift.tolist())

    r = temp_to_rssi_loss(temps)
    p = partition(r)
    now = r + drift
    a = east_assign(p, now, presence(p, now))
    per_region, total = aggregate_p_save(a)

    checks = {
        "rssi": _close(r, loss),
        "regions": p.labels.tolist() == region,
        "thresholds": _close(p.thresholds, thr),
        "levels": _close(a.new_level, new_level),
        "p_save": _close(a.p_save, save),
        "region_save": _close(per_region, region_save),
        "total": _close(total, sum(save)),
    }
    dt = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    report(10, not failed and dt < 5, f"1000 nodes vs straight-line oracle, mismatches {failed}, {dt:.2f}s")
