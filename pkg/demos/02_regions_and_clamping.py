# One snapshot: census, A/B/C split, per-region thresholds, and what the
# EAST clamp does to each region compared with the per-node baseline.
import numpy as np

from eastsim import classical_assign, east_assign, partition, rssi_census, temp_to_rssi_loss
from eastsim.controller import aggregate_p_save, check_constraints
from eastsim.linkmodel import rssi_loss_to_power_level

rng = np.random.default_rng(42)
temps = rng.uniform(-10, 53, 100)
loss = temp_to_rssi_loss(temps)

census = rssi_census(loss)
print(f"min {census.min:.3f}  max {census.max:.3f}  midrange {census.avg:.3f} dBm")

p = partition(loss, census)
print("N   (A,B,C):", p.counts.tolist())
print("n_d (A,B,C):", p.n_d.tolist())
print("threshold RSSI loss:", np.round(p.thresholds, 2).tolist())
print("threshold power level:", np.round(rssi_loss_to_power_level(p.thresholds), 2).tolist())

east = east_assign(p, loss)
base = classical_assign(loss, labels=p.labels)
per_region, total = aggregate_p_save(east)
print("level saved per region:", np.round(per_region, 2).tolist(), " total", round(total, 2))
for k, name in enumerate("ABC"):
    sel = east.region == k
    print(f"region {name}: baseline levels {base.new_level[sel].min():.1f}-{base.new_level[sel].max():.1f}, "
          f"EAST {east.new_level[sel].min():.1f}-{east.new_level[sel].max():.1f}, "
          f"largest single-node save {east.p_save[sel].max():.2f}")

for name, res in zip("ABC", check_constraints(p, loss)):
    print(f"region {name}: above/below threshold {res.above}/{res.below}, constraints {res.passed}")
