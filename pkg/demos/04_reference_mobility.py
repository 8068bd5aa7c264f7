# Where the reference node sits only matters once nodes can fall out of its
# beacon range; with unlimited range every placement yields the same saving.
import numpy as np

from eastsim import SimConfig, run


def mean_save_db(**kw):
    return np.mean([m.total_p_save_db for m in run(SimConfig(rounds=300, **kw)).metrics])


for rng in (float("inf"), 70.0, 50.0, 30.0):
    center = mean_save_db(ref_mobility="center", ref_range=rng)
    corner = mean_save_db(ref_mobility="static", ref_range=rng)
    circuit = mean_save_db(ref_mobility="perimeter", ref_range=rng)
    print(f"range {rng:>5}: center {center:6.2f} dB   corner {corner:6.2f} dB   circuit {circuit:6.2f} dB")

# %% per-round region-A saving as the reference circles the field
res = run(SimConfig(rounds=1200, ref_mobility="perimeter", ref_range=50.0))
leg = 240
for i, name in enumerate(["center->(0,0)", "(0,0)->(0,100)", "(0,100)->(100,100)",
                          "(100,100)->(100,0)", "(100,0)->(0,0)"]):
    seg = [m.regions[0].p_save_db for m in res.metrics[i * leg:(i + 1) * leg]]
    print(f"{name:20s} region A save {min(seg):6.2f} .. {max(seg):6.2f} dB")
