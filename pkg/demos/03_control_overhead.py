# Power-adjust traffic under jittering temperatures: EAST broadcasts one
# decision per region, the single-region baseline re-tunes node by node.
from eastsim import SimConfig, run

for seed in range(5):
    common = dict(seed=seed, temp_process="per-round-jitter", temp_jitter=0.5)
    east = run(SimConfig(**common))
    classical = run(SimConfig(scheme="classical-per-node", **common))
    e, c = east.traffic.power_adjust_msgs, classical.traffic.power_adjust_msgs
    prr_a = east.summary()["regions"]["A"]["prr"]["band"]
    print(f"seed {seed}: adjust msgs EAST {e:5d}  classical {c:6d}  ratio {c / e:5.1f}   PRR_A {prr_a}%")
