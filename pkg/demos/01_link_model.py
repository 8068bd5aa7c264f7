# Temperature -> RSSI loss -> power level, and the free-space transmit power
# a node needs to reach the reference node.
import numpy as np

from eastsim import RadioConstants, required_tx_power, rssi_loss_to_power_level, temp_to_rssi_loss

# %% Temperature sweep over the deployment's climate range
temps = np.array([-10, 0, 10, 25, 40, 53], dtype=float)
loss = temp_to_rssi_loss(temps)
levels = rssi_loss_to_power_level(loss)
for t, r, p in zip(temps, loss, levels):
    print(f"{t:6.1f} C  ->  RSSI loss {r:+7.3f} dBm  ->  power level {p:6.2f}")

# 25 C is the calibration point: no loss, level (40/12)**2.91
print("level at 25 C:", rssi_loss_to_power_level(0.0))

# %% Free-space requirement grows 6 dB per doubling of distance
radio = RadioConstants()
for d in (1, 2, 4, 8, 16, 32, 64, 100):
    print(f"d = {d:4d} m   Pt = {required_tx_power(d, 0.0, radio):7.2f} dBm")

# a hot node (53 C) needs its RSSI loss on top
print("hot node at 50 m:", required_tx_power(50.0, temp_to_rssi_loss(53.0), radio))
