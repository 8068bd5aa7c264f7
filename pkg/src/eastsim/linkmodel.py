"""Temperature, RSSI loss, power level and free-space transmit power mappings.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

REFERENCE_TEMP_C = 25.0
RSSI_PER_DEGREE = 0.1996

LEVEL_OFFSET_DBM = 40.0
LEVEL_SCALE_DBM = 12.0
LEVEL_EXPONENT = 2.91

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN = 1.380649e-23


@dataclass(frozen=True)
class RadioConstants:
    """Radio and link-budget constants used by :func:`required_tx_power`.

    ``snr_db`` is carried for bookkeeping only; the transmit-power formula
    consumes ``eb_n0_db``.
    """

    eta: float = 0.0029
    eb_n0_db: float = 8.3
    bandwidth_hz: float = 83.5e6
    frequency_hz: float = 2.45e9
    rnf_db: float = 5.0
    ambient_kelvin: float = 300.0
    boltzmann: float = BOLTZMANN
    m_factor: float = 1.0
    snr_db: float = 0.20

    def __post_init__(self) -> None:
        for name in ("eta", "bandwidth_hz", "frequency_hz", "ambient_kelvin", "boltzmann", "m_factor"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        for name in ("eb_n0_db", "rnf_db", "snr_db"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz


def _as_float(x):
    arr = np.asarray(x, dtype=float)
    return arr if arr.ndim else float(arr)


def temp_to_rssi_loss(temp_c):
    """RSSI loss in dBm caused by deviation of ``temp_c`` from 25 degrees C."""
    t = np.asarray(temp_c, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("temperature must be finite")
    return _as_float(RSSI_PER_DEGREE * (t - REFERENCE_TEMP_C))


def rssi_loss_to_power_level(rssi_loss):
    """Radio power level needed to compensate ``rssi_loss``.

    The fitted curve ``((r + 40) / 12) ** 2.91`` is only defined for
    ``r > -40``.
    """
    r = np.asarray(rssi_loss, dtype=float)
    if not np.all(np.isfinite(r)):
        raise DomainError("RSSI loss must be finite")
    if np.any(r <= -LEVEL_OFFSET_DBM):
        raise DomainError(f"RSSI loss must exceed {-LEVEL_OFFSET_DBM} dBm")
    return _as_float(((r + LEVEL_OFFSET_DBM) / LEVEL_SCALE_DBM) ** LEVEL_EXPONENT)


def power_level_to_rssi_loss(level):
    """Inverse of :func:`rssi_loss_to_power_level`."""
    p = np.asarray(level, dtype=float)
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise DomainError("power level must be finite and positive")
    return _as_float(LEVEL_SCALE_DBM * p ** (1.0 / LEVEL_EXPONENT) - LEVEL_OFFSET_DBM)


def required_tx_power(distance_m, rssi_loss, radio: RadioConstants | None = None):
    """Transmit power in dBm needed over a free-space hop of ``distance_m``.

    The noise/path product ``eta * Eb/N0 * m * k * T * B * (4 pi d / lambda)^2``
    is evaluated in watts and converted to dBm; the receiver noise figure and
    the temperature RSSI loss are then added as dB terms.
    """
    radio = radio or RadioConstants()
    d = np.asarray(distance_m, dtype=float)
    if np.any(~(d > 0)):
        raise DomainError("distance must be positive")
    r = np.asarray(rssi_loss, dtype=float)
    if not np.all(np.isfinite(r)):
        raise DomainError("RSSI loss must be finite")

    ebn0 = 10.0 ** (radio.eb_n0_db / 10.0)
    noise_w = radio.m_factor * radio.boltzmann * radio.ambient_kelvin * radio.bandwidth_hz
    spreading = (4.0 * math.pi * d / radio.wavelength_m) ** 2
    watts = radio.eta * ebn0 * noise_w * spreading
    dbm = 10.0 * np.log10(watts / 1e-3)
    return _as_float(dbm + radio.rnf_db + r)
