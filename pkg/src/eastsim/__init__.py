"""Temperature-aware three-region transmission power control for WSNs."""

__version__ = "0.1.0"

from .controller import (  # noqa: E402
    ControlTraffic,
    PowerAssignment,
    account_control_traffic,
    aggregate_p_save,
    check_constraints,
    classical_assign,
    east_assign,
)
from .engine import RoundMetrics, SimConfig, SimResult, TemperatureProcess, run, sense_temperatures, summarize  # noqa: E402
from .errors import ConfigError, DomainError  # noqa: E402
from .linkmodel import (  # noqa: E402
    RadioConstants,
    power_level_to_rssi_loss,
    required_tx_power,
    rssi_loss_to_power_level,
    temp_to_rssi_loss,
)
from .regioning import RegionPartition, partition, prr, region_thresholds, rssi_census  # noqa: E402
from .topology import MobilitySchedule, Network, deploy, distance, reference_waypoints, step_nodes  # noqa: E402
