"""Learning-based 3D placement of UAV base stations in a downlink cellular simulator."""
__version__ = "0.1.0"

from .config import SimConfig, load_config  # noqa: E402
from .engine import run_episode, run_replications, sweep  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["SimConfig", "load_config", "run_episode", "run_replications", "sweep", "BACKEND"]
