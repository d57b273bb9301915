# experiments
from .filtering import run_filtering_grid, run_filtering_triple
from .grids import az_grid, phi_grid
from .robertson import RobertsonPoint, random_direction, run_axis, run_robertson_sweep
from .seeding import make_generator, stream_key
from .uncertainty import SweepPoint, run_setting_pair, run_uncertainty_sweep
from .warmup import warm_up

__all__ = [
    "RobertsonPoint",
    "SweepPoint",
    "az_grid",
    "make_generator",
    "phi_grid",
    "random_direction",
    "run_axis",
    "run_filtering_grid",
    "run_filtering_triple",
    "run_robertson_sweep",
    "run_setting_pair",
    "run_uncertainty_sweep",
    "stream_key",
    "warm_up",
]
