"""
Parameter grids for the sweeps.
"""

import math

from ..errors import ConfigurationError


def phi_grid(start: float, end: float, step: float) -> tuple[float, ...]:
    """start + k·step for every k with the value below end."""
    if step <= 0.0:
        raise ConfigurationError(f"phi step must be positive, got {step}")
    if end <= start:
        raise ConfigurationError(f"phi range is empty: [{start}, {end})")
    # absorb rounding when (end − start)/step is an integer
    n = math.ceil((end - start) / step - 1e-9)
    return tuple(start + k * step for k in range(n))


def az_grid(step: float) -> tuple[float, ...]:
    """-1, -1 + step, ... up to 1 inclusive when step divides 2."""
    if not 0.0 < step <= 2.0:
        raise ConfigurationError(f"a_z step must lie in (0, 2], got {step}")
    n = math.floor(2.0 / step + 1e-9)
    return tuple(min(1.0, round(-1.0 + k * step, 12)) for k in range(n + 1))
