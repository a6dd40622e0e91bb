"""Closed-form AKLT reference values.

The end-to-end formula is the large-L asymptote; finite chains differ by an
exponentially small amount, so comparisons against ED carry a band of order
exp(-L/xi).
"""

import math
from dataclasses import dataclass

XI = 1.0 / math.log(3.0)


@dataclass(frozen=True)
class AkltReference:
    xi: float = XI
    zz_inf: float = -4.0 / 9.0
    charge_inf: float = 4.0 / 9.0
    pc_inf: float = 1.0 / 6.0
    negativity_inf: float = 2.0 / 9.0


REFERENCE = AkltReference()


def aklt_end_correlator(length: int) -> tuple[float, float]:
    """(<S^z_1 S^z_L>, <(S^z_1)^2 (S^z_L)^2>) of the open-chain AKLT singlet, asymptotically."""
    if length < 2:
        raise ValueError(f"length must be >= 2, got {length}")
    zz = -4.0 / 9.0 * (1.0 + 6.0 * (-1) ** length * 3.0 ** (-length))
    return zz, -zz


def residual_band(length: int, factor: float = 10.0) -> float:
    return factor * math.exp(-length / XI)
