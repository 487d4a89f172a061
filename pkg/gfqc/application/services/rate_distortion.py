"""Rate-distortion bound of the binary symmetric source.

``R(D) = 1 - H(D)`` for ``0 <= D <= 1/2``, with H the binary entropy in bits.

Example:
    >>> round(rd_bound(0.33), 4)
    0.1754
    >>> rd_bound_inv(0.5)
    0.0
"""

import math
from typing import Dict, List, Tuple

from gfqc.domain.errors import ConfigurationError

_TOLERANCE = 1e-12

# Tuned (L, gamma0) per rate for q = 256 codes.
RATE_TABLE: Dict[float, Tuple[float, float]] = {
    0.1: (1.1, 0.98),
    0.2: (1.3, 0.96),
    0.3: (1.5, 0.94),
    0.4: (1.7, 0.92),
    0.5: (1.9, 0.92),
    0.6: (2.3, 0.90),
    0.7: (2.4, 0.90),
    0.8: (2.8, 0.88),
    0.9: (3.8, 0.88),
}


def binary_entropy(d: float) -> float:
    """``-d log2 d - (1-d) log2 (1-d)`` with ``0 log 0 = 0``.

    Raises:
        ConfigurationError: If ``d`` is outside [0, 1].
    """
    if not 0.0 <= d <= 1.0:
        raise ConfigurationError(f"Probability must lie in [0, 1], got {d}")
    if d in (0.0, 1.0):
        return 0.0
    return -d * math.log2(d) - (1.0 - d) * math.log2(1.0 - d)


def rd_bound_inv(d: float) -> float:
    """Minimum rate ``1 - H(D)`` achieving distortion ``d``.

    Raises:
        ConfigurationError: If ``d`` is outside [0, 0.5].
    """
    if not 0.0 <= d <= 0.5:
        raise ConfigurationError(f"Distortion must lie in [0, 0.5], got {d}")
    return 1.0 - binary_entropy(d)


def rd_bound(rate: float) -> float:
    """Shannon distortion ``D*(R)``, the root of ``1 - H(D) = R`` in [0, 0.5].

    Raises:
        ConfigurationError: If ``rate`` is outside [0, 1].
    """
    if not 0.0 <= rate <= 1.0:
        raise ConfigurationError(f"Rate must lie in [0, 1], got {rate}")
    lo, hi = 0.0, 0.5
    # 1 - H(D) decreases on [0, 0.5]
    while hi - lo > _TOLERANCE:
        mid = 0.5 * (lo + hi)
        if rd_bound_inv(mid) > rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def db_gap(d: float, rate: float) -> float:
    """Distance to the bound in dB, ``10 log10(D / D*(R))``.

    Returns ``nan`` when the bound is zero.
    """
    bound = rd_bound(rate)
    if bound <= 0.0 or d <= 0.0:
        return float("nan")
    return 10.0 * math.log10(d / bound)


def bound_curve(points: int = 101) -> List[Tuple[float, float]]:
    """``(D, 1 - H(D))`` pairs evenly spaced over [0, 0.5]."""
    if points < 2:
        raise ConfigurationError("A curve needs at least two points")
    return [
        (d, rd_bound_inv(d))
        for d in (0.5 * i / (points - 1) for i in range(points))
    ]


def tuned_parameters(rate: float) -> Tuple[float, float]:
    """``(L, gamma0)`` for the tabulated rate closest to ``rate``."""
    nearest = min(RATE_TABLE, key=lambda r: (abs(r - rate), r))
    return RATE_TABLE[nearest]
