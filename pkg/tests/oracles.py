"""Independent reference implementations the tests check the package against.

Everything here is deliberately written against different machinery than
the package (numpy uint64 wraparound instead of Python int masking, a
direct Taylor series instead of scipy) so the two sides of each check
cannot share a bug.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def ref_splitmix64(seed: int, count: int) -> list[int]:
    """SplitMix64 output words via numpy uint64 arithmetic."""
    state = np.uint64(seed & ((1 << 64) - 1))
    out = []
    with np.errstate(over="ignore"):
        for _ in range(count):
            state = state + _GAMMA
            z = state
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            z = z ^ (z >> np.uint64(31))
            out.append(int(z))
    return out


def ref_pattern_slots(device_id: int, p: float, period_slots: int) -> list[int]:
    """Per-slot beep flags derived straight from the reference generator."""
    threshold = (1 << 64) if p >= 1.0 else int(p * 2.0**64)
    words = ref_splitmix64(device_id, period_slots)
    return [1 if w < threshold else 0 for w in words]


def ref_pattern_bits(device_id: int, p: float, period_slots: int) -> int:
    bits = 0
    for t, flag in enumerate(ref_pattern_slots(device_id, p, period_slots)):
        if flag:
            bits |= 1 << t
    return bits


def bessel_j0_series(x: float) -> float:
    """J0 by direct Taylor series: sum (-1)^k (x^2/4)^k / (k!)^2.

    Converges fast for the small arguments the Doppler model produces;
    terms are added until below 1e-16, giving absolute error well under
    1e-6 for |x| <= 10.
    """
    q = x * x / 4.0
    term = 1.0
    total = 1.0
    for k in range(1, 200):
        term *= -q / (k * k)
        total += term
        if abs(term) < 1e-16:
            break
    return total


FIRST_J0_ZERO = 2.404825557695773
