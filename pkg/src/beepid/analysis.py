"""Closed-form behaviour of the identification protocol.

With n stations beeping independently at per-slot probability p, a silent
candidate is falsely accepted exactly when each of its own would-be beeps
lands on a slot some real station covered. The per-slot kill probability
is p*(1-p)^n, giving a false-identification probability of

    (1 - p*(1-p)^n)^T

over a period of T slots. Minimizing over p yields p_opt = 1/(n+1); the
period length needed to push the false-identification probability below a
target then follows by solving the power equation for T.
"""

from __future__ import annotations

import math


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"station count must be >= 1, got {n}")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")


def coverage_prob(n: int, p: float, k: int) -> float:
    """Probability that k fixed slots are each covered by at least one of n beepers.

    Each slot is covered independently with probability 1 - (1-p)^n.
    """
    _check_n(n)
    _check_p(p)
    if k < 0:
        raise ValueError(f"slot count must be >= 0, got {k}")
    per_slot = -math.expm1(n * math.log1p(-p)) if p < 1.0 else 1.0
    return per_slot**k

def false_id_prob(n: int, p: float, T: int) -> float:
    """Probability that a silent station is falsely identified: (1 - p(1-p)^n)^T.

    Evaluated as exp(T * log1p(-x)) with x = p(1-p)^n, which stays accurate
    when x is small and T is large.
    """
    _check_n(n)
    _check_p(p)
    if T < 1:
        raise ValueError(f"period length must be >= 1, got {T}")
    x = p * (1.0 - p) ** n
    if x == 0.0:
        return 1.0
    return math.exp(T * math.log1p(-x))


def optimal_p(n: int) -> float:
    """Beep probability minimizing the false-identification probability: 1/(n+1)."""
    _check_n(n)
    return 1.0 / (n + 1)


def optimal_T(n: int, target: float | None = None) -> float:
    """Period length driving the false-identification probability to ``target``.

    Uses the e-approximation of the optimal base, (1 - 1/(e(n+1)))^T = target,
    so T = ln(target) / ln(1 - 1/(e(n+1))). The default target is 1/n. The
    result is real-valued; round up for a usable slot count. n = 1 with the
    default target degenerates to 0 (the target is already 1).
    """
    _check_n(n)
    if target is None:
        target = 1.0 / n
    if not 0.0 < target <= 1.0:
        raise ValueError(f"target probability must be in (0, 1], got {target}")
    if target == 1.0:
        return 0.0
    base = 1.0 / (math.e * (n + 1))
    return math.log(target) / math.log1p(-base)


def optimal_T_exact(n: int, target: float | None = None) -> float:
    """As optimal_T, but with the exact base 1 - p_opt (1-p_opt)^n, p_opt = 1/(n+1)."""
    _check_n(n)
    if target is None:
        target = 1.0 / n
    if not 0.0 < target <= 1.0:
        raise ValueError(f"target probability must be in (0, 1], got {target}")
    if target == 1.0:
        return 0.0
    p_opt = 1.0 / (n + 1)
    base = p_opt * (1.0 - p_opt) ** n
    return math.log(target) / math.log1p(-base)
