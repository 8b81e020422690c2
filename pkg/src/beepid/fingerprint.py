"""Deterministic beep-pattern generation.

A device derives its beep schedule for one period of T slots from its
numeric identifier: the identifier seeds a SplitMix64 stream, and slot t
beeps when the t-th 64-bit draw falls below floor(p * 2^64). Transmitter
and receiver regenerate the identical pattern from the id alone, so no
pattern ever has to be communicated.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Device identifiers are opaque unsigned 64-bit integers.
DeviceId = int


@dataclass(frozen=True)
class Prng:
    """SplitMix64 state. The output stream is a pure function of the seed."""

    state: int

    def __post_init__(self) -> None:
        if not 0 <= self.state <= MASK64:
            raise ValueError(f"PRNG state out of u64 range: {self.state}")


def prng_next(prng: Prng) -> tuple[Prng, int]:
    """Advance a SplitMix64 state and return (new state, output word).

    Bit-exact SplitMix64: every realization of this generator, in any
    language, produces the same word sequence for the same seed, which is
    what keeps transmitter and receiver pattern replay in lockstep.
    """
    state = (prng.state + _GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    z = z ^ (z >> 31)
    return Prng(state), z


def beep_threshold(p: float) -> int:
    """Integer threshold realizing ``rand(0,1) <= p`` as ``u < threshold``.

    Exact for any double p in [0, 1]: scaling by 2^64 only shifts the
    exponent. p = 1 maps to 2^64, above every u64, so it always beeps.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"beep probability must be in [0, 1], got {p}")
    if p >= 1.0:
        return 1 << 64
    return int(p * 2.0**64)


@dataclass(frozen=True)
class BeepPattern:
    """One device's beep schedule over a period of ``period_slots`` slots.

    ``bits`` holds the schedule as a little-endian bit mask: slot t
    (1-indexed, t in [1, T]) is bit t-1.
    """

    bits: int
    period_slots: int

    def __post_init__(self) -> None:
        if self.period_slots < 1:
            raise ValueError("period_slots must be >= 1")
        if not 0 <= self.bits < (1 << self.period_slots):
            raise ValueError("pattern bits exceed the period length")

    @property
    def slots(self) -> tuple[int, ...]:
        """Per-slot beep flags, slot 1 first."""
        return tuple((self.bits >> t) & 1 for t in range(self.period_slots))

    def beeps_at(self, slot: int) -> bool:
        """Whether the device beeps at 1-indexed slot ``slot``."""
        if not 1 <= slot <= self.period_slots:
            raise ValueError(f"slot {slot} outside [1, {self.period_slots}]")
        return bool((self.bits >> (slot - 1)) & 1)

    def beep_count(self) -> int:
        return self.bits.bit_count()


def generate_pattern(device_id: DeviceId, p: float, period_slots: int) -> BeepPattern:
    """Generate the beep pattern a device with ``device_id`` transmits.

    The id seeds the PRNG directly; slot t (1-indexed) beeps iff the t-th
    draw u satisfies u < floor(p * 2^64). Exactly one draw is consumed per
    slot, beep or not, so replay stays aligned slot for slot.
    """
    if period_slots < 1:
        raise ValueError("period_slots must be >= 1")
    threshold = beep_threshold(p)
    # Inlined prng_next: this loop dominates pattern-heavy simulations.
    state = device_id & MASK64
    bits = 0
    for t in range(period_slots):
        state = (state + _GAMMA) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        if (z ^ (z >> 31)) < threshold:
            bits |= 1 << t
    return BeepPattern(bits=bits, period_slots=period_slots)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive an independent child seed from a master seed and coordinates.

    Feeds each coordinate through the SplitMix64 output function, so child
    streams for distinct coordinate tuples are decorrelated and the mapping
    is order-independent across grid iteration schemes.
    """
    state = master_seed & MASK64
    for idx in indices:
        state = (state + (_GAMMA * (idx + 1))) & MASK64
        _, state = prng_next(Prng(state))
    return state
