"""Counter-based 64-bit RNG used to seed every output sample.

All randomness in a run derives from ``(master_seed, sample_ordinal)``,
so results are byte-identical under any worker count or schedule. The
constants below are part of the output contract: an alternate
implementation that reproduces this seeding scheme and draw order
reproduces a run exactly.

Seed derivation::

    s = master_seed XOR (ordinal * 0x9E3779B97F4A7C15 mod 2**64)
    seed = splitmix64_finalize(s)

Per-sample stream (SplitMix64): state advances by ``0x9E3779B97F4A7C15``
per draw and each output is the finalized state. Uniform doubles in
``[0, 1)`` take the top 53 bits: ``(u64 >> 11) * 2**-53``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_finalize(s: int) -> int:
    """SplitMix64 finalizer; all arithmetic mod 2**64."""
    s &= MASK64
    s ^= s >> 30
    s = (s * _MIX1) & MASK64
    s ^= s >> 27
    s = (s * _MIX2) & MASK64
    s ^= s >> 31
    return s


def derive_sample_seed(master_seed: int, sample_ordinal: int) -> int:
    """Map a master seed and a sample ordinal to that sample's 64-bit seed."""
    s = (master_seed & MASK64) ^ ((sample_ordinal * GOLDEN_GAMMA) & MASK64)
    return splitmix64_finalize(s)


class SampleStream:
    """SplitMix64 generator owned by a single output sample.

    ``seed`` is retained so plans can record their provenance.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return splitmix64_finalize(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1), 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53
