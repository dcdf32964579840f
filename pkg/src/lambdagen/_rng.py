"""SplitMix64: the one pseudo-random source used by every sampler backend.

A draw is ``(next_u64() >> 11) * 2**-53``, a double in ``[0, 1)``.  The compiled
kernels implement the same arithmetic, so a seed gives bit-identical draws on
either backend.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_M53 = 2.0 ** -53


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for worker ``index``; distinct indices give distinct seeds.

    ``mix64`` is a bijection and ``GOLDEN_GAMMA`` is odd, so the map is
    injective in ``index`` modulo 2**64.
    """
    return mix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        self.state = s = (self.state + GOLDEN_GAMMA) & MASK64
        s = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        s = ((s ^ (s >> 27)) * 0x94D049BB133111EB) & MASK64
        return ((s ^ (s >> 31)) >> 11) * _TWO_M53
