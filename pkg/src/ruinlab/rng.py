"""Counter-based splittable random streams (splitmix64).

Every simulated path gets its own stream: path i under seed s draws
from Stream(s, i). Draw j is a pure function of (seed, stream, j), so
results are reproducible for any thread count and paths can be replayed
in isolation. The mixer is splitmix64 (Steele, Lea, Flood 2014), whose
64-bit finalizer passes BigCrush; uniforms take the top 53 bits, giving
u in [0, 1) on the standard double grid.
"""
from __future__ import annotations

GOLD = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """The splitmix64 finalizer on 64-bit words."""
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class Stream:
    """Deterministic stream of uniforms: draw i of stream s under seed.

    u01() is stateful only through a counter; state never mixes between
    streams, and (seed, stream) -> base is itself one mix64 application
    so adjacent stream ids decorrelate.
    """

    __slots__ = ("base", "i")

    def __init__(self, seed: int, stream: int = 0):
        self.base = mix64(mix64(seed) ^ ((stream * GOLD + 1) & MASK))
        self.i = 0

    def u01(self) -> float:
        self.i += 1
        return (mix64((self.base + self.i * GOLD) & MASK) >> 11) * _INV53

    def sign(self, p: float) -> int:
        """+1 with probability p, else -1. Consumes one uniform."""
        return 1 if self.u01() < p else -1
