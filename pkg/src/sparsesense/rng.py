"""Deterministic, portable random number generation.

A splitmix64 mixer seeds a xoshiro256++ stream.  Everything downstream of
the synthetic-data generator draws from this generator so that outputs are
bit-identical across runs and platforms.  Gaussian variates come from
Box-Muller with both outputs consumed in order; uniform integers use
unbiased rejection sampling.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_TWO53 = float(1 << 53)


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256pp:
    """xoshiro256++ with splitmix64 seeding.

    Pure-Python 64-bit arithmetic; slow per call but fast enough for the
    few million draws the synthetic scenarios need.
    """

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64_next(state)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    # ------------------------------------------------------------------
    # derived draws

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / _TWO53

    def random_open(self) -> float:
        """Uniform double in (0, 1], safe as a log argument."""
        return ((self.next_u64() >> 11) + 1) / _TWO53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def uniforms(self, lo: float, hi: float, n: int) -> np.ndarray:
        out = np.empty(n)
        for i in range(n):
            out[i] = lo + (hi - lo) * self.random()
        return out

    def coin(self) -> bool:
        """Fair coin from the top bit."""
        return bool(self.next_u64() >> 63)

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def normals(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """n Gaussian draws via Box-Muller; both outputs of each pair are
        consumed in order, the trailing one discarded when n is odd."""
        out = np.empty(n)
        i = 0
        while i < n:
            u1 = self.random_open()
            u2 = self.random()
            radius = math.sqrt(-2.0 * math.log(u1))
            out[i] = radius * math.cos(2.0 * math.pi * u2)
            if i + 1 < n:
                out[i + 1] = radius * math.sin(2.0 * math.pi * u2)
            i += 2
        if mean != 0.0 or std != 1.0:
            out = mean + std * out
        return out

    def sample_without_replacement(self, population: int, k: int) -> np.ndarray:
        """k distinct integers from [0, population), in selection order
        (partial Fisher-Yates)."""
        if k > population:
            raise ValueError("cannot sample more items than the population")
        pool = np.arange(population, dtype=np.int64)
        for i in range(k):
            j = i + self.below(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k].copy()


def substream(seed: int, index: int) -> Xoshiro256pp:
    """Deterministic child stream for (seed, index), e.g. one per time frame."""
    child = (seed ^ ((_GOLDEN * ((index + 1) & _MASK64)) & _MASK64)) & _MASK64
    _, mixed = splitmix64_next(child)
    return Xoshiro256pp(mixed)
