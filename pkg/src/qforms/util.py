"""Shared helpers: seeded rational test data, precision policy, parallel map."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TypeVar

DEFAULT_PRECISION_CAP = 1 << 14

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class PrecisionPolicy:
    """Escalation schedule for enclosure precision: double up to the cap."""

    start_bits: int = 256
    cap_bits: int = DEFAULT_PRECISION_CAP

    def ladder(self) -> Iterable[int]:
        bits = self.start_bits
        while True:
            yield bits
            if bits >= self.cap_bits:
                return
            bits = min(2 * bits, self.cap_bits)


def random_rational(rng: random.Random, max_abs: int = 100, nonzero: bool = False) -> Fraction:
    """Seeded random rational with |numerator|, denominator <= max_abs."""
    while True:
        num = rng.randint(-max_abs, max_abs)
        if num == 0 and nonzero:
            continue
        return Fraction(num, rng.randint(1, max_abs))


def random_rational_vector(
    rng: random.Random, length: int, max_abs: int = 100, nonzero: bool = False
) -> tuple[Fraction, ...]:
    while True:
        vec = tuple(random_rational(rng, max_abs) for _ in range(length))
        if nonzero and all(c == 0 for c in vec):
            continue
        return vec


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Order-preserving map, optionally on a thread pool.

    Results are identical for any thread count: the work items are pure and
    the output order is fixed by the input order.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
