"""Seeded random specializations: exact rationals for the parameter symbols."""

from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional

import numpy as np

from qweyl import GenericityError

Assignment = Dict[str, Fraction]


class SpecializationSampler:
    """
    Draws distinct rationals a/b with a, b in [low, high] and a != b, so no value is 1.

    Usage:
        sampler = SpecializationSampler(seed=0)
        assignment = sampler.draw(["q", "h1", "h2", "e1"])
    """

    def __init__(self, seed: int = 0, low: int = 2, high: int = 97, max_tries: int = 64):
        self.rng = np.random.default_rng(seed)
        self.low, self.high, self.max_tries = low, high, max_tries

    def rational(self) -> Fraction:
        while True:
            num, den = (int(v) for v in self.rng.integers(self.low, self.high + 1, size=2))
            if num != den:
                return Fraction(num, den)

    def draw(
        self,
        names: Iterable[str],
        guard: Optional[Callable[[Assignment], bool]] = None,
        derived: Optional[Mapping[str, Callable[[Assignment], Fraction]]] = None,
        fixed: Optional[Mapping[str, Fraction]] = None,
    ) -> Assignment:
        """
        One assignment for `names`. `derived` symbols are computed from the drawn ones (constraint elimination),
        `fixed` ones are copied in as given. Assignments failing `guard` are redrawn.
        """
        names = [n for n in names if n not in (derived or {}) and n not in (fixed or {})]
        for _ in range(self.max_tries):
            values, seen = {}, set()
            for n in names:
                v = self.rational()
                while v in seen:
                    v = self.rational()
                seen.add(v)
                values[n] = v
            values.update({k: Fraction(v) for k, v in (fixed or {}).items()})
            for n, fn in (derived or {}).items():
                values[n] = Fraction(fn(values))
            if guard is None or guard(values):
                return values
        raise GenericityError(f"no generic assignment found in {self.max_tries} draws")

    def draw_many(self, names: Iterable[str], count: int, **kwargs) -> list:
        names = list(names)
        return [self.draw(names, **kwargs) for _ in range(count)]
