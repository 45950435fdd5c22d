"""Tagged coefficient lists for the asymptotic series used throughout.

A ``SeriesExpansion`` stores coefficients c_0..c_n of

    sum_j c_j * v**(leading_power + j * power_step)

in the expansion variable tagged by ``variable``.  ``power_step`` is 1 for
ordinary Taylor/Laurent-style series and 1/2 for the square-root series that
appear when a double root splits.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SeriesExpansion:
    family: str
    variable: str
    coefficients: tuple
    truncation_order: int
    leading_power: float = 0.0
    power_step: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           tuple(complex(c) for c in self.coefficients))
        if len(self.coefficients) != self.truncation_order + 1:
            raise ValueError("coefficient list length must be truncation_order + 1")

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, j):
        return self.coefficients[j]

    def evaluate(self, value: complex) -> complex:
        """Sum the stored truncation at the given expansion-variable value."""
        value = complex(value)
        total = 0j
        for j, c in enumerate(self.coefficients):
            p = self.leading_power + j * self.power_step
            if c == 0 and p < 0 and value == 0:
                continue
            total += c * value ** p
        return total


def make_series(family, variable, coefficients, leading_power=0.0, power_step=1.0):
    coefficients = tuple(coefficients)
    return SeriesExpansion(family, variable, coefficients,
                           len(coefficients) - 1, leading_power, power_step)
