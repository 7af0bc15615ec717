"""Demo source chains used by the figure recipes, the README, and the tests."""

from .markov import GeneratorMatrix, validate_generator

BINARY_RATES = [
    [-0.25, 0.25],
    [0.75, -0.75],
]

FOUR_STATE_RATES = [
    [-1.00, 0.25, 0.15, 0.60],
    [0.40, -0.85, 0.30, 0.15],
    [0.20, 0.85, -1.15, 0.10],
    [0.15, 0.25, 0.45, -0.85],
]


def binary_demo() -> GeneratorMatrix:
    return validate_generator(BINARY_RATES)


def four_state_demo() -> GeneratorMatrix:
    return validate_generator(FOUR_STATE_RATES)
