"""Independent reference computations used as test oracles."""

import itertools

import numpy as np


def cofactor_det(m):
    """Laplace expansion along the first row; exponential cost, tests only."""
    m = [list(r) for r in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def permutation_parity(perm):
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def unit_disc_matrix(rng, n):
    r = np.sqrt(rng.uniform(size=(n, n)))
    return r * np.exp(2j * np.pi * rng.uniform(size=(n, n)))


# filled by the acceptance tests, printed in the pytest terminal summary
ACCEPTANCE_LINES: list[str] = []
