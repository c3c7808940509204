"""Independent enumeration oracles for the test suite.

Everything here is plain itertools over small ranges -- no imports from the
package under test -- so expected values are frozen from a path that shares
no code with the implementations being checked.
"""

import itertools
from collections import Counter


def bin_tuples(exponents, N, u):
    """Counter mapping power-sum vectors to the number of u-tuples hitting them."""
    bins = Counter()
    for t in itertools.product(range(-N, N + 1), repeat=u):
        bins[tuple(sum(n ** k for n in t) for k in exponents)] += 1
    return bins


def count_moment(exponents, N, u):
    """Unit-weight moment: sum of squared bin counts."""
    return sum(r * r for r in bin_tuples(exponents, N, u).values())


def weighted_moment(exponents, N, u, values):
    """Weighted moment by direct testing of every 2u-tuple.

    ``values[n + N]`` is the complex weight of n.  Returns a complex number
    whose imaginary part must vanish.
    """
    total = 0j
    for t in itertools.product(range(-N, N + 1), repeat=2 * u):
        ns, ms = t[:u], t[u:]
        if all(
            sum(n ** k for n in ns) == sum(m ** k for m in ms) for k in exponents
        ):
            w = 1 + 0j
            for n in ns:
                w *= values[n + N]
            for m in ms:
                w *= values[m + N].conjugate()
            total += w
    return total


def shifted_count(N, u, k, h):
    """Unit-weight count of solutions of the shifted full-degree system."""
    total = 0
    for t in itertools.product(range(-N, N + 1), repeat=2 * u):
        ns, ms = t[:u], t[u:]
        if all(
            sum(n ** j for n in ns) - sum(m ** j for m in ms) == h[j - 1]
            for j in range(1, k + 1)
        ):
            total += 1
    return total
