"""Reference computations that share no code with quasistat.

Everything here is deliberately naive: brute-force enumeration over all
assignments, scipy root finding, plain frozensets.
"""

import itertools
import math

from scipy.optimize import brentq


def brute_force_occupations(nu, k, kind):
    """All occupation vectors, found by filtering the full product space."""
    cap = 1 if kind == "fermion" else nu
    return {v for v in itertools.product(range(cap + 1), repeat=k) if sum(v) == nu}


def maxwell_boltzmann_count(nu, k):
    """Labelled particles: every particle picks any state independently."""
    return sum(1 for _ in itertools.product(range(k), repeat=nu))


def occupancy(x, kind):
    if kind == "fermion":
        return 1.0 / (math.exp(x) + 1.0) if x < 700 else 0.0
    return 1.0 / math.expm1(x)


def totals(levels, kind, alpha, beta):
    n = e = 0.0
    for k, eps in levels:
        v = k * occupancy(alpha + beta * eps, kind)
        n += v
        e += v * eps
    return n, e


def oracle_alpha(levels, kind, n_target, beta):
    """alpha with sum_i k_i f(alpha + beta eps_i) = n_target, by brentq."""
    if kind == "fermion":
        lo, hi = -50.0, 50.0
        while totals(levels, kind, lo, beta)[0] < n_target:
            lo *= 2
        while totals(levels, kind, hi, beta)[0] > n_target:
            hi *= 2
    else:
        pole = max(-beta * eps for _, eps in levels)
        lo = pole + 1e-13 * max(1.0, abs(pole))
        hi = pole + 1.0
        while totals(levels, kind, hi, beta)[0] > n_target:
            hi = pole + 2 * (hi - pole)
    return brentq(lambda a: totals(levels, kind, a, beta)[0] - n_target, lo, hi,
                  xtol=1e-15, rtol=1e-15, maxiter=500)


def oracle_solve(levels, kind, n_target, e_target):
    """(alpha, beta) meeting both constraints: brentq on beta around brentq on alpha."""
    def gap(beta):
        a = oracle_alpha(levels, kind, n_target, beta)
        return totals(levels, kind, a, beta)[1] - e_target

    lo, hi = -1.0, 1.0
    while gap(lo) < 0:
        lo *= 2
    while gap(hi) > 0:
        hi *= 2
    beta = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    return oracle_alpha(levels, kind, n_target, beta), beta


def central_difference(f, x, i, h):
    up = list(x)
    dn = list(x)
    up[i] += h
    dn[i] -= h
    return (f(up) - f(dn)) / (2 * h)


def exact_log_count(nu, k, kind):
    """log of the exact microstate count, via lgamma."""
    if kind == "fermion":
        if nu > k:
            return -math.inf
        return math.lgamma(k + 1) - math.lgamma(k - nu + 1) - math.lgamma(nu + 1)
    return math.lgamma(k + nu) - math.lgamma(k) - math.lgamma(nu + 1)


# classical finite sets for the M-atom-only collapse check


def classical_pair(a, b):
    return frozenset({a, b})


def classical_power_size(s):
    return len(list(itertools.chain.from_iterable(
        itertools.combinations(sorted(s), r) for r in range(len(s) + 1))))


def classical_subsets_of_size(s, n):
    return {frozenset(c) for c in itertools.combinations(sorted(s), n)}
