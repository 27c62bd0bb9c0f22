"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own computation paths:
series values come from exact-Fraction brute-force partial sums, v-forms
from the closed double-sum formula, logs from mpmath at high precision.
"""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from qforms import validate_spec


@pytest.fixture(scope="session")
def fix_a():
    return validate_spec(2, 1, [0, 1], [(F(1), 1)])


@pytest.fixture(scope="session")
def fix_b():
    return validate_spec(2, 1, [1, 1], [(F(1), 1)])


@pytest.fixture(scope="session")
def fix_c():
    return validate_spec(2, 1, [0, 1], [(F(1), 1), (F(3), 1)])


@pytest.fixture(scope="session")
def fix_d():
    return validate_spec(3, 2, [0, F(1, 3), 1], [(F(5, 7), 2)])


@pytest.fixture(scope="session")
def all_fixtures(fix_a, fix_b, fix_c, fix_d):
    return {"A": fix_a, "B": fix_b, "C": fix_c, "D": fix_d}


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def mpf_to_fraction(x) -> F:
    """Exact rational value of an mpmath float."""
    sign, man, exp, _ = x._mpf_
    val = F(int(man)) * F(2) ** exp
    return -val if sign else val


def oracle_p_eval(spec, x: F) -> F:
    return sum(c * x ** i for i, c in enumerate(spec.P.coefficients))


def oracle_falling(n: int, sigma: int) -> int:
    out = 1
    for i in range(sigma):
        out *= n - i
    return out


def oracle_f_sigma(spec, j: int, k: int, sigma: int, terms: int = 200) -> F:
    """Exact partial sum of the derivative series; error < last kept term."""
    z = spec.points[j - 1][0] * spec.q ** k
    total = F(0)
    prod = F(1)
    for n in range(terms + 1):
        if n >= 1:
            prod *= oracle_p_eval(spec, spec.q ** n)
        if n < sigma:
            continue
        total += oracle_falling(n, sigma) * z ** (n - sigma) / prod
    return total


def oracle_u_coeffs(spec, n: int) -> tuple[F, ...]:
    """Coefficient vector of u_n from the defining sum, x_0 slot first."""
    out = [F(0)]
    for j, k, sigma in spec.var_indices:
        z = spec.points[j - 1][0] * spec.q ** k
        out.append(oracle_falling(n, sigma) * z ** (n - sigma))
    return tuple(out)


def oracle_v_coeffs(spec, n: int) -> tuple[F, ...]:
    """Coefficient vector of v_n from the closed double sum
    x_0 prod_{k<=n} P(q^k) + sum_{i<=n} u_i prod_{k=i+1..n} P(q^k)."""
    prods = [F(1)]  # prods[t] = prod_{k=t+1..n} P(q^k), built backwards
    for t in range(n, 0, -1):
        prods.append(prods[-1] * oracle_p_eval(spec, spec.q ** t))
    prods.reverse()  # prods[i] = prod_{k=i+1..n} P(q^k)
    out = [prods[0]]
    rest = [F(0)] * (spec.n_vars - 1)
    for i in range(n + 1):
        u = oracle_u_coeffs(spec, i)
        for t in range(spec.n_vars - 1):
            rest[t] += u[t + 1] * prods[i]
    return tuple(out + rest)
