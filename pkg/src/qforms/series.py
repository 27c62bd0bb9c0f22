"""Rigorous enclosures of the series values f^(sigma)(alpha_j q^k).

The series sum_{n >= sigma} sigma! C(n,sigma) z^(n-sigma) / prod_{i<=n} P(q^i)
is summed exactly over the rationals and truncated once the remaining tail
is provably geometric with ratio <= 1/2:

  * beyond the dominance index k*, |P(q^i)| >= |p_d| |q|^(d i) / 2, and
  * past n >= 2 sigma the binomial ratio (n+1)/(n+1-sigma) is <= 2,

so the tail is at most twice the first omitted term. Everything downstream
(linear combinations, form evaluations, residuals) consumes the resulting
enclosures or stays exactly rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .enclosure import Enclosure
from .errors import PrecisionCapExceeded
from .forms import (
    FormLike,
    evaluate_exact,
    falling_factorial,
    p_at,
    u_form,
    v_form,
    _state,
)
from .problem import ProblemSpec

_MAX_SERIES_TERMS = 1_000_000


def dominance_index(spec: ProblemSpec) -> int:
    """Least k* >= 1 with sum_{nu<d} |p_nu| |q|^(nu k) <= |p_d| |q|^(d k) / 2
    for k = k*; monotonicity extends the bound to every k >= k*."""
    st = _state(spec)
    with st.lock:
        if st.dominance_k is not None:
            return st.dominance_k
        absq = abs(spec.q)
        lead = abs(spec.P.leading)
        k = 1
        while True:
            lhs = sum(
                abs(c) * absq ** (nu * k)
                for nu, c in enumerate(spec.P.coefficients[:-1])
            )
            if 2 * lhs <= lead * absq ** (spec.d * k):
                st.dominance_k = k
                return k
            k += 1


def f_derivative_enclosure(
    spec: ProblemSpec, j: int, k: int, sigma: int, precision_bits: int
) -> Enclosure:
    """Enclosure of f^(sigma)(alpha_j q^k), width <= 2^-precision_bits."""
    if not (1 <= j <= spec.m and 0 <= k < spec.d and 0 <= sigma < spec.points[j - 1][1]):
        raise ValueError(f"(j, k, sigma) = ({j}, {k}, {sigma}) outside the value slots")
    z = spec.point_arg(j, k)
    absz = abs(z)
    absq = abs(spec.q)
    lead = abs(spec.P.leading)
    kstar = dominance_index(spec)
    threshold = Fraction(1, 1 << (precision_bits + 1))

    total = Fraction(0)
    prod = Fraction(1)
    for i in range(1, sigma + 1):
        prod *= p_at(spec, i)
    n = sigma
    while True:
        term = falling_factorial(n, sigma) * z ** (n - sigma) / prod
        in_regime = (
            n >= 2 * sigma
            and n + 1 >= kstar
            and 8 * absz <= lead * absq ** (spec.d * (n + 1))
        )
        if in_regime and 4 * abs(term) <= threshold:
            tail = 2 * abs(term)
            break
        total += term
        n += 1
        prod *= p_at(spec, n)
        if n - sigma > _MAX_SERIES_TERMS:
            raise PrecisionCapExceeded(
                f"series for f^({sigma}) at alpha_{j} q^{k} did not localize"
            )
    return Enclosure(total - tail, total + tail).outward_round(precision_bits + 2)


@dataclass(frozen=True)
class ValueTable:
    """All dS enclosures f^(sigma)(alpha_j q^k) at a common precision."""

    entries: dict[tuple[int, int, int], Enclosure]
    precision_bits: int


def value_table(spec: ProblemSpec, precision_bits: int) -> ValueTable:
    """Memoized ValueTable per (spec, precision)."""
    st = _state(spec)
    with st.lock:
        table = st.value_tables.get(precision_bits)
        if table is None:
            entries = {
                (j, k, sigma): f_derivative_enclosure(spec, j, k, sigma, precision_bits)
                for (j, k, sigma) in spec.var_indices
            }
            table = ValueTable(entries, precision_bits)
            st.value_tables[precision_bits] = table
        return table


def lambda_enclosure(spec: ProblemSpec, A: Sequence, precision_bits: int) -> Enclosure:
    """Enclosure of A_0 + sum A_{j,k,sigma} f^(sigma)(alpha_j q^k)."""
    if len(A) != spec.n_vars:
        raise ValueError(f"A must have length {spec.n_vars}")
    table = value_table(spec, precision_bits)
    acc = Enclosure.point(Fraction(A[0]))
    for idx, jks in enumerate(spec.var_indices, start=1):
        c = Fraction(A[idx])
        if c != 0:
            acc = acc + table.entries[jks] * c
    return acc


@dataclass(frozen=True)
class OmegaVector:
    """Evaluation vector (omega_0, omega_rest) with omega_0 enclosing
    -sum omega_rest f^(sigma)(alpha_j q^k)."""

    omega0: Enclosure
    rest: tuple[Fraction, ...]
    precision_bits: int

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.rest)


def omega_from_vector(spec: ProblemSpec, rest: Sequence, precision_bits: int) -> OmegaVector:
    """Build the omega vector of a coefficient vector (no x_0 slot)."""
    rest_f = tuple(Fraction(c) for c in rest)
    if len(rest_f) != spec.n_vars - 1:
        raise ValueError(f"rest must have length {spec.n_vars - 1}")
    table = value_table(spec, precision_bits)
    acc = Enclosure.zero()
    for jks, c in zip(spec.var_indices, rest_f):
        if c != 0:
            acc = acc + table.entries[jks] * c
    return OmegaVector(-acc, rest_f, precision_bits)


def evaluate_form(form: FormLike, omega: OmegaVector) -> Enclosure:
    """Enclosure of the form at omega; an exact point when the x_0 slot is 0."""
    if len(form.coeffs) != len(omega.rest) + 1:
        raise ValueError("form and omega are over different variable sets")
    exact = sum(
        (Fraction(c) * r for c, r in zip(form.coeffs[1:], omega.rest)),
        start=Fraction(0),
    )
    x0c = Fraction(form.coeffs[0])
    if x0c == 0:
        return Enclosure.point(exact)
    return omega.omega0 * x0c + exact


def v_value_sequence(spec: ProblemSpec, vector: Sequence, n_max: int) -> list[Fraction]:
    """v_0(omega) .. v_{n_max}(omega) by the value recurrence
    v_n = P(q^n) v_{n-1} + u_n(omega); vector includes the x_0 slot.

    The powers (alpha_j q^k)^(n-sigma) inside u_n are updated incrementally,
    so each step costs O(dS) multiplications.
    """
    vec = tuple(Fraction(c) for c in vector)
    # one (z, sigma, weight, z^(n-sigma)) slot per active variable
    slots = []
    for idx, (j, k, sigma) in enumerate(spec.var_indices):
        c = vec[idx + 1]
        if c != 0:
            z = spec.point_arg(j, k)
            slots.append([z, sigma, c, z ** (-sigma)])

    def u_at(n: int) -> Fraction:
        total = Fraction(0)
        for z, sigma, c, zpow in slots:
            ff = falling_factorial(n, sigma)
            if ff != 0:
                total += c * ff * zpow
        return total

    vals = [vec[0] + u_at(0)]
    for n in range(1, n_max + 1):
        for slot in slots:
            slot[3] *= slot[0]
        vals.append(p_at(spec, n) * vals[-1] + u_at(n))
    return vals


def functional_equation_residual(
    spec: ProblemSpec,
    omega_rest: Sequence,
    omega0: Union[Fraction, int, str],
    N: int,
) -> list[Fraction]:
    """First N+1 power-series coefficients of
    (1 - p_0 z) F(z) - sum_{nu=1..d} p_nu q^nu z F(q^nu z) - R(z),
    where F generates v_n(omega) and R(z) = omega_0 + sum u_n(omega) z^n.

    Works for arbitrary rational omega (the identity is unconditional);
    v_n(omega) is obtained by evaluating the cached v-forms, which makes
    this a genuine cross-check of the form recurrence rather than a
    restatement of the value recurrence.
    """
    om0 = Fraction(omega0)
    rest = tuple(Fraction(c) for c in omega_rest)
    vec = (om0,) + rest
    uvec = (Fraction(0),) + rest
    v_vals = [evaluate_exact(v_form(spec, n), vec) for n in range(N + 1)]
    u_vals = [evaluate_exact(u_form(spec, n), uvec) for n in range(N + 1)]
    p = spec.P.coefficients
    q = spec.q
    residuals = [v_vals[0] - om0 - u_vals[0]]
    for n in range(1, N + 1):
        lhs = v_vals[n] - p[0] * v_vals[n - 1]
        conv = sum(
            (p[nu] * q ** (nu * n) * v_vals[n - 1] for nu in range(1, spec.d + 1)),
            start=Fraction(0),
        )
        residuals.append(lhs - conv - u_vals[n])
    return residuals
