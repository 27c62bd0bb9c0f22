"""Problem specification, validation, and the scalar measure parameters.

A problem is q = q1/q2, a polynomial P over Q with deg P >= 1, and points
(alpha_j, s_j). Validation performs every side condition exactly over the
rationals; no floating point is involved anywhere in this module except
through the interval log kernel used for gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .enclosure import Enclosure, ceil_to_grid, log_enclosure, sqrt_enclosure
from .errors import (
    Condition1Violated,
    Condition2Violated,
    InvalidSpec,
    PRootAtQPower,
    QNotAdmissible,
    UndecidableAtCap,
)

DEFAULT_PRECISION_CAP = 1 << 14


@dataclass(frozen=True)
class PolynomialQ:
    """Polynomial over Q stored as coefficients p_0 .. p_d."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise InvalidSpec("polynomial must have degree >= 1")
        if self.coefficients[-1] == 0:
            raise InvalidSpec("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1]

    @property
    def constant(self) -> Fraction:
        return self.coefficients[0]

    def __call__(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def is_monomial(self) -> bool:
        return all(c == 0 for c in self.coefficients[:-1])


@dataclass(frozen=True)
class ProblemSpec:
    """Validated problem instance. Construct via validate_spec only."""

    q_num: int
    q_den: int
    P: PolynomialQ
    points: tuple[tuple[Fraction, int], ...]

    @cached_property
    def q(self) -> Fraction:
        return Fraction(self.q_num, self.q_den)

    @property
    def d(self) -> int:
        return self.P.degree

    @property
    def m(self) -> int:
        return len(self.points)

    @cached_property
    def S(self) -> int:
        return sum(s for _, s in self.points)

    @cached_property
    def eps0(self) -> int:
        return 1 if self.P.is_monomial() else 0

    @cached_property
    def var_indices(self) -> tuple[tuple[int, int, int], ...]:
        """Canonical (j, k, sigma) order for the non-x0 variables; j is 1-based."""
        out = []
        for j, (_, s) in enumerate(self.points, start=1):
            for k in range(self.d):
                for sigma in range(s):
                    out.append((j, k, sigma))
        return tuple(out)

    @cached_property
    def index_of(self) -> dict[tuple[int, int, int], int]:
        """Position of x_{j,k,sigma} inside the dense coefficient vector."""
        return {jks: i + 1 for i, jks in enumerate(self.var_indices)}

    @property
    def n_vars(self) -> int:
        return 1 + self.d * self.S

    def alpha(self, j: int) -> Fraction:
        return self.points[j - 1][0]

    def point_arg(self, j: int, k: int) -> Fraction:
        """The evaluation point alpha_j * q^k."""
        return self.points[j - 1][0] * self.q ** k

    def p_at_qn(self, n: int) -> Fraction:
        return self.P(self.q ** n)

    def to_json(self) -> dict:
        return {
            "q": {"num": str(self.q_num), "den": str(self.q_den)},
            "P": [str(c) for c in self.P.coefficients],
            "points": [{"alpha": str(a), "s": s} for a, s in self.points],
        }


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise InvalidSpec(f"cannot interpret {x!r} as a rational")


def q_power_exponent(x: Fraction, q: Fraction) -> Optional[int]:
    """Exact t with x = q^t, or None. Requires |q| > 1, x != 0.

    |t| is bounded by repeated multiplication (no logarithms): |q|^t is
    strictly monotone, so the loop walks |q|^t toward |x| and stops as
    soon as it passes it.
    """
    if x == 0:
        return None
    if x == 1:
        return 0
    absq = abs(q)
    absx = abs(x)
    if absx == 1:
        # |x| = 1 but x != 1: x = -1 is a q-power only if q^t = -1, which
        # needs |q| = 1; impossible here.
        return None
    invert = absx < 1
    if invert:
        absx = 1 / absx
    t = 0
    power = Fraction(1)
    while power < absx:
        power *= absq
        t += 1
    if power != absx:
        return None
    if invert:
        t = -t
    return t if q ** t == x else None


def _p_nonvanishing_bound(P: PolynomialQ, q: Fraction) -> int:
    """Least N such that |p_d| |q|^(dn) > sum_{nu<d} |p_nu| |q|^(nu n) for all n >= N.

    The ratio of the two sides is strictly monotone in n, so dominance at N
    forces it for every larger n.
    """
    absq = abs(q)
    d = P.degree
    lead = abs(P.leading)
    n = 1
    while True:
        lhs = lead * absq ** (d * n)
        rhs = sum(abs(c) * absq ** (nu * n) for nu, c in enumerate(P.coefficients[:-1]))
        if lhs > rhs:
            return n
        n += 1


def validate_spec(
    q_num: int,
    q_den: int,
    p_coefficients: Sequence,
    points: Sequence,
) -> ProblemSpec:
    """Validate a raw candidate and return the canonical ProblemSpec.

    q is reduced automatically; |q1| <= |q2| is rejected. The remaining
    checks are the exact versions of the admissibility conditions:
    P(q^n) != 0 for n in N (finite dominance bound), alpha_j/alpha_k not a
    q-power for j != k, and alpha_j != P(0) q^n for n >= 1.
    """
    if q_den == 0:
        raise QNotAdmissible("q denominator is zero")
    if q_num == 0:
        raise QNotAdmissible("q is zero")
    g = math.gcd(q_num, q_den)
    q1, q2 = q_num // g, q_den // g
    if q2 < 0:
        q1, q2 = -q1, -q2
    if abs(q1) <= abs(q2):
        raise QNotAdmissible(f"|q1| > |q2| required, got q = {q1}/{q2}")
    q = Fraction(q1, q2)

    P = PolynomialQ(tuple(_as_fraction(c) for c in p_coefficients))

    if not points:
        raise InvalidSpec("at least one point (alpha_j, s_j) is required")
    pts = []
    for alpha_raw, s in points:
        alpha = _as_fraction(alpha_raw)
        if alpha == 0:
            raise InvalidSpec("alpha_j must be nonzero")
        if not isinstance(s, int) or s < 1:
            raise InvalidSpec("multiplicities s_j must be positive integers")
        pts.append((alpha, int(s)))

    # P(q^n) != 0 for all n >= 1, via the dominance bound
    n_star = _p_nonvanishing_bound(P, q)
    for n in range(1, n_star + 1):
        if P(q ** n) == 0:
            raise PRootAtQPower(n)

    # condition 1: alpha_j / alpha_k not in q^Z
    for j in range(len(pts)):
        for k in range(j + 1, len(pts)):
            t = q_power_exponent(pts[j][0] / pts[k][0], q)
            if t is not None:
                raise Condition1Violated(j + 1, k + 1, t)

    # condition 2: alpha_j not in P(0) q^N (N = {1, 2, ...}); vacuous if P(0) = 0
    p0 = P.constant
    if p0 != 0:
        for j, (alpha, _) in enumerate(pts, start=1):
            t = q_power_exponent(alpha / p0, q)
            if t is not None and t >= 1:
                raise Condition2Violated(j, t)

    return ProblemSpec(q1, q2, P, tuple(pts))


def clearing_denominator(spec: ProblemSpec) -> int:
    """Least positive D with D*P in Z[z] and D*alpha_j*q^k in Z (0 <= k < d)."""
    dens = [c.denominator for c in spec.P.coefficients]
    for j in range(1, spec.m + 1):
        for k in range(spec.d):
            dens.append(spec.point_arg(j, k).denominator)
    return math.lcm(*dens)


def gamma_enclosure(spec: ProblemSpec, precision_bits: int) -> Enclosure:
    """Enclosure of log|q2| / log|q1| with width exactly 2^-precision_bits.

    Exactly [0, 0] when |q2| = 1. Otherwise the returned interval is
    re-centred on a dyadic midpoint so that its width is a deterministic
    function of precision_bits (precision_bits + 1 at least halves it).
    """
    if abs(spec.q_den) == 1:
        return Enclosure.zero()
    pb = precision_bits
    bits = pb + 8
    target_core = Fraction(1, 1 << (pb + 4))
    while True:
        num = log_enclosure(abs(spec.q_den), bits)
        den = log_enclosure(abs(spec.q_num), bits)
        core = num / den
        if core.width <= target_core:
            break
        bits *= 2
    mid = ceil_to_grid(core.midpoint, pb + 4)
    half = Fraction(1, 1 << (pb + 1))
    return Enclosure(mid - half, mid + half)


@dataclass(frozen=True)
class MeasureParams:
    """The scalar quantities steering the measure machinery."""

    S: int
    eps0: int
    gamma: Enclosure
    M: Enclosure
    mu: Optional[Enclosure]
    applicable: bool
    precision_bits: int

    def to_json(self) -> dict:
        return {
            "S": self.S,
            "eps0": self.eps0,
            "gamma": self.gamma.to_json(),
            "M": self.M.to_json(),
            "mu": self.mu.to_json() if self.mu is not None else "inapplicable",
            "applicable": self.applicable,
            "precision_bits": self.precision_bits,
        }


def m_enclosure(spec: ProblemSpec, precision_bits: int) -> Enclosure:
    """Enclosure of M: dS + 1/2 + sqrt(d^2 S^2 + 1/4) in the monomial case,
    dS + 1 + sqrt(dS (dS + 1)) otherwise."""
    ds = Fraction(spec.d * spec.S)
    if spec.eps0 == 1:
        return sqrt_enclosure(ds * ds + Fraction(1, 4), precision_bits + 1) + (
            ds + Fraction(1, 2)
        )
    return sqrt_enclosure(ds * (ds + 1), precision_bits + 1) + (ds + 1)


def measure_params(
    spec: ProblemSpec,
    precision_bits: int = 128,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> MeasureParams:
    """Compute S, eps0, gamma, M, mu and decide gamma < 1/M rigorously.

    The strict inequality is decided through the product M*gamma: its
    enclosure either certifies hi < 1 (applicable) or lo >= 1
    (inapplicable); otherwise precision doubles up to the cap, and a tie
    at the cap raises UndecidableAtCap rather than guessing.
    """
    pb = precision_bits
    while True:
        gamma = gamma_enclosure(spec, pb)
        M = m_enclosure(spec, pb)
        prod = M * gamma
        if prod.hi < 1:
            applicable = True
            break
        if prod.lo >= 1:
            applicable = False
            break
        if pb >= precision_cap:
            raise UndecidableAtCap(
                f"gamma vs 1/M not separated at {pb} bits (M*gamma in "
                f"[{prod.lo}, {prod.hi}])"
            )
        pb = min(2 * pb, precision_cap)

    mu = None
    if applicable:
        # (M - 1) / (1 - M*gamma); at pb the denominator is certified
        # positive (that is the applicability certificate), so the first
        # pass always yields an enclosure, then refinement proceeds up to
        # the cap or the requested width.
        mu_pb = pb
        target = Fraction(1, 1 << precision_bits)
        while True:
            gamma_mu = gamma_enclosure(spec, mu_pb)
            M_mu = m_enclosure(spec, mu_pb)
            denom = 1 - M_mu * gamma_mu
            if denom.lo > 0:
                mu = (M_mu - 1) / denom
                if mu.width <= target or mu_pb >= precision_cap:
                    break
            elif mu is not None and mu_pb >= precision_cap:
                break
            mu_pb = min(2 * mu_pb, precision_cap)

    return MeasureParams(
        S=spec.S,
        eps0=spec.eps0,
        gamma=gamma,
        M=M,
        mu=mu,
        applicable=applicable,
        precision_bits=pb,
    )
