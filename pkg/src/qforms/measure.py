"""Certified rational lower bounds on |A_0 + sum A f^(sigma)(alpha_j q^k)|.

The certificate replays the measure argument on concrete data: pick (l, n)
so that the integerized form gives |w_{l,n}(A)| >= 1 while the same form at
the constrained omega vector satisfies |w_{l,n}(omega)| <= 1/2; then

    |Lambda(A)| = |A_0 - omega_0| >= (|w_{l,n}(A)| - 1/2) / |x_0 coeff|.

The exponent scan brute-forces small height classes and compares the
observed exponent -log|Lambda| / log H against mu.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .enclosure import Enclosure, ceil_sqrt, log_enclosure, sqrt_enclosure
from .errors import (
    DimensionTooLargeForExhaustive,
    NotApplicable,
    PrecisionCapExceeded,
    RetryCapExceeded,
    ZeroVector,
)
from .forms import w_form
from .problem import MeasureParams, ProblemSpec, measure_params
from .series import OmegaVector, evaluate_form, lambda_enclosure, omega_from_vector
from .util import PrecisionPolicy, parallel_map
from .verifier import log_of_enclosure

HALF = Fraction(1, 2)


def _a_constant(spec: ProblemSpec, params: MeasureParams, bits: int = 96) -> Enclosure:
    """a = (1 - M gamma)/d * sqrt((dS)^2 + (1 - eps0) dS + eps0^2/4)."""
    ds = spec.d * spec.S
    radicand = (
        Fraction(ds * ds)
        + Fraction((1 - spec.eps0) * ds)
        + Fraction(spec.eps0 * spec.eps0, 4)
    )
    root = sqrt_enclosure(radicand, bits)
    factor = (1 - params.M * params.gamma) * Fraction(1, spec.d)
    return factor * root


def _n0_for(spec: ProblemSpec, params: MeasureParams, l: int) -> int:
    """ceil((M - 1) l / d) with outward rounding, bumped up to S*l."""
    upper = (params.M - 1).hi * l / spec.d
    n0 = math.ceil(upper)
    return max(n0, spec.S * l)


def choose_parameters(
    spec: ProblemSpec, params: MeasureParams, H: int
) -> tuple[int, int]:
    """Starting (l, n0) for height H >= 2, following the measure argument:
    l ~ sqrt(L / a) with L = log H / log|q1|, n0 = ceil((M-1) l / d)."""
    if not params.applicable:
        raise NotApplicable("gamma < 1/M fails for this spec")
    if H < 2:
        raise ValueError("H must be at least 2")
    L = log_enclosure(H, 64) / log_enclosure(abs(spec.q_num), 64)
    a = _a_constant(spec, params)
    l = max(1, ceil_sqrt(L.midpoint / a.midpoint))
    return l, _n0_for(spec, params, l)


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable record of a lower bound on |Lambda(A)|."""

    A: tuple[int, ...]
    l: int
    n: int
    wA: int
    wOmega: Enclosure
    x0_coeff: int
    bound: Fraction
    cross_check: Enclosure

    def to_json(self) -> dict:
        return {
            "A": [str(a) for a in self.A],
            "l": self.l,
            "n": self.n,
            "wA": str(self.wA),
            "wOmega": self.wOmega.to_json(),
            "x0_coeff": str(self.x0_coeff),
            "bound": str(self.bound),
            "cross_check": self.cross_check.to_json(),
        }


def _refined_lambda_abs(
    spec: ProblemSpec, A: Sequence[int], policy: PrecisionPolicy
) -> Enclosure:
    """|Lambda(A)| enclosure refined until it excludes zero (A != 0)."""
    last = None
    for bits in policy.ladder():
        last = lambda_enclosure(spec, A, bits).abs()
        if last.excludes_zero():
            return last
    raise PrecisionCapExceeded(
        f"|Lambda(A)| for A = {tuple(A)} still straddles zero at "
        f"{policy.cap_bits} bits"
    )


def certify_lower_bound(
    spec: ProblemSpec,
    A: Sequence[int],
    l_override: Optional[int] = None,
    policy: PrecisionPolicy = PrecisionPolicy(),
    retry_cap: int = 8,
    params: Optional[MeasureParams] = None,
) -> Certificate:
    """Produce a positive rational lower bound on |Lambda(A)| for A != 0.

    Starting from choose_parameters (or l_override), each candidate l scans
    the window [n0, n0 + dS] for an exact nonzero w_{l,n}(A) whose
    |w_{l,n}(omega)| enclosure can be certified <= 1/2; failing that, l is
    incremented (re-deriving n0) up to retry_cap times.
    """
    A = tuple(int(a) for a in A)
    if len(A) != spec.n_vars:
        raise ValueError(f"A must have length {spec.n_vars}")
    if all(a == 0 for a in A):
        raise ZeroVector("A is the zero vector")
    if params is None:
        params = measure_params(spec, 64)
    if not params.applicable:
        raise NotApplicable("gamma < 1/M fails for this spec")

    H = max(max(abs(a) for a in A[1:]), 2)
    if l_override is not None:
        l_start = l_override
    else:
        l_start, _ = choose_parameters(spec, params, H)

    rest = A[1:]
    omega_cache: dict[int, OmegaVector] = {}

    def omega_at(bits: int) -> OmegaVector:
        if bits not in omega_cache:
            omega_cache[bits] = omega_from_vector(spec, rest, bits)
        return omega_cache[bits]

    attempts = []
    for l in range(l_start, l_start + retry_cap + 1):
        n0 = _n0_for(spec, params, l)
        for n in range(n0, n0 + spec.d * spec.S + 1):
            wf = w_form(spec, l, n)
            wA = sum(c * a for c, a in zip(wf.coeffs, A))
            if wA == 0:
                continue
            for bits in policy.ladder():
                w_omega = evaluate_form(wf, omega_at(bits))
                mag = w_omega.abs()
                if mag.hi <= HALF:
                    x0c = wf.x0
                    assert x0c != 0, "x0 coefficient vanished despite certification"
                    bound = (abs(wA) - HALF) / abs(x0c)
                    cross = _refined_lambda_abs(spec, A, policy)
                    return Certificate(A, l, n, wA, w_omega, x0c, bound, cross)
                if mag.lo > HALF:
                    attempts.append(
                        {"l": l, "n": n, "w_omega": f"[{mag.lo}, {mag.hi}]"}
                    )
                    break
            else:
                attempts.append({"l": l, "n": n, "w_omega": "cap"})
    raise RetryCapExceeded(
        f"no (l, n) with |w(omega)| <= 1/2 for A = {A} within l <= "
        f"{l_start + retry_cap}",
        attempts,
    )


# ---------------------------------------------------------------------------
# exponent scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    H: int
    best_A: tuple[int, ...]
    lambda_abs: Enclosure
    empirical_exponent: Enclosure

    def to_json(self) -> dict:
        return {
            "H": self.H,
            "best_A": [str(a) for a in self.best_A],
            "lambda_abs": self.lambda_abs.to_json(),
            "empirical_exponent": self.empirical_exponent.to_json(),
        }


@dataclass(frozen=True)
class ExponentScanReport:
    rows: tuple[ScanRow, ...]
    mu: Enclosure
    max_observed_exponent: Enclosure
    fitted_C: Fraction

    def to_json(self) -> dict:
        return {
            "mu": self.mu.to_json(),
            "max_observed_exponent": self.max_observed_exponent.to_json(),
            "fitted_C": str(self.fitted_C),
            "rows": [r.to_json() for r in self.rows],
        }

    def csv_rows(self) -> list[dict]:
        return [
            {
                "H": r.H,
                "best_A": ",".join(str(a) for a in r.best_A),
                "lambda_lo": str(r.lambda_abs.lo),
                "lambda_hi": str(r.lambda_abs.hi),
                "exp_lo": str(r.empirical_exponent.lo),
                "exp_hi": str(r.empirical_exponent.hi),
            }
            for r in self.rows
        ]


def _shell_vectors(dim: int, H: int):
    """All integer vectors of given dim with max |entry| = H, lexicographic."""
    if dim == 1:
        yield (-H,)
        yield (H,)
        return
    span = range(-H, H + 1)
    for first in span:
        if abs(first) == H:
            for tail in _box_vectors(dim - 1, H):
                yield (first,) + tail
        else:
            for tail in _shell_vectors(dim - 1, H):
                yield (first,) + tail


def _box_vectors(dim: int, H: int):
    if dim == 0:
        yield ()
        return
    for first in range(-H, H + 1):
        for tail in _box_vectors(dim - 1, H):
            yield (first,) + tail


def _a0_candidates(t: Enclosure) -> list[int]:
    """Integers adjacent to -t: the only A_0 values that can minimize |A_0 + t|."""
    lo, hi = -t.hi, -t.lo
    cands = {math.floor(lo), math.ceil(lo), math.floor(hi), math.ceil(hi)}
    return sorted(cands)


def exponent_scan(
    spec: ProblemSpec,
    H_max: int,
    strategy: str = "exhaustive",
    sample_count: int = 64,
    seed: int = 0,
    precision_bits: int = 128,
    precision_cap: int = PrecisionPolicy().cap_bits,
    threads: int = 1,
    params: Optional[MeasureParams] = None,
) -> ExponentScanReport:
    """Minimize |Lambda(A)| over each height shell max|A_rest| = H.

    A_0 is never enumerated: only the integers adjacent to -sum A_rest f
    can minimize |Lambda|, and both neighbors are tested. Exhaustive
    enumeration is allowed for 1 + dS <= 3; larger dimensions must use the
    seeded random strategy.
    """
    if H_max < 2:
        raise ValueError("H_max must be at least 2")
    if params is None:
        params = measure_params(spec, 64)
    if not params.applicable:
        raise NotApplicable("gamma < 1/M fails for this spec")
    dim = spec.n_vars - 1
    if strategy == "exhaustive":
        if spec.n_vars > 3:
            raise DimensionTooLargeForExhaustive(
                f"1 + dS = {spec.n_vars} > 3; use strategy='random'"
            )
        heights = list(range(2, H_max + 1))
    elif strategy == "random":
        heights = []
        h = 2
        while h < H_max:
            heights.append(h)
            h = max(h + 1, int(h * 3 / 2))
        heights.append(H_max)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    def scan_height(H: int) -> ScanRow:
        if strategy == "exhaustive":
            shell = _shell_vectors(dim, H)
        else:
            rng = random.Random(seed * 1_000_003 + H)
            shell = _random_shell(rng, dim, H, sample_count)
        best: Optional[tuple[Fraction, tuple[int, ...], Enclosure]] = None
        for rest in shell:
            t = lambda_enclosure(spec, (0,) + rest, precision_bits)
            for a0 in _a0_candidates(t):
                lam = (t + a0).abs()
                key = (lam.hi, (a0,) + rest)
                if best is None or key < (best[0], best[1]):
                    best = (lam.hi, (a0,) + rest, lam)
        assert best is not None
        _, best_A, lam = best
        bits = precision_bits
        while not lam.excludes_zero():
            if bits >= precision_cap:
                raise PrecisionCapExceeded(
                    f"|Lambda| still straddles zero at H = {H}, {bits} bits"
                )
            bits = min(2 * bits, precision_cap)
            lam = lambda_enclosure(spec, best_A, bits).abs()
        log_lam = log_of_enclosure(lam)
        log_H = log_enclosure(H, 48)
        exponent = -log_lam / log_H
        return ScanRow(H, best_A, lam, exponent)

    rows = parallel_map(scan_height, heights, threads)

    max_row = max(rows, key=lambda r: (r.empirical_exponent.hi, r.H))
    fitted_C = Fraction(0)
    mu_hi = params.mu.hi
    for r in rows:
        slack = r.empirical_exponent.hi - mu_hi
        root = sqrt_enclosure(log_enclosure(r.H, 48).hi, 48)
        c_row = slack * (root.hi if slack >= 0 else root.lo)
        fitted_C = max(fitted_C, c_row)
    return ExponentScanReport(
        tuple(rows), params.mu, max_row.empirical_exponent, fitted_C
    )


def _random_shell(rng: random.Random, dim: int, H: int, count: int):
    out = []
    for _ in range(count):
        while True:
            vec = tuple(rng.randint(-H, H) for _ in range(dim))
            if max(abs(v) for v in vec) == H:
                out.append(vec)
                break
    return out
