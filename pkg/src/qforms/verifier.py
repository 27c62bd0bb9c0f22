"""Batch verification: exact identity suite, growth/smallness reports, and
the non-vanishing window scan.

Every identity check is an exact rational equality over an explicit grid;
failures carry a reproducible witness. The bounds report compares exact
heights and enclosure logs against the predicted growth shapes and reports
fitted per-(n+1) constants instead of asserting asymptotics directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .enclosure import Enclosure, log_enclosure
from .errors import DomainViolation, ZeroOmega
from .forms import (
    LinearForm,
    expand_shift_factors,
    form_height,
    operator_poly,
    p_at,
    u_form,
    v_form,
    vl_form,
    w_form,
)
from .problem import ProblemSpec
from .series import (
    OmegaVector,
    evaluate_form,
    functional_equation_residual,
    omega_from_vector,
    v_value_sequence,
)
from .util import PrecisionPolicy, random_rational, random_rational_vector

VProvider = Callable[[ProblemSpec, int], LinearForm]


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    domain: str
    passed: bool
    counterexample: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"name": self.name, "domain": self.domain, "passed": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [c.to_json() for c in self.checks],
        }


def _form_str(form: LinearForm) -> str:
    return "[" + ", ".join(str(c) for c in form.coeffs) + "]"


def _check_recurrence(spec: ProblemSpec, n_max: int, v_at: VProvider) -> IdentityCheck:
    domain = f"1 <= n <= {n_max}, coefficient-wise"
    for n in range(1, n_max + 1):
        lhs = v_at(spec, n)
        rhs = v_at(spec, n - 1).scale(p_at(spec, n)) + u_form(spec, n)
        if lhs.coeffs != rhs.coeffs:
            return IdentityCheck(
                "recurrence",
                domain,
                False,
                {"n": n, "lhs": _form_str(lhs), "rhs": _form_str(rhs)},
            )
    return IdentityCheck("recurrence", domain, True)


def _check_shift_identity(rng: random.Random, trials: int = 50) -> IdentityCheck:
    domain = f"{trials} seeded (a, b, xi) samples, n in 1..7"
    for trial in range(trials):
        a = random_rational(rng)
        b = random_rational(rng, nonzero=True)
        xi = [random_rational(rng) for _ in range(8)]
        for n in range(1, 8):
            lhs = b ** n * xi[n] - a * b ** (n - 1) * xi[n - 1]
            rhs = b ** n * (xi[n] - (a / b) * xi[n - 1])
            if lhs != rhs:
                return IdentityCheck(
                    "shift_identity",
                    domain,
                    False,
                    {"trial": trial, "n": n, "a": str(a), "b": str(b),
                     "lhs": str(lhs), "rhs": str(rhs)},
                )
    return IdentityCheck("shift_identity", domain, True)


def _check_annihilation(rng: random.Random, trials: int = 20) -> IdentityCheck:
    domain = f"{trials} seeded (a, p) samples, deg p <= t <= 4, n in -3..6"
    for trial in range(trials):
        t = rng.randint(0, 4)
        a = random_rational(rng, nonzero=True)
        poly = [random_rational(rng) for _ in range(t + 1)]
        coeffs = expand_shift_factors([a] * (t + 1))
        for n in range(-3, 7):
            val = Fraction(0)
            for i, c in enumerate(coeffs):
                pn = sum(pc * Fraction(n - i) ** e for e, pc in enumerate(poly))
                val += c * pn * a ** (n - i)
            if val != 0:
                return IdentityCheck(
                    "annihilation",
                    domain,
                    False,
                    {"trial": trial, "t": t, "a": str(a), "n": n, "value": str(val)},
                )
    return IdentityCheck("annihilation", domain, True)


def _apply_operator(
    spec: ProblemSpec, l: int, delta: int, index: int, v_at: VProvider
) -> LinearForm:
    """The (l, delta) operator product applied to the v-sequence at index."""
    op = operator_poly(spec, l, delta)
    acc = v_at(spec, index).scale(op.coeffs[0])
    for t in range(1, len(op.coeffs)):
        if op.coeffs[t] != 0:
            acc = acc + v_at(spec, index - t).scale(op.coeffs[t])
    return acc


def _check_main_relation(
    spec: ProblemSpec, l_max: int, v_at: VProvider
) -> IdentityCheck:
    d = spec.d
    domain = f"{d} <= l <= {l_max}, S*l <= n <= S*l + 10, coefficient-wise"
    p = spec.P.coefficients
    q = spec.q
    for l in range(d, l_max + 1):
        for n in range(spec.S * l, spec.S * l + 11):
            lhs = _vl_from_provider(spec, l, n, v_at).scale(p[d])
            rhs = _apply_operator(spec, l, d, n + 1, v_at).scale(q ** (-d * (n + 1)))
            for nu in range(1, d + 1):
                term = _apply_operator(spec, l, nu, n, v_at).scale(
                    p[d - nu] * q ** (-nu * (n + 1))
                )
                rhs = rhs - term
            if lhs.coeffs != rhs.coeffs:
                return IdentityCheck(
                    "main_relation",
                    domain,
                    False,
                    {"l": l, "n": n, "lhs": _form_str(lhs), "rhs": _form_str(rhs)},
                )
    return IdentityCheck("main_relation", domain, True)


def _vl_from_provider(
    spec: ProblemSpec, l: int, n: int, v_at: VProvider
) -> LinearForm:
    return _apply_operator(spec, l, 0, n, v_at)


def _check_functional_equation(
    spec: ProblemSpec, series_N: int, rng: random.Random, omega_count: int,
    v_at: Optional[VProvider],
) -> IdentityCheck:
    domain = f"{omega_count} seeded rational omega, degrees 0..{series_N}"
    for trial in range(omega_count):
        omega0 = random_rational(rng)
        rest = random_rational_vector(rng, spec.n_vars - 1)
        if v_at is None:
            residuals = functional_equation_residual(spec, rest, omega0, series_N)
        else:
            residuals = _residuals_from_provider(spec, rest, omega0, series_N, v_at)
        for n, r in enumerate(residuals):
            if r != 0:
                return IdentityCheck(
                    "functional_equation",
                    domain,
                    False,
                    {"trial": trial, "degree": n, "residual": str(r),
                     "omega0": str(omega0), "rest": [str(c) for c in rest]},
                )
    return IdentityCheck("functional_equation", domain, True)


def _residuals_from_provider(
    spec: ProblemSpec, rest, omega0: Fraction, N: int, v_at: VProvider
) -> list[Fraction]:
    from .forms import evaluate_exact

    vec = (Fraction(omega0),) + tuple(Fraction(c) for c in rest)
    uvec = (Fraction(0),) + vec[1:]
    v_vals = [evaluate_exact(v_at(spec, n), vec) for n in range(N + 1)]
    u_vals = [evaluate_exact(u_form(spec, n), uvec) for n in range(N + 1)]
    p = spec.P.coefficients
    q = spec.q
    out = [v_vals[0] - vec[0] - u_vals[0]]
    for n in range(1, N + 1):
        conv = sum(
            (p[nu] * q ** (nu * n) * v_vals[n - 1] for nu in range(1, spec.d + 1)),
            start=Fraction(0),
        )
        out.append(v_vals[n] - p[0] * v_vals[n - 1] - conv - u_vals[n])
    return out


def check_identities(
    spec: ProblemSpec,
    n_max: int = 100,
    l_max: Optional[int] = None,
    series_N: int = 100,
    rng_seed: int = 0,
    omega_count: int = 5,
    v_provider: Optional[VProvider] = None,
) -> IdentityReport:
    """Run the five exact identity checks over their stated grids.

    v_provider is a hook for mutation testing: it substitutes the engine
    whose output the recurrence, main-relation, and functional-equation
    checks consume.
    """
    if l_max is None:
        l_max = spec.d + 3
    if l_max < spec.d:
        raise DomainViolation("l_max must be at least d")
    rng = random.Random(rng_seed)
    v_at = v_provider if v_provider is not None else (lambda sp, n: v_form(sp, n))
    checks = (
        _check_recurrence(spec, n_max, v_at),
        _check_shift_identity(rng),
        _check_annihilation(rng),
        _check_main_relation(spec, l_max, v_at),
        _check_functional_equation(spec, series_N, rng, omega_count, v_provider),
    )
    return IdentityReport(checks)


# ---------------------------------------------------------------------------
# growth / smallness report
# ---------------------------------------------------------------------------


def log_of_enclosure(x: Enclosure, bits: int = 48) -> Enclosure:
    """Enclosure of ln over a strictly positive interval."""
    if x.lo <= 0:
        raise ValueError("log_of_enclosure requires a strictly positive interval")
    return Enclosure(log_enclosure(x.lo, bits).lo, log_enclosure(x.hi, bits).hi)


@dataclass(frozen=True)
class HeightRow:
    l: int
    n: int
    log_height_q1: Enclosure
    main_term: Fraction
    residual_per_n: Enclosure

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "n": self.n,
            "log_height_q1": self.log_height_q1.to_json(),
            "main_term": str(self.main_term),
            "residual_per_n": self.residual_per_n.to_json(),
        }


@dataclass(frozen=True)
class SmallnessRow:
    omega_label: str
    l: int
    n: int
    log_v_omega_q: Optional[Enclosure]
    c_upper: Optional[Fraction]
    undecided: bool = False

    def to_json(self) -> dict:
        return {
            "omega": self.omega_label,
            "l": self.l,
            "n": self.n,
            "log_v_omega_q": None if self.log_v_omega_q is None else self.log_v_omega_q.to_json(),
            "c_upper": None if self.c_upper is None else str(self.c_upper),
            "undecided": self.undecided,
        }


@dataclass(frozen=True)
class BoundsReport:
    height_rows: tuple[HeightRow, ...]
    smallness_rows: tuple[SmallnessRow, ...]
    fitted_kappa: Fraction
    fitted_c: Optional[Fraction]
    undecided_rows: int = 0

    def to_json(self) -> dict:
        return {
            "fitted_kappa": str(self.fitted_kappa),
            "fitted_c": None if self.fitted_c is None else str(self.fitted_c),
            "undecided_rows": self.undecided_rows,
            "height_rows": [r.to_json() for r in self.height_rows],
            "smallness_rows": [r.to_json() for r in self.smallness_rows],
        }

    def csv_rows(self) -> list[dict]:
        rows = []
        for r in self.height_rows:
            rows.append(
                {
                    "kind": "height",
                    "omega": "",
                    "l": r.l,
                    "n": r.n,
                    "lo": str(r.log_height_q1.lo),
                    "hi": str(r.log_height_q1.hi),
                    "main_term": str(r.main_term),
                    "residual_lo": str(r.residual_per_n.lo),
                    "residual_hi": str(r.residual_per_n.hi),
                }
            )
        for s in self.smallness_rows:
            rows.append(
                {
                    "kind": "smallness",
                    "omega": s.omega_label,
                    "l": s.l,
                    "n": s.n,
                    "lo": "" if s.log_v_omega_q is None else str(s.log_v_omega_q.lo),
                    "hi": "" if s.log_v_omega_q is None else str(s.log_v_omega_q.hi),
                    "main_term": "",
                    "residual_lo": "",
                    "residual_hi": "" if s.c_upper is None else str(s.c_upper),
                }
            )
        return rows


def _abs_upper(e: Enclosure) -> Fraction:
    return max(abs(e.lo), abs(e.hi))


def bounds_report(
    spec: ProblemSpec,
    l_list: Sequence[int],
    n_list: Sequence[int],
    precision_bits: int = 512,
    rng_seed: int = 0,
    precision_cap: int = PrecisionPolicy().cap_bits,
) -> BoundsReport:
    """Exact heights against d n^2/2 + S l^2/2, and |v_{l,n}(omega)| for
    omega built from true series values against the smallness shape
    -l n + (S - eps0/d) l^2/2 + c (n+1)."""
    q1_log = log_enclosure(abs(spec.q_num), 48)
    q_log = log_enclosure(abs(spec.q_num), 48) - log_enclosure(abs(spec.q_den), 48)
    pairs = [(l, n) for l in l_list for n in n_list if n >= spec.S * l]

    height_rows = []
    fitted_kappa = Fraction(0)
    for l, n in pairs:
        h = form_height(w_form(spec, l, n))
        assert h > 0, f"zero height at (l={l}, n={n})"
        log_h = log_enclosure(h, 48) / q1_log
        main = Fraction(spec.d * n * n, 2) + Fraction(spec.S * l * l, 2)
        residual = (log_h - main) * Fraction(1, n + 1)
        height_rows.append(HeightRow(l, n, log_h, main, residual))
        fitted_kappa = max(fitted_kappa, _abs_upper(residual))

    # smallness: unit omega vectors plus one seeded random rational vector
    rng = random.Random(rng_seed)
    variants: list[tuple[str, tuple[Fraction, ...]]] = []
    dim = spec.n_vars - 1
    for i, (j, k, sigma) in enumerate(spec.var_indices):
        unit = tuple(Fraction(1 if t == i else 0) for t in range(dim))
        variants.append((f"unit:{j},{k},{sigma}", unit))
    variants.append(("random", random_rational_vector(rng, dim, nonzero=True)))

    shape_shift = (Fraction(spec.S) - Fraction(spec.eps0, spec.d)) / 2
    smallness_rows = []
    fitted_c: Optional[Fraction] = None
    undecided = 0
    for label, rest in variants:
        max_rest = max(abs(c) for c in rest)
        log_max = (
            Enclosure.zero()
            if max_rest == 1
            else log_enclosure(max_rest, 48) / q_log
        )
        pb = precision_bits
        omega = omega_from_vector(spec, rest, pb)
        for l, n in pairs:
            value = evaluate_form(vl_form(spec, l, n), omega)
            while not value.abs().excludes_zero() and pb < precision_cap:
                pb = min(2 * pb, precision_cap)
                omega = omega_from_vector(spec, rest, pb)
                value = evaluate_form(vl_form(spec, l, n), omega)
            if not value.abs().excludes_zero():
                smallness_rows.append(SmallnessRow(label, l, n, None, None, True))
                undecided += 1
                continue
            log_v = log_of_enclosure(value.abs()) / q_log
            c_row = (log_v - log_max + l * n - shape_shift * l * l) * Fraction(1, n + 1)
            smallness_rows.append(SmallnessRow(label, l, n, log_v, c_row.hi))
            fitted_c = c_row.hi if fitted_c is None else max(fitted_c, c_row.hi)

    return BoundsReport(
        tuple(height_rows),
        tuple(smallness_rows),
        fitted_kappa,
        fitted_c,
        undecided,
    )


# ---------------------------------------------------------------------------
# non-vanishing window scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonvanishingVerdict:
    window_start: int
    window_length: int
    found_index: Optional[int]
    precision_used: Optional[int]
    witness: Optional[str] = None

    @property
    def undecided(self) -> bool:
        return self.found_index is None

    def to_json(self) -> dict:
        return {
            "window_start": self.window_start,
            "window_length": self.window_length,
            "found_index": self.found_index,
            "precision_used": self.precision_used,
            "witness": self.witness,
            "undecided": self.undecided,
        }


def nonvanishing_scan(
    spec: ProblemSpec,
    omega: Union[OmegaVector, Sequence],
    l0: int,
    n0: int,
    policy: PrecisionPolicy = PrecisionPolicy(),
) -> NonvanishingVerdict:
    """Least n in [n0, n0 + dS] with v_{l0,n}(omega) certifiably nonzero.

    Rational omega vectors (length 1 + dS, x_0 slot first) are evaluated
    exactly; OmegaVector inputs go through enclosures with precision
    escalation, reporting Undecided at the cap.
    """
    if n0 < spec.S * l0:
        raise DomainViolation(f"n0 must be >= S*l0 = {spec.S * l0}")
    window = range(n0, n0 + spec.d * spec.S + 1)

    if not isinstance(omega, OmegaVector):
        vec = tuple(Fraction(c) for c in omega)
        if len(vec) != spec.n_vars:
            raise ValueError(f"omega must have length {spec.n_vars}")
        if all(c == 0 for c in vec):
            raise ZeroOmega("omega is the zero vector")
        vals = v_value_sequence(spec, vec, window.stop - 1)
        op = operator_poly(spec, l0, 0)
        for n in window:
            value = sum(
                (op.coeffs[t] * vals[n - t] for t in range(len(op.coeffs))),
                start=Fraction(0),
            )
            if value != 0:
                return NonvanishingVerdict(
                    n0, len(window), n, None, witness=str(value)
                )
        raise AssertionError(
            "non-vanishing window failed for rational omega: implementation bug"
        )

    if omega.is_zero():
        raise ZeroOmega("omega vector is identically zero")
    pb = omega.precision_bits
    current = omega
    while True:
        for n in window:
            value = evaluate_form(vl_form(spec, l0, n), current)
            if value.excludes_zero():
                return NonvanishingVerdict(
                    n0,
                    len(window),
                    n,
                    pb,
                    witness=f"[{value.lo}, {value.hi}]",
                )
        if pb >= policy.cap_bits:
            return NonvanishingVerdict(n0, len(window), None, pb)
        pb = min(2 * pb, policy.cap_bits)
        current = omega_from_vector(spec, current.rest, pb)
