"""Identity suite, bounds report, non-vanishing scan."""

import random
from fractions import Fraction as F

import pytest

from conftest import oracle_f_sigma
from qforms import (
    DomainViolation,
    PrecisionPolicy,
    ZeroOmega,
    bounds_report,
    check_identities,
    nonvanishing_scan,
    omega_from_vector,
)
from qforms.enclosure import log_enclosure
from qforms.forms import u_form, v_form
from qforms.verifier import log_of_enclosure


class TestCheckIdentities:
    def test_passes_on_fixtures(self, fix_a, fix_d):
        for spec in (fix_a, fix_d):
            report = check_identities(spec, n_max=25, series_N=25, omega_count=2)
            assert report.all_passed, report.to_json()
            assert {c.name for c in report.checks} == {
                "recurrence",
                "shift_identity",
                "annihilation",
                "main_relation",
                "functional_equation",
            }

    def test_mutation_control_fails_recurrence(self, fix_a):
        from qforms.forms import p_at

        def mutated_v(spec, n):
            # deliberate off-by-one: scales by P(q^(n+1)) instead of P(q^n)
            if n == 0:
                return v_form(spec, 0)
            return mutated_v(spec, n - 1).scale(p_at(spec, n + 1)) + u_form(spec, n)

        report = check_identities(
            fix_a, n_max=10, series_N=10, omega_count=1, v_provider=mutated_v
        )
        assert not report.all_passed
        by_name = {c.name: c for c in report.checks}
        rec = by_name["recurrence"]
        assert not rec.passed
        assert rec.counterexample["n"] == 1
        assert "lhs" in rec.counterexample and "rhs" in rec.counterexample

    def test_l_max_below_d_rejected(self, fix_d):
        with pytest.raises(DomainViolation):
            check_identities(fix_d, n_max=5, l_max=1, series_N=5)

    def test_report_serializes(self, fix_b):
        report = check_identities(fix_b, n_max=8, series_N=8, omega_count=1)
        data = report.to_json()
        assert data["all_passed"] is True
        assert len(data["checks"]) == 5


class TestBoundsReport:
    def test_fix_a_shape_and_spot(self, fix_a):
        report = bounds_report(
            fix_a, [1, 2], [2, 5, 10, 20], precision_bits=1024, rng_seed=0
        )
        assert report.undecided_rows == 0
        assert report.fitted_kappa <= 10
        assert report.fitted_c is not None and report.fitted_c <= 10
        # spot: the unit-omega row at (l, n) = (1, 2); |v_(1,2)(omega)| is
        # about 0.0085721, so its base-2 log is about -6.866
        row = next(
            r
            for r in report.smallness_rows
            if r.omega_label == "unit:1,0,0" and (r.l, r.n) == (1, 2)
        )
        oracle = F(23, 2) - 7 * oracle_f_sigma(fix_a, 1, 0, 0)
        log_oracle = log_enclosure(oracle, 80) / log_enclosure(F(2), 80)
        assert row.log_v_omega_q.lo <= log_oracle.hi
        assert log_oracle.lo <= row.log_v_omega_q.hi

    def test_height_rows_cover_grid(self, fix_b):
        report = bounds_report(fix_b, [0, 1], [1, 3, 6], precision_bits=512)
        pairs = {(r.l, r.n) for r in report.height_rows}
        assert pairs == {(0, 1), (0, 3), (0, 6), (1, 1), (1, 3), (1, 6)}

    def test_csv_rows(self, fix_a):
        report = bounds_report(fix_a, [1], [2, 4], precision_bits=512)
        rows = report.csv_rows()
        kinds = {r["kind"] for r in rows}
        assert kinds == {"height", "smallness"}


class TestLogOfEnclosure:
    def test_requires_positive(self):
        from qforms.enclosure import Enclosure

        with pytest.raises(ValueError):
            log_of_enclosure(Enclosure(F(0), F(1)))

    def test_brackets(self):
        from qforms.enclosure import Enclosure

        enc = log_of_enclosure(Enclosure(F(2), F(4)), 48)
        ln2 = log_enclosure(F(2), 48)
        ln4 = log_enclosure(F(4), 48)
        assert enc.lo <= ln2.hi and ln4.lo <= enc.hi


class TestNonvanishing:
    def test_x0_only_rational(self, fix_a):
        verdict = nonvanishing_scan(fix_a, [F(1), F(0)], 0, 5)
        assert verdict.found_index == 5  # v_(0,n)(1,0) = prod P(q^k) != 0

    def test_f_built_omega_window(self, fix_a):
        omega = omega_from_vector(fix_a, [1], 256)
        verdict = nonvanishing_scan(fix_a, omega, 3, 10)
        assert verdict.found_index in (10, 11)
        assert not verdict.undecided

    def test_zero_omega(self, fix_a):
        with pytest.raises(ZeroOmega):
            nonvanishing_scan(fix_a, [F(0), F(0)], 1, 3)
        with pytest.raises(ZeroOmega):
            nonvanishing_scan(fix_a, omega_from_vector(fix_a, [0], 32), 1, 3)

    def test_domain_violation(self, fix_d):
        with pytest.raises(DomainViolation):
            nonvanishing_scan(fix_d, [F(1)] + [F(0)] * 4, 2, 3)

    def test_rational_windows_never_all_zero(self, all_fixtures):
        rng = random.Random(23)
        for spec in all_fixtures.values():
            for _ in range(20):
                vec = [
                    F(rng.randint(-100, 100), rng.randint(1, 100))
                    for _ in range(spec.n_vars)
                ]
                if all(c == 0 for c in vec):
                    continue
                for l0 in (0, 1, 2):
                    for n0 in (spec.S * l0, spec.S * l0 + 5):
                        verdict = nonvanishing_scan(spec, vec, l0, n0)
                        assert verdict.found_index is not None
                        assert n0 <= verdict.found_index <= n0 + spec.d * spec.S

    def test_undecided_at_tiny_cap(self, fix_a):
        omega = omega_from_vector(fix_a, [1], 8)
        verdict = nonvanishing_scan(
            fix_a, omega, 3, 10, PrecisionPolicy(8, 8)
        )
        assert verdict.undecided
        assert verdict.found_index is None
        assert verdict.to_json()["undecided"] is True


class TestNegativeQ:
    def test_full_stack_with_negative_q(self):
        from qforms import validate_spec, w_form, f_derivative_enclosure

        spec = validate_spec(-2, 1, [0, 1, 1], [(F(3), 1)])
        report = check_identities(spec, n_max=15, series_N=15, omega_count=2)
        assert report.all_passed, report.to_json()
        for l in range(0, 3):
            for n in range(spec.S * l, spec.S * l + 5):
                w_form(spec, l, n)
        enc = f_derivative_enclosure(spec, 1, 0, 0, 64)
        assert enc.width <= F(1, 1 << 64)
        enc_refined = f_derivative_enclosure(spec, 1, 0, 0, 128)
        assert enc.contains_enclosure(enc_refined)


class TestKappaAcrossFixtures:
    def test_fitted_kappa_finite_everywhere(self, all_fixtures):
        # a single per-fixture constant bounds the height residuals
        for name, spec in all_fixtures.items():
            n_list = sorted({spec.S * 2, 12, 20, 32} | {40})
            report = bounds_report(
                spec, [0, 1, 2], n_list, precision_bits=512, precision_cap=1024
            )
            assert report.fitted_kappa <= 50, (name, float(report.fitted_kappa))
