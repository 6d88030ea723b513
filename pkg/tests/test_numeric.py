import numpy as np
import pytest

from abeltrace.errors import (
    DegreeUndetectable,
    EvaluationError,
    IllConditioned,
    OverdeterminedMismatch,
    ZeroPolynomial,
)
from abeltrace.numeric import (
    PolydiscModel,
    UniPoly,
    cauchy_derivative,
    gauss_legendre_segment,
    hankel_fit,
    poly_interpolate,
    poly_roots,
    polydisc_fit,
)


def roots_dict(pairs):
    return {complex(np.round(r, 7)): m for r, m in pairs}


class TestUniPoly:
    def test_zero_polynomial_degree(self):
        assert UniPoly([0, 0]).degree == -1
        assert UniPoly([0, 0]).is_zero

    def test_trailing_zeros_trimmed(self):
        p = UniPoly([1, 2, 0, 0])
        assert p.degree == 1
        assert p.coeffs == (1 + 0j, 2 + 0j)

    def test_arithmetic_and_eval(self):
        p = UniPoly([1, 2, 3])
        q = UniPoly([0, 1])
        assert (p + q)(2.0) == p(2.0) + q(2.0)
        assert (p * q)(1.5) == pytest.approx(p(1.5) * q(1.5))
        assert (p - p).is_zero

    def test_derivative(self):
        p = UniPoly([5, 0, 1])  # 5 + y^2
        assert p.derivative().coeffs == (0j, 2 + 0j)
        assert p.derivative(3).is_zero

    def test_from_roots(self):
        p = UniPoly.from_roots([1, -1])
        assert p.coeffs == (-1 + 0j, 0j, 1 + 0j)


class TestPolyRoots:
    def test_two_simple_roots(self):
        # y^2 - 1 factors by inspection
        got = roots_dict(poly_roots(UniPoly([-1, 0, 1]), 1e-10))
        assert got == {(-1 + 0j): 1, (1 + 0j): 1}

    def test_triple_root_at_origin(self):
        assert poly_roots(UniPoly([0, 0, 0, 1]), 1e-10) == [(0j, 3)]

    def test_quadratic_formula_case(self):
        # y^2 - 2y + 5 = (y - 1)^2 + 4
        got = roots_dict(poly_roots(UniPoly([5, -2, 1]), 1e-10))
        assert got == {(1 + 2j): 1, (1 - 2j): 1}

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ZeroPolynomial):
            poly_roots(UniPoly([]), 1e-10)
        with pytest.raises(ZeroPolynomial):
            poly_roots(UniPoly([3.0]), 1e-10)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            poly_roots(UniPoly([1, 1]), -1.0)

    def test_root_sum_identity(self):
        # sum of roots of a monic polynomial is minus the subleading coeff
        rng = np.random.default_rng(42)
        for _ in range(20):
            d = int(rng.integers(2, 9))
            coeffs = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            p = UniPoly(list(coeffs) + [1.0])
            rts = poly_roots(p, 1e-10)
            total = sum(r * m for r, m in rts)
            assert abs(total - (-coeffs[-1])) <= 1e-9 * max(1.0, abs(coeffs[-1]))
            assert sum(m for _, m in rts) == d

    def test_clustered_double_root(self):
        # (y - 1)^2 (y + 2): the double root must merge
        p = UniPoly.from_roots([1, 1, -2])
        got = roots_dict(poly_roots(p, 1e-10))
        assert got == {(1 + 0j): 2, (-2 + 0j): 1}

    def test_triple_root_off_origin(self):
        p = UniPoly.from_roots([1.0, 1.0, 1.0])
        got = poly_roots(p, 1e-10)
        assert len(got) == 1
        root, mult = got[0]
        assert mult == 3
        assert abs(root - 1.0) < 1e-4

    def test_mixed_multiplicities(self):
        # (y - 1)^3 (y + 2)^2: cluster sizes 3 and 2
        p = UniPoly.from_roots([1.0, 1.0, 1.0, -2.0, -2.0])
        got = {m for _, m in poly_roots(p, 1e-10)}
        assert got == {3, 2}
        total = sum(m for _, m in poly_roots(p, 1e-10))
        assert total == 5


class TestCauchyDerivative:
    def test_square(self):
        assert cauchy_derivative(lambda z: z * z, 1.0, 0.5) == pytest.approx(2.0)

    def test_exp(self):
        assert cauchy_derivative(np.exp, 0.0, 1.0) == pytest.approx(1.0)

    def test_simple_pole_outside(self):
        # d/dz (z-2)^-1 = -(z-2)^-2, so the value at 0 is -1/4
        val = cauchy_derivative(lambda z: 1.0 / (z - 2.0), 0.0, 1.0, 1)
        assert val == pytest.approx(-0.25)

    def test_polynomial_exact_across_radii(self):
        rng = np.random.default_rng(1)
        coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        p = UniPoly(coeffs)
        dp = p.derivative()
        z0 = 0.3 - 0.2j
        for radius in (0.1, 0.5, 1.0, 2.0):
            val = cauchy_derivative(p, z0, radius, 1, nodes=32)
            assert abs(val - dp(z0)) <= 1e-12 * max(1.0, abs(dp(z0)))

    def test_higher_order(self):
        # third derivative of z^4 at 1 is 24
        val = cauchy_derivative(lambda z: z**4, 1.0, 0.7, order=3, nodes=48)
        assert val == pytest.approx(24.0)

    def test_evaluator_error_wrapped(self):
        def bad(z):
            raise RuntimeError("boom")

        with pytest.raises(EvaluationError):
            cauchy_derivative(bad, 0.0, 1.0)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            cauchy_derivative(np.exp, 0.0, 1.0, order=0)
        with pytest.raises(ValueError):
            cauchy_derivative(np.exp, 0.0, 1.0, nodes=8)
        with pytest.raises(ValueError):
            cauchy_derivative(np.exp, 0.0, -1.0)


class TestHankelFit:
    def test_period_two_moments(self):
        # u_{k+2} = 3 u_k, so a_1 = 0 and a_2 = -3
        fit = hankel_fit([0, 1, 0, 3, 0, 9], d=2)
        assert fit.coeffs[0] == pytest.approx(0.0, abs=1e-12)
        assert fit.coeffs[1] == pytest.approx(-3.0)
        assert fit.residual <= 1e-12

    def test_geometric_sequence(self):
        c = 0.7 - 0.4j
        fit = hankel_fit([1, c, c**2, c**3], d=1)
        assert fit.coeffs[0] == pytest.approx(-c)

    def test_all_zero_moments(self):
        with pytest.raises(DegreeUndetectable) as info:
            hankel_fit([0, 0, 0, 0], d=None)
        assert info.value.zero_moments

    def test_auto_degree_picks_smallest(self):
        c = 0.5 + 0.2j
        moments = [c**k for k in range(7)]
        fit = hankel_fit(moments, d=None, tol=1e-8)
        assert fit.degree == 1

    def test_random_recurrences_recovered(self):
        # moments generated from random monic P via weighted power sums
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = int(rng.integers(1, 7))
            roots = []
            while len(roots) < d:
                cand = (0.4 + 0.9 * rng.uniform()) * np.exp(
                    2j * np.pi * rng.uniform()
                )
                if all(abs(cand - r) > 0.2 for r in roots):
                    roots.append(cand)
            weights = 0.5 + rng.uniform(size=d)
            moments = [
                sum(w * r**k for w, r in zip(weights, roots))
                for k in range(2 * d + 2)
            ]
            fit = hankel_fit(moments, d=d)
            p_true = UniPoly.from_roots(roots)
            # coeffs are (a_1..a_d) against lowest-first (c_0..c_{d-1}, 1)
            expect = [p_true.coeffs[d - j] for j in range(1, d + 1)]
            err = max(abs(a - e) for a, e in zip(fit.coeffs, expect))
            assert err <= 1e-8 * max(1.0, max(abs(e) for e in expect))

    def test_ill_conditioned_near_discriminant(self):
        r = 1.0
        eps = 1e-8
        moments = [r**k + (r + eps) ** k for k in range(8)]
        with pytest.raises(IllConditioned):
            hankel_fit(moments, d=2, cond_cap=1e10)

    def test_degree_undetectable(self):
        moments = [1.0 / (k + 1) for k in range(9)]
        with pytest.raises(DegreeUndetectable) as info:
            hankel_fit(moments, d=None, d_max=3, tol=1e-10)
        assert not info.value.zero_moments


class TestPolyInterpolate:
    def test_linear(self):
        fit = poly_interpolate([(x, -x) for x in (0.0, 1.0, 2.0)], 1)
        assert fit.poly.coeffs == (-1 + 0j,) or fit.poly.coeffs == (0j, -1 + 0j)
        assert fit.poly(3.0) == pytest.approx(-3.0)

    def test_cubic(self):
        pts = [(x, x**3 - 3 * x**2 + 2 * x) for x in np.linspace(0.5, 3.5, 6)]
        fit = poly_interpolate(pts, 3)
        assert fit.residual < 1e-10
        got = np.zeros(4, dtype=complex)
        got[: len(fit.poly.coeffs)] = fit.poly.coeffs
        assert np.allclose(got, [0, 2, -3, 1], atol=1e-9)

    def test_non_polynomial_data(self):
        pts = [(x, 1.0 / x) for x in np.linspace(0.5, 2.5, 9)]
        with pytest.raises(OverdeterminedMismatch):
            poly_interpolate(pts, 4)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            deg = int(rng.integers(0, 6))
            coeffs = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            p = UniPoly(coeffs)
            pts = [(z, p(z)) for z in rng.standard_normal(deg + 4) + 0.5]
            fit = poly_interpolate(pts, deg, tol=1e-8)
            for z in (0.1, -0.7, 1.3):
                assert abs(fit.poly(z) - p(z)) <= 1e-10 * max(1.0, abs(p(z)))

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            poly_interpolate([(0.0, 1.0), (1.0, 2.0)], 3)


class TestPolydiscModel:
    def test_fit_and_derivative(self):
        model = polydisc_fit(
            lambda pt: np.exp(pt[0]) * np.cos(pt[1]), (0.0, 0.0), (0.8, 0.8),
            nodes=32,
        )
        assert model.build_error < 1e-12
        d0 = model.derivative(0)
        pt = (0.2 + 0.1j, -0.3)
        assert abs(d0(pt) - np.exp(pt[0]) * np.cos(pt[1])) < 1e-10

    def test_polynomial_exact(self):
        model = polydisc_fit(
            lambda pt: 2.0 + pt[0] ** 2 * pt[1] - 3.0 * pt[1], (0.1, -0.2),
            (1.0, 1.5), nodes=16,
        )
        pt = (0.9, 1.1)
        assert abs(model(pt) - (2.0 + pt[0] ** 2 * pt[1] - 3.0 * pt[1])) < 1e-12


def test_gauss_legendre_polynomial_exact():
    # integral of z^5 along 1 -> 2+1j, against the antiderivative z^6/6
    val = gauss_legendre_segment(lambda z: z**5, 1.0, 2.0 + 1.0j, nodes=12)
    expect = ((2.0 + 1.0j) ** 6 - 1.0) / 6.0
    assert abs(val - expect) < 1e-12 * abs(expect)
