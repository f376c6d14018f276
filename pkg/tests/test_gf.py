import pickle

from hypothesis import given, strategies as st
import pytest
import sympy

from eisgen.gf import (
    BudgetExceeded,
    NotPrime,
    TooLarge,
    common_factor_count,
    count_projective_zeros,
    enumerate_coprime_form_pairs,
    field_for_q,
    least_irreducible,
    make_field,
    normalized_forms,
    pair_budget,
    sieve_check,
)


class TestFieldConstruction:
    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
    def test_fermat(self, q):
        field = field_for_q(q)
        assert field.q == q
        assert field.fermat_check()

    @pytest.mark.parametrize("q", [1, 6, 10, 12, 15])
    def test_not_prime_power(self, q):
        with pytest.raises(NotPrime):
            field_for_q(q)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            make_field(2, 17)

    def test_fermat_limited_to_small_fields(self):
        with pytest.raises(TooLarge):
            field_for_q(257).fermat_check()

    def test_cached(self):
        assert make_field(3, 2) is field_for_q(9)

    def test_pickles_to_the_cached_field(self):
        field = field_for_q(8)
        assert pickle.loads(pickle.dumps(field)) is field

    @pytest.mark.parametrize(
        ("p", "k", "modulus"),
        [
            (2, 2, (1, 1, 1)),
            (2, 3, (1, 1, 0, 1)),
            (3, 2, (1, 0, 1)),
        ],
    )
    def test_least_irreducible(self, p, k, modulus):
        assert least_irreducible(p, k) == modulus


class TestFieldArithmetic:
    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
    def test_distributive(self, a, b, c):
        f4 = field_for_q(4)
        left = f4.mul(a, f4.add(b, c))
        assert left == f4.add(f4.mul(a, b), f4.mul(a, c))

    @given(st.integers(1, 8))
    def test_inverse(self, a):
        field = field_for_q(9)
        assert field.mul(a, field.inv(a)) == 1
        assert field.div(1, a) == field.inv(a)
        assert field.pow(a, -1) == field.inv(a)

    def test_zero_has_no_inverse(self, f4):
        with pytest.raises(ZeroDivisionError):
            f4.inv(0)
        with pytest.raises(ZeroDivisionError):
            f4.pow(0, -2)

    def test_characteristic(self, f4):
        for a in f4.elements():
            assert f4.add(a, a) == 0
            assert f4.sub(a, a) == 0
            assert f4.neg(a) == a

    def test_generator_order(self):
        field = field_for_q(16)
        powers = {field.pow(field.generator, n) for n in range(15)}
        assert powers == set(field.units())

    def test_frobenius_is_additive(self):
        field = field_for_q(27)
        for a in range(0, 27, 5):
            for b in range(0, 27, 7):
                assert field.frobenius(field.add(a, b)) == field.add(
                    field.frobenius(a), field.frobenius(b)
                )

    def test_from_int(self):
        field = field_for_q(5)
        assert field.from_int(-1) == 4
        assert field.from_int(12) == 2


class TestPolynomials:
    def test_divmod(self):
        field = field_for_q(3)
        # (x² + 1) = (x + 1)(x + 2) + 2 over F_3
        quot, rem = field.poly_divmod((1, 0, 1), (1, 1))
        assert quot == (2, 1)
        assert rem == (2,)

    def test_gcd_is_monic(self):
        field = field_for_q(5)
        # 2(x − 1)(x − 2) and 3(x − 1)
        f = (4, 4, 2)
        g = (2, 3)
        assert field.poly_gcd(f, g) == (4, 1)

    def test_gcd_of_zero(self, f4):
        assert field_for_q(2).poly_gcd((0,), ()) == ()
        assert f4.poly_gcd((0, 0), (2,)) == (1,)

    def test_division_by_zero(self, f4):
        with pytest.raises(ZeroDivisionError):
            f4.poly_divmod((1, 1), (0,))

    def test_trim(self, f4):
        assert f4.poly_trim((1, 2, 0, 0)) == (1, 2)


class TestForms:
    @pytest.mark.parametrize(("q", "degree"), [(2, 0), (2, 3), (3, 2), (4, 1)])
    def test_normalized_count(self, q, degree):
        forms = list(normalized_forms(field_for_q(q), degree))
        assert len(forms) == common_factor_count(q, degree)
        assert len(set(forms)) == len(forms)

    def test_pair_budget(self):
        assert pair_budget(2, 1, 0) == 4
        assert pair_budget(3, 2, 1) == 27 * 4

    @pytest.mark.parametrize(("deg_f", "deg_g", "expected"), [(0, 0, 2), (1, 0, 4)])
    def test_small_pair_counts(self, deg_f, deg_g, expected):
        assert enumerate_coprime_form_pairs(field_for_q(2), deg_f, deg_g) == expected

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_coprime_form_pairs(field_for_q(3), 4, 4, budget=1000)

    @pytest.mark.parametrize(
        ("q", "deg_f", "deg_g"),
        [(2, 1, 0), (2, 2, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2), (4, 1, 1)],
    )
    def test_sieve(self, q, deg_f, deg_g):
        everything, sieved = sieve_check(field_for_q(q), deg_f, deg_g)
        assert everything == sieved

    def test_sieve_needs_ordered_degrees(self):
        with pytest.raises(ValueError):
            sieve_check(field_for_q(2), 1, 2)

    @pytest.mark.slow
    def test_parallel_count_matches_serial(self):
        field = field_for_q(3)
        assert enumerate_coprime_form_pairs(
            field, 3, 2, jobs=2
        ) == enumerate_coprime_form_pairs(field, 3, 2)


class TestPlaneCurves:
    def test_conic(self):
        x, y, z = sympy.symbols("x y z")
        for n in (1, 2):
            assert count_projective_zeros(x * z - y**2, field_for_q(3), n) == 3**n + 1

    def test_zero_polynomial_counts_the_plane(self):
        assert count_projective_zeros(0, field_for_q(2)) == 7

    def test_not_homogeneous(self):
        x, y, _ = sympy.symbols("x y z")
        with pytest.raises(ValueError):
            count_projective_zeros(x**2 + y, field_for_q(2))
