import pytest

from eisgen import corralg
from eisgen.errors import InputError
from eisgen.models import ChiClass


class TestExteriorAlgebra:
    def test_pairing(self):
        assert corralg.pairing(0, 1) == 1
        assert corralg.pairing(1, 0) == -1
        assert corralg.pairing(0, 2) == 0
        assert corralg.pairing(3, 2) == -1

    def test_wedge_anticommutes(self):
        one = {(0, 0): 1}
        assert corralg.wedge(1, corralg.wedge(0, one)) == {(3, 0): -1}
        assert corralg.wedge(0, corralg.wedge(1, one)) == {(3, 0): 1}
        assert corralg.wedge(0, corralg.wedge(0, one)) == {}

    def test_contract(self):
        assert corralg.contract(0, {(2, 0): 1}) == {(0, 0): 1}
        assert corralg.contract(1, {(1, 0): 1}) == {(0, 0): -1}
        assert corralg.contract(0, {(1, 3): 5}) == {}

    def test_theta(self):
        assert corralg.theta_mask([0]) == 3
        assert corralg.theta_mask([0, 1]) == 15

    def test_chern_relation(self):
        assert corralg.chern_relation(1, 2) == {(0, 2): 1, (3, 1): -2}
        assert corralg.chern_relation(0, 3) == {(0, 3): 1}


class TestStableModule:
    def test_genus_zero(self):
        module = corralg.build_stable_module(0, 2, (0,))
        assert module.rank(0) == 4
        image, target = module.act(corralg.H_P, {(0, 1): 1}, 0)
        assert (image, target) == ({(0, 2): 2}, 0)

    def test_genus_zero_quadric(self):
        module = corralg.build_stable_module(0, 4, (0, 1))
        lowered, d = module.act(corralg.F_P, {(0, 0): 1}, 0)
        raised, _ = module.act(corralg.E_P, lowered, d)
        assert raised == {(0, 2): -1}

    def test_dimension(self):
        module = corralg.build_stable_module(1, 4, (0,))
        assert module.dimension(0) == 16
        assert len(module.basis(0)) == 16

    def test_chern_relation_reduces(self):
        module = corralg.build_stable_module(1, 2, (0,))
        assert module.rank(0) == 2
        assert module.reduce({(0, 2): 1}, 0) == {(3, 1): 2}

    def test_out_of_stable_range(self):
        with pytest.raises(corralg.OutOfStableRange):
            corralg.build_stable_module(1, 0, (0,))

    def test_invalid(self):
        with pytest.raises(InputError):
            corralg.build_stable_module(-1, 0)
        with pytest.raises(InputError):
            corralg.build_stable_module(0, 0, ())

    def test_default_window(self):
        assert corralg.default_window(0, 4) == (-3, -2, -1, 0, 1, 2)

    def test_leaving_the_window(self):
        module = corralg.build_stable_module(0, 2, (0,))
        with pytest.raises(InputError):
            module.act(corralg.E_P, {(0, 0): 1}, 0)


class TestRelations:
    @pytest.mark.parametrize("m", [-2, 0, 4])
    def test_genus_zero(self, m):
        report = corralg.check_relations(corralg.build_stable_module(0, m))
        assert report.checked > 0
        assert report.to_json()["passed"]

    def test_genus_one(self):
        module = corralg.build_stable_module(1, 2, (-1, 0))
        assert corralg.check_relations(module).checked > 0

    def test_literal_sign_fails(self):
        module = corralg.build_stable_module(1, 2, (-1, 0), literal_sign=True)
        with pytest.raises(corralg.RelationViolation):
            corralg.check_relations(module)

    @pytest.mark.slow
    @pytest.mark.parametrize("genus", [2])
    def test_higher_genus(self, genus):
        module = corralg.build_stable_module(genus, 0)
        serial = corralg.check_relations(module)
        assert corralg.check_relations(module, jobs=2) == serial


class TestFixedLocus:
    @pytest.mark.parametrize("genus", range(3))
    def test_model(self, genus):
        model = corralg.fixed_locus_model(genus)
        assert len(model.basis()) == 4 * 4**genus

    @pytest.mark.parametrize("genus", range(3))
    @pytest.mark.parametrize("n", [0, 1])
    def test_cogeneration(self, genus, n):
        element = corralg.cogeneration_check(genus, n)
        assert max(k for _, k in element) == n + 4 * genus

    def test_cogeneration_needs_nonnegative_power(self):
        with pytest.raises(InputError):
            corralg.cogeneration_check(1, -1)


class TestCharacters:
    def test_projective_space(self):
        character = corralg.symmetric_product_character(0, 3, ChiClass.trivial)
        for d in range(4):
            part = character.restrict_a([d])
            assert part == corralg.GradedChar(
                (corralg.Weight(d, 2 * j, 2 * j), 1) for j in range(d + 1)
            )

    def test_canonical_system(self):
        character = corralg.symmetric_product_character(2, 4, ChiClass.generic)
        assert character.restrict_a([2]) == corralg.GradedChar([(corralg.Weight(2, 2, 2), 1)])
        assert character.dimension() == 4

    @pytest.mark.parametrize("genus", [1, 2, 3])
    def test_clifford_dimension(self, genus):
        character = corralg.symmetric_product_character(genus, 10, ChiClass.two_torsion)
        assert character.dimension() == 2 ** (2 * genus - 2)

    def test_no_characters_on_the_line(self):
        with pytest.raises(InputError):
            corralg.symmetric_product_character(0, 1, ChiClass.generic)

    def test_json(self):
        character = corralg.symmetric_product_character(1, 2, ChiClass.trivial)
        assert corralg.GradedChar.from_json(character.to_json()) == character

    def test_tate(self):
        character = corralg.GradedChar([(corralg.Weight(0, 2, 2), 3)])
        assert character.tate(2) == corralg.GradedChar([(corralg.Weight(0, 0, 0), 3)])

    def test_mismatch(self):
        left = corralg.GradedChar([(corralg.Weight(0, 0, 0), 1)])
        right = corralg.GradedChar([(corralg.Weight(0, 0, 0), 2)])
        with pytest.raises(corralg.CharacterMismatch) as err:
            corralg.assert_equal_characters(left, right)
        assert err.value.witness["left"] == 1


class TestLocalCohomology:
    def test_degree_one(self):
        pieces = corralg.local_cohomology_character(8, -16)
        assert pieces.total.terms
        assert all(w.degree == 1 for w in pieces.total.terms)

    def test_twist(self):
        twisted = corralg.local_cohomology_character(2, -6, twist=2).total
        assert twisted == corralg.local_cohomology_character(2, -8).total.shift_a(2)

    @pytest.mark.parametrize("m", range(-3, 4))
    @pytest.mark.parametrize("d_max", range(6))
    def test_genus_zero_theorem(self, m, d_max):
        corralg.thm2_character_check_g0(m, d_max)

    @pytest.mark.parametrize(("m", "d_max"), [(-3, 0), (-3, 1), (-2, 0)])
    def test_genus_zero_empty_window(self, m, d_max):
        assert corralg.thm2_character_check_g0(m, d_max) == corralg.GradedChar()

    def test_centering_shift(self):
        with pytest.raises(corralg.CharacterMismatch):
            corralg.thm2_character_check_g0(0, 3, centering_shift=1)


class TestLedger:
    @pytest.mark.parametrize("genus", range(4))
    @pytest.mark.parametrize("deg_m", range(-2, 3))
    @pytest.mark.parametrize("chi", list(ChiClass))
    def test_columns_agree(self, genus, deg_m, chi):
        if genus == 0 and chi is not ChiClass.trivial:
            with pytest.raises(InputError):
                corralg.thm2_weight_ledger(genus, deg_m, chi)
            return
        report = corralg.thm2_weight_ledger(genus, deg_m, chi)
        assert report.to_json()["verdict"] == "equal"

    def test_genus_one(self):
        payload = corralg.thm2_weight_ledger(1, 0, ChiClass.trivial).to_json()
        assert payload["sub"]["expanded"] == {"a": 0, "degree": 0, "weight2": 0, "symbol": ""}
        assert payload["quot"]["expanded"] == payload["sub"]["expanded"]

    def test_generic_symbols(self):
        payload = corralg.thm2_weight_ledger(3, 2, ChiClass.generic).to_json()
        assert payload["chi"] == "generic"

    def test_determinant_twist(self):
        assert corralg.determinant_twist(2, ChiClass.trivial) == corralg.LedgerWeight(
            k_exp=1, tate=-2
        )
        assert corralg.cohomology_dimensions(2, ChiClass.generic) == (0, 2, 0)

    def test_shifted_row_is_caught(self, monkeypatch):
        spinor_rows = corralg._spinor_rows

        def _shifted(genus, chi):
            sub, quot = spinor_rows(genus, chi)
            label, weight = quot[-1]
            return sub, quot[:-1] + ((label, weight + corralg.LedgerWeight(tate=1)),)

        monkeypatch.setattr(corralg, "_spinor_rows", _shifted)
        with pytest.raises(corralg.LedgerMismatch) as err:
            corralg.thm2_weight_ledger(2, 0, ChiClass.generic)
        assert str(err.value).startswith("spinor quot")
        assert err.value.witness["rows"][-1][0] == "local cohomology"

    def test_generator_degree_enters_the_quotient(self, monkeypatch):
        character = corralg.symmetric_product_character
        monkeypatch.setattr(
            corralg,
            "symmetric_product_character",
            lambda *args: character(*args).shift_a(1),
        )
        with pytest.raises(corralg.LedgerMismatch) as err:
            corralg.thm2_weight_ledger(1, 0, ChiClass.trivial)
        assert str(err.value).startswith("moduli quot")

    def test_wrong_betti_number_is_caught(self, monkeypatch):
        monkeypatch.setattr(
            corralg, "cohomology_dimensions", lambda genus, chi: (1, 2 * genus + 2, 1)
        )
        with pytest.raises(corralg.LedgerMismatch):
            corralg.thm2_weight_ledger(1, 0, ChiClass.trivial)

    def test_spinor_rows(self):
        sub, quot = corralg._spinor_rows(2, ChiClass.two_torsion)
        assert dict(sub)["Spin"] == corralg.LedgerWeight(k_exp=-1, chi_exp=-2, tate=2)
        assert dict(quot)["Spin"] == corralg.LedgerWeight(k_exp=-1, chi_exp=-2, tate=-2)
        assert dict(quot)["local cohomology"] == corralg.LedgerWeight(chi_exp=2, tate=2)
        assert dict(sub)["O(M)"] == corralg.LedgerWeight(m_exp=1)

    @pytest.mark.parametrize(("g_max", "expected"), [(4, [(2, 0)]), (1, []), (2, [(2, 0)])])
    def test_exception_scan(self, g_max, expected):
        assert corralg.exception_scan(g_max) == expected

    @pytest.mark.parametrize("chi", [ChiClass.trivial, ChiClass.two_torsion])
    def test_no_exception_when_square_is_trivial(self, chi):
        assert corralg.exception_scan(4, chi=chi) == []
