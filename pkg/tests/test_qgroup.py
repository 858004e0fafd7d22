"""Presentation-level checks with hand-expanded frozen oracles."""

import pytest
from hypothesis import given, settings, strategies as st

from qtriag.coeffs import E4X, Q, Scalar
from qtriag.ncpoly import (
    NCExpr,
    multidegree,
    mul,
    normal_form,
    star,
    tensor,
)
from qtriag.qgroup import (
    PolarPresentation,
    build_polar,
    build_qtriag,
    check_coproduct,
    check_flip_symmetry,
    counit_candidate_check,
    derive_commutation_from_polar,
    derive_q_from_polar,
    double_flip_is_identity,
    flipped_coproduct,
    q_ladder_engine,
    q_ladder_oracle,
    scalar_ratio,
    smoke_presentations,
    star_closure_check,
)

QT = build_qtriag()
P = QT.base
POLAR = build_polar()


def word(*pairs, coeff=Scalar.one()):
    return NCExpr.word(tuple(pairs), coeff=coeff)


class TestQTriagPresentation:
    def test_rule_inventory(self):
        # two defining + two normality + two star-derived
        assert len(P.rules()) == 6
        assert len(QT.defining) == 2
        assert len(QT.normality) == 2
        assert len(QT.derived) == 2

    def test_defining_reordering(self):
        assert normal_form(word(("a", 1), ("bs", 1)), P) == word(
            ("bs", 1), ("a", 1), coeff=Q
        )

    def test_derived_reordering(self):
        assert normal_form(word(("as", 1), ("b", 1)), P) == word(
            ("b", 1), ("as", 1), coeff=Q.inverse()
        )

    def test_normality_rules_present(self):
        assert normal_form(word(("as", 1), ("a", 1)), P) == word(("a", 1), ("as", 1))
        assert normal_form(word(("b", 1), ("bs", 1)), P) == word(("bs", 1), ("b", 1))

    def test_confluence_smoke(self):
        assert smoke_presentations() == {"qtriag": 0, "polar": 0}

    def test_star_closure(self):
        report = star_closure_check(P)
        assert report.ok
        assert len(report.entries) == 6


class TestPolar:
    def test_phase_scales_other_modulus(self):
        assert normal_form(word(("Pha", 1), ("Mb", 1)), POLAR.base) == word(
            ("Mb", 1), ("Pha", 1), coeff=E4X
        )

    def test_moduli_commute(self):
        assert normal_form(word(("Ma", 1), ("Mb", 1)), POLAR.base) == word(
            ("Ma", 1), ("Mb", 1)
        )

    def test_inverse_phase_scales_down(self):
        # star/inverse of the cross relation: Phb^-1 Ma = s^-4 Ma Phb^-1
        assert normal_form(word(("Phb", -1), ("Ma", 1)), POLAR.base) == word(
            ("Ma", 1), ("Phb", -1), coeff=E4X.inverse()
        )

    def test_conjugation_form_all_eight(self):
        base = POLAR.base
        for ph, m in (("Pha", "Mb"), ("Phb", "Ma")):
            for sign in (1, -1):
                lhs = normal_form(
                    word((ph, sign), (m, 1), (ph, -sign)), base
                )
                expected = word((m, 1), coeff=E4X ** sign)
                assert lhs == expected, (ph, m, sign)
        for ph, m in (("Pha", "Ma"), ("Phb", "Mb")):
            for sign in (1, -1):
                lhs = normal_form(word((ph, sign), (m, 1), (ph, -sign)), base)
                assert lhs == word((m, 1)), (ph, m, sign)

    def test_derive_q(self):
        assert derive_q_from_polar() == Scalar.s_power(8)
        assert derive_commutation_from_polar() == Scalar.one()

    def test_derive_q_under_s_inversion(self):
        flipped = PolarPresentation(
            POLAR.base.substitute_s(-1), dict(POLAR.embed)
        )
        assert derive_q_from_polar(flipped) == Scalar.s_power(-8)

    def test_unitary_star_is_inverse(self):
        pha_star = star(NCExpr.gen("Pha"), POLAR.base)
        assert pha_star == NCExpr.gen("Pha", -1)
        ma_star = star(NCExpr.gen("Ma"), POLAR.base)
        assert ma_star == NCExpr.gen("Ma")


class TestCoproduct:
    def test_reports_pass(self):
        reports = check_coproduct(QT)
        assert reports["hom"].ok
        assert reports["coassoc"].ok

    def test_hand_expansion_of_a_times_bstar_image(self):
        # D(a) D(b*) expands to q (a a* (x) b* a) + q (b* a (x) a a*^{-1})
        from qtriag.ncpoly import extend_images

        ims = extend_images(QT.coproduct, P)
        lhs = mul(ims["a"], ims["bs"], P)
        expected = NCExpr.monomial(
            ((("a", 1), ("as", 1)), (("bs", 1), ("a", 1))), coeff=Q
        ) + NCExpr.monomial(
            ((("bs", 1), ("a", 1)), (("a", 1), ("as", -1))), coeff=Q
        )
        assert normal_form(lhs - expected, P).is_zero()

    def test_coassoc_on_b_three_terms(self):
        reports = check_coproduct(QT, degree=2)
        entry = {e.label: e for e in reports["coassoc"].entries}["b"]
        assert entry.ok

    def test_grouplike_inverse(self):
        from qtriag.ncpoly import extend_images, expr_power

        ims = extend_images(QT.coproduct, P)
        inv_image = expr_power(ims["a"], -1, P)
        assert inv_image == NCExpr.monomial(((("a", -1),), (("a", -1),)))

    def test_multidegree_bookkeeping(self):
        # D(b) components carry (deg_a, deg_b) = (1,0)x(0,1) + (0,1)x(-1,0)
        terms = QT.coproduct["b"].terms
        degs = set()
        for factors in terms:
            fd = []
            for w in factors:
                d = {}
                for name, exp in w:
                    d[name] = d.get(name, 0) + exp
                fd.append((d.get("a", 0), d.get("b", 0)))
            degs.add(tuple(fd))
        assert degs == {((1, 0), (0, 1)), ((0, 1), (-1, 0))}


class TestFlip:
    def test_flip_fixes_grouplike(self):
        flipped = flipped_coproduct(QT)
        assert flipped["a"] == QT.coproduct["a"]

    def test_flip_reports_pass(self):
        reports = check_flip_symmetry()
        assert reports["hom"].ok
        assert reports["coassoc"].ok

    def test_flipped_b_image(self):
        flipped = flipped_coproduct(QT)
        expected = NCExpr.monomial(((("b", 1),), (("a", 1),))) + NCExpr.monomial(
            ((("a", -1),), (("b", 1),))
        )
        assert flipped["b"] == expected

    def test_double_flip(self):
        assert double_flip_is_identity()


class TestCounit:
    def test_non_paper_label(self):
        report = counit_candidate_check(QT)
        assert "non-paper" in report.name

    def test_counit_axioms_and_relations(self):
        report = counit_candidate_check(QT)
        assert report.ok
        labels = [e.label for e in report.entries]
        assert "(eps x id)D(b)" in labels


class TestQLadder:
    @given(st.integers(0, 5), st.integers(0, 5))
    @settings(max_examples=36, deadline=None)
    def test_engine_matches_oracle_and_formula(self, m, n):
        engine = q_ladder_engine(m, n)
        oracle = q_ladder_oracle(m, n)
        assert engine == oracle
        assert engine == Scalar.s_power(8 * m * n)

    def test_ratio_requires_matching_monomials(self):
        with pytest.raises(Exception):
            scalar_ratio(NCExpr.gen("a"), NCExpr.gen("b"))
