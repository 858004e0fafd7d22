"""The twisted quantum group of upper-triangular matrices, symbolically.

Two presentations of the same object:

* the normal-generator presentation on a (invertible) and b, with
  a*b = b*a and a*b^adj = q b^adj*a for q = s^8, plus normality and the
  star-derived rules, and the coproduct  D(a) = a(x)a,
  D(b) = a(x)b + b(x)a^{-1};
* the polar presentation on the unitary phases Ph_a, Ph_b and the positive
  invertible moduli M_a, M_b, where conjugating either modulus by the other
  phase scales it by s^4.

The operator-theoretic closures behind these formulas are out of scope: the
formal sum stands in for the closed operator sum, which is faithful for the
algebraic identities verified here.  The counit check is a plain Hopf-style
sanity instrument, not part of the source material (flagged "non-paper" in
its report).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffs import E4X, Q, Scalar
from .ncpoly import (
    CheckReport,
    Generator,
    NCExpr,
    Presentation,
    PresentationError,
    check_hom,
    coassoc_check,
    confluence_smoke,
    flip,
    mul,
    normal_form,
    star,
    subs_s_expr,
)

ONE = Scalar.one()


@dataclass
class QTriagPresentation:
    """Normal-generator presentation with its coproduct assignment."""

    base: Presentation
    coproduct: dict[str, NCExpr]
    defining: tuple[tuple[str, str], ...] = (("a", "b"), ("a", "bs"))
    normality: tuple[tuple[str, str], ...] = (("as", "a"), ("b", "bs"))
    derived: tuple[tuple[str, str], ...] = (("as", "b"), ("as", "bs"))


@dataclass
class PolarPresentation:
    """Phase/modulus presentation; embed holds a and b as polar words."""

    base: Presentation
    embed: dict[str, NCExpr] = field(default_factory=dict)


def build_qtriag(s_exponent: int = 1) -> QTriagPresentation:
    """The deformed presentation; s_exponent = -1 builds the x -> -x twin.

    Precedence is fixed as bs < b < a < as, inverses ride along as negative
    exponents of a and as.  The two starred rules are installed up front so
    rewriting is one pass; their correctness is the star-closure property
    verified by :func:`star_closure_check`.
    """
    gens = (
        Generator("bs", invertible=False, adjoint="b"),
        Generator("b", invertible=False, adjoint="bs"),
        Generator("a", invertible=True, adjoint="as"),
        Generator("as", invertible=True, adjoint="a"),
    )
    q = Q.subs_s_power(s_exponent)
    rules = [
        ("a", "b", ONE),               # defining: a.b = b.a
        ("a", "bs", q),                # defining: a.bs = q bs.a
        ("as", "a", ONE),              # normality of a
        ("b", "bs", ONE),              # normality of b
        ("as", "b", q.inverse()),      # star of (a, bs)
        ("as", "bs", ONE),             # star of (a, b)
    ]
    pres = Presentation("qtriag" if s_exponent == 1 else f"qtriag[s^{s_exponent}]",
                        gens, rules)
    coproduct = {
        "a": NCExpr.monomial(((("a", 1),), (("a", 1),))),
        "b": NCExpr.monomial(((("a", 1),), (("b", 1),)))
             + NCExpr.monomial(((("b", 1),), (("a", -1),))),
    }
    return QTriagPresentation(pres, coproduct)


def build_polar() -> PolarPresentation:
    """Polar presentation: commuting moduli/phases with s^4 cross-scaling.

    The conjugation relations Ph_a M_b Ph_a^* = s^4 M_b and
    Ph_b M_a Ph_b^* = s^4 M_a are stored in the equivalent swap form
    Ph M = s^4 M Ph; the unitarity of the phases makes the starred and
    inverted variants automatic.
    """
    gens = (
        Generator("Ma", invertible=True),                  # self-adjoint positive
        Generator("Mb", invertible=True),
        Generator("Pha", invertible=True, unitary=True),
        Generator("Phb", invertible=True, unitary=True),
    )
    rules = [
        ("Mb", "Ma", ONE),        # moduli strongly commute
        ("Pha", "Ma", ONE),       # phase commutes with its own modulus
        ("Pha", "Mb", E4X),       # Ph_a M_b = s^4 M_b Ph_a
        ("Phb", "Ma", E4X),       # Ph_b M_a = s^4 M_a Ph_b
        ("Phb", "Mb", ONE),
        ("Phb", "Pha", ONE),      # phases commute
    ]
    pres = Presentation("polar", gens, rules)
    embed = {
        "a": NCExpr.word((("Pha", 1), ("Ma", 1))),
        "b": NCExpr.word((("Phb", 1), ("Mb", 1))),
    }
    return PolarPresentation(pres, embed)


# ---------------------------------------------------------------------------
# relation-engine checks
# ---------------------------------------------------------------------------


def scalar_ratio(e1: NCExpr, e2: NCExpr) -> Scalar:
    """c with e1 = c*e2, both single-monomial expressions on one monomial."""
    if len(e1.terms) != 1 or len(e2.terms) != 1:
        raise PresentationError("ratio of non-monomial expressions")
    (m1, c1), = e1.terms.items()
    (m2, c2), = e2.terms.items()
    if m1 != m2:
        raise PresentationError("ratio of expressions with different monomials")
    return c1 / c2


def derive_q_from_polar(polar: PolarPresentation | None = None) -> Scalar:
    """Recover q as the reordering ratio of a b^adj against b^adj a.

    With a = Ph_a M_a and b = Ph_b M_b the polar rules alone force
    a b^adj = s^8 b^adj a, which must reproduce q exactly.
    """
    polar = polar or build_polar()
    p = polar.base
    av, bv = polar.embed["a"], polar.embed["b"]
    bstar = star(bv, p)
    return scalar_ratio(mul(av, bstar, p), mul(bstar, av, p))


def derive_commutation_from_polar(polar: PolarPresentation | None = None) -> Scalar:
    """Companion ratio of a b against b a: must be exactly 1."""
    polar = polar or build_polar()
    p = polar.base
    av, bv = polar.embed["a"], polar.embed["b"]
    return scalar_ratio(mul(av, bv, p), mul(bv, av, p))


def star_closure_check(pres: Presentation) -> CheckReport:
    """Star of every installed relation must rewrite to zero.

    This is the correctness proof of the precomputed derived rules: if a
    starred rule were missing or wrong, its adjoint residual would survive
    normal ordering.
    """
    report = CheckReport("star_closure")
    for label, lhs, rhs in pres.relations():
        residual = star(lhs - rhs, pres)
        report.add(f"star({label})", normal_form(residual, pres))
    return report


def q_ladder_engine(m: int, n: int, qt: QTriagPresentation | None = None) -> Scalar:
    """Engine coefficient of the reordering a^m bs^n -> c * bs^n a^m."""
    qt = qt or build_qtriag()
    p = qt.base
    fwd = tuple(pair for pair in ((("a", m)), (("bs", n))) if pair[1])
    rev = tuple(pair for pair in ((("bs", n)), (("a", m))) if pair[1])
    lhs = normal_form(NCExpr.word(fwd), p)
    return scalar_ratio(lhs, normal_form(NCExpr.word(rev), p))


def q_ladder_oracle(m: int, n: int, qt: QTriagPresentation | None = None) -> Scalar:
    """Step-by-step oracle for the same coefficient.

    Expands a^m bs^n into single letters and bubble-sorts with unit-exponent
    adjacent swaps, multiplying one commutation scalar per swap.  Shares no
    code path with the engine's block rule c^{m*n}.
    """
    qt = qt or build_qtriag()
    p = qt.base
    letters = ["a"] * m + ["bs"] * n
    coeff = Scalar.one()
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(letters) - 1):
            u, v = letters[i], letters[i + 1]
            if u != v and p.precedence(u) > p.precedence(v):
                coeff = coeff * p.comm_scalar(u, v)
                letters[i], letters[i + 1] = v, u
                swapped = True
    return coeff


# ---------------------------------------------------------------------------
# coproduct checks
# ---------------------------------------------------------------------------


def check_coproduct(qt: QTriagPresentation | None = None,
                    degree: int = 2) -> dict[str, CheckReport]:
    """Homomorphism and coassociativity of the coproduct, zero residuals."""
    qt = qt or build_qtriag()
    hom = check_hom(qt.coproduct, qt.base, name="coproduct_hom")
    coassoc = coassoc_check(qt.coproduct, qt.base, degree=degree)
    return {"hom": hom, "coassoc": coassoc}


def flipped_coproduct(qt: QTriagPresentation,
                      s_exponent: int = -1) -> dict[str, NCExpr]:
    """sigma o D with coefficients pushed through s -> s^exponent."""
    return {
        name: subs_s_expr(flip(image), s_exponent)
        for name, image in qt.coproduct.items()
    }


def check_flip_symmetry(degree: int = 2) -> dict[str, CheckReport]:
    """The flipped coproduct is a coproduct for the s -> s^{-1} presentation.

    This is the presentation-level face of "opposite coproduct at -x": apply
    the flip to the coproduct formulas, invert s everywhere, and demand that
    homomorphism and coassociativity still hold with zero residuals.
    """
    qt = build_qtriag()
    qt_inv = build_qtriag(s_exponent=-1)
    images = flipped_coproduct(qt, s_exponent=-1)
    hom = check_hom(images, qt_inv.base, name="flip_hom")
    coassoc = coassoc_check(images, qt_inv.base, degree=degree)
    return {"hom": hom, "coassoc": coassoc}


def double_flip_is_identity(qt: QTriagPresentation | None = None) -> bool:
    """Flip twice and undo the substitution: back to the original images."""
    qt = qt or build_qtriag()
    twice = {
        name: subs_s_expr(flip(image), -1)
        for name, image in flipped_coproduct(qt, -1).items()
    }
    return all(
        normal_form(twice[name] - qt.coproduct[name], qt.base).is_zero()
        for name in qt.coproduct
    )


def counit_candidate_check(qt: QTriagPresentation | None = None) -> CheckReport:
    """NON-PAPER candidate counit eps(a) = 1, eps(b) = 0.

    The source material states no counit for these generators; this check
    only records that the standard Hopf guess is consistent with the
    coproduct.  The report name carries the non-paper label.
    """
    qt = qt or build_qtriag()
    p = qt.base
    eps_vals = {"a": Scalar.one(), "as": Scalar.one(), "b": Scalar.zero(),
                "bs": Scalar.zero()}

    def eps_word(w) -> Scalar:
        acc = Scalar.one()
        for name, exp in w:
            v = eps_vals[name]
            if not v:
                return Scalar.zero()
            acc = acc * (v ** exp)
        return acc

    def contract(e: NCExpr, keep: int) -> NCExpr:
        out = NCExpr.zero(1)
        for factors, c in e.terms.items():
            w_eval = factors[1 - keep]
            w_keep = factors[keep]
            out = out + NCExpr.word(w_keep, coeff=c * eps_word(w_eval))
        return normal_form(out, p)

    report = CheckReport("counit_candidate (non-paper)")
    from .ncpoly import extend_images

    images = extend_images(qt.coproduct, p)
    for g in p.generators:
        target = NCExpr.gen(g.name)
        left = contract(images[g.name], keep=1)
        right = contract(images[g.name], keep=0)
        report.add(f"(eps x id)D({g.name})", normal_form(left - target, p))
        report.add(f"(id x eps)D({g.name})", normal_form(right - target, p))
    for label, lhs, rhs in p.relations():
        (ml, cl), = lhs.terms.items()
        (mr, cr), = rhs.terms.items()
        diff = eps_word(ml[0]) * cl - eps_word(mr[0]) * cr
        report.add(f"eps({label})", NCExpr.unit(1, coeff=diff))
    return report


def smoke_presentations() -> dict[str, int]:
    """Confluence smoke counts for both presentations (0 = confluent)."""
    return {
        "qtriag": len(confluence_smoke(build_qtriag().base)),
        "polar": len(confluence_smoke(build_polar().base)),
    }
