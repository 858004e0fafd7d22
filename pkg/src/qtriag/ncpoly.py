"""Exact noncommutative polynomials with confluent normal ordering.

The algebras handled here are of quantum-torus type: a finite alphabet of
generators with a fixed total precedence, where every pair of distinct
letters u, v satisfies  u*v = c * v*u  for an invertible scalar c.  Normal
ordering sorts each word by precedence while collecting the commutation
scalars; exponent blocks swap at cost c^{m*n}.  Expressions live over the
exact ring of :mod:`qtriag.coeffs` and may have 1, 2 or 3 tensor factors;
letters in distinct factors commute exactly.

Words are tuples of (letter, exponent) pairs, monomials are tuples of words
(one word per tensor factor), and an expression is a finite map from
monomials to scalars.  Everything is treated as immutable; the operations
are pure functions taking the :class:`Presentation` explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .coeffs import Scalar

Word = tuple[tuple[str, int], ...]
Monomial = tuple[Word, ...]

EMPTY_WORD: Word = ()

#: Rewrite budget per word: quantum-torus sorting is quadratic, so a blown
#: budget signals a rule bug rather than a long computation.
BUDGET_FACTOR = 64


class PresentationError(ValueError):
    """Malformed presentation or expression outside the presentation."""


class RewriteBudgetError(RuntimeError):
    """Normal ordering exceeded its step budget (non-termination guard)."""


@dataclass(frozen=True)
class Generator:
    """One letter of a presentation.

    ``adjoint`` names the letter representing the star of this one (itself
    for self-adjoint letters).  ``unitary`` letters satisfy g* = g^{-1}, so
    their star is carried as exponent negation instead of a partner letter.
    """

    name: str
    invertible: bool = False
    adjoint: str = ""
    unitary: bool = False

    def __post_init__(self):
        if not self.adjoint:
            object.__setattr__(self, "adjoint", self.name)
        if self.unitary and not self.invertible:
            raise PresentationError(f"unitary generator {self.name} must be invertible")
        if self.unitary and self.adjoint != self.name:
            raise PresentationError(f"unitary generator {self.name} cannot have a partner adjoint")


class Presentation:
    """Generators with total precedence plus pairwise commutation rules.

    ``rules`` lists triples (hi, lo, c) meaning  hi*lo = c * lo*hi  where hi
    comes later than lo in the generator order.  Every unordered pair of
    distinct letters must carry exactly one rule and every scalar must be an
    invertible s-monomial; both are checked at construction.
    """

    def __init__(self, name: str, generators: Iterable[Generator],
                 rules: Iterable[tuple[str, str, Scalar]]):
        self.name = name
        self.generators = tuple(generators)
        self._by_name = {g.name: g for g in self.generators}
        if len(self._by_name) != len(self.generators):
            raise PresentationError("duplicate generator names")
        self._prec = {g.name: i for i, g in enumerate(self.generators)}
        for g in self.generators:
            partner = self._by_name.get(g.adjoint)
            if partner is None:
                raise PresentationError(f"adjoint {g.adjoint} of {g.name} not in alphabet")
            if partner.adjoint != g.name:
                raise PresentationError(f"adjoint pairing {g.name} <-> {g.adjoint} is not an involution")
            if partner.invertible != g.invertible:
                raise PresentationError(f"{g.name} and its adjoint disagree on invertibility")

        self._comm: dict[tuple[str, str], Scalar] = {}
        for hi, lo, c in rules:
            if hi not in self._prec or lo not in self._prec:
                raise PresentationError(f"rule on unknown pair ({hi}, {lo})")
            if self._prec[hi] <= self._prec[lo]:
                raise PresentationError(f"rule ({hi}, {lo}) not oriented by precedence")
            if not c.is_monomial():
                raise PresentationError(f"commutation scalar for ({hi}, {lo}) is not invertible")
            if (hi, lo) in self._comm:
                raise PresentationError(f"duplicate rule for ({hi}, {lo})")
            self._comm[(hi, lo)] = c
        names = [g.name for g in self.generators]
        for i, lo in enumerate(names):
            for hi in names[i + 1:]:
                if (hi, lo) not in self._comm:
                    raise PresentationError(f"missing commutation rule for ({hi}, {lo})")

    # -- lookups --------------------------------------------------------

    def generator(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise PresentationError(f"unknown generator {name!r}") from None

    def precedence(self, name: str) -> int:
        return self._prec[name]

    def comm_scalar(self, hi: str, lo: str) -> Scalar:
        """Scalar c with hi*lo = c*lo*hi (hi of higher precedence)."""
        return self._comm[(hi, lo)]

    def rules(self) -> list[tuple[str, str, Scalar]]:
        return [(hi, lo, c) for (hi, lo), c in self._comm.items()]

    def relations(self) -> list[tuple[str, "NCExpr", "NCExpr"]]:
        """The defining relations as (label, lhs, rhs) expression pairs."""
        out = []
        for (hi, lo), c in self._comm.items():
            lhs = NCExpr.word((( hi, 1), (lo, 1)))
            rhs = NCExpr.word(((lo, 1), (hi, 1)), coeff=c)
            out.append((f"{hi}.{lo}", lhs, rhs))
        return out

    def star_letter(self, name: str, exp: int) -> tuple[str, int]:
        g = self.generator(name)
        if g.unitary:
            return (name, -exp)
        return (g.adjoint, exp)

    def substitute_s(self, e: int, name: str | None = None) -> "Presentation":
        """Same alphabet with every commutation scalar under s -> s^e."""
        return Presentation(
            name or f"{self.name}[s^{e}]",
            self.generators,
            [(hi, lo, c.subs_s_power(e)) for (hi, lo), c in self._comm.items()],
        )

    def __repr__(self) -> str:
        return f"Presentation({self.name}, {[g.name for g in self.generators]})"


class NCExpr:
    """A normal-orderable noncommutative polynomial with tensor arity."""

    __slots__ = ("arity", "_terms")

    def __init__(self, arity: int, terms: dict[Monomial, Scalar] | None = None):
        if arity not in (1, 2, 3):
            raise PresentationError(f"unsupported tensor arity {arity}")
        clean = {m: c for m, c in (terms or {}).items() if c}
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("NCExpr is immutable")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(arity: int = 1) -> "NCExpr":
        return NCExpr(arity, {})

    @staticmethod
    def unit(arity: int = 1, coeff: Scalar = Scalar.one()) -> "NCExpr":
        return NCExpr(arity, {tuple(EMPTY_WORD for _ in range(arity)): coeff})

    @staticmethod
    def word(w: Word, coeff: Scalar = Scalar.one()) -> "NCExpr":
        return NCExpr(1, {(tuple(w),): coeff})

    @staticmethod
    def gen(name: str, exp: int = 1) -> "NCExpr":
        return NCExpr.word(((name, exp),))

    @staticmethod
    def monomial(factors: Monomial, coeff: Scalar = Scalar.one()) -> "NCExpr":
        factors = tuple(tuple(w) for w in factors)
        return NCExpr(len(factors), {factors: coeff})

    # -- linear structure -------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Scalar]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "NCExpr") -> "NCExpr":
        if self.arity != other.arity:
            raise PresentationError("tensor arity mismatch in addition")
        out = dict(self._terms)
        for m, c in other._terms.items():
            w = out.get(m, Scalar.zero()) + c
            if w:
                out[m] = w
            else:
                out.pop(m, None)
        return NCExpr(self.arity, out)

    def __sub__(self, other: "NCExpr") -> "NCExpr":
        return self + (-other)

    def __neg__(self) -> "NCExpr":
        return NCExpr(self.arity, {m: -c for m, c in self._terms.items()})

    def scale(self, c: Scalar) -> "NCExpr":
        return NCExpr(self.arity, {m: c * v for m, v in self._terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NCExpr)
            and self.arity == other.arity
            and self._terms == other._terms
        )

    def __hash__(self):
        raise TypeError("NCExpr is not hashable")

    def __str__(self) -> str:
        from .exprparse import format_expr  # cycle-free: formatting only

        return format_expr(self)

    def __repr__(self) -> str:
        return f"NCExpr({self.arity}, {len(self._terms)} terms)"


# ---------------------------------------------------------------------------
# word-level machinery
# ---------------------------------------------------------------------------


def _validate_word(w: Word, p: Presentation) -> None:
    for name, exp in w:
        g = p.generator(name)
        if exp == 0:
            raise PresentationError(f"zero exponent on {name}")
        if exp < 0 and not g.invertible:
            raise PresentationError(f"negative power of non-invertible generator {name}")


def _nf_word(w: Word, p: Presentation) -> tuple[Scalar, Word]:
    """Normal-order one word, returning the collected scalar and the sorted word."""
    _validate_word(w, p)
    letters = list(w)
    budget = BUDGET_FACTOR * max(1, len(letters)) ** 2
    steps = 0
    coeff = Scalar.one()
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(letters):
            (u, m), (v, n) = letters[i], letters[i + 1]
            if u == v:
                steps += 1
                e = m + n
                if e == 0:
                    del letters[i:i + 2]
                else:
                    letters[i:i + 2] = [(u, e)]
                changed = True
            elif p.precedence(u) > p.precedence(v):
                steps += 1
                coeff = coeff * (p.comm_scalar(u, v) ** (m * n))
                letters[i], letters[i + 1] = (v, n), (u, m)
                changed = True
                i += 1
            else:
                i += 1
            if steps > budget:
                raise RewriteBudgetError(
                    f"rewrite budget {budget} exceeded on word of length {len(w)}"
                )
    return coeff, tuple(letters)


def normal_form(e: NCExpr, p: Presentation) -> NCExpr:
    """Canonical form of e modulo the relations of p.

    Each tensor factor is normal-ordered independently; coefficients absorb
    the commutation scalars.  Idempotent, linear, and degree-preserving per
    letter.
    """
    out: dict[Monomial, Scalar] = {}
    for factors, c in e._terms.items():
        coeff = c
        nf_factors = []
        for w in factors:
            cw, ww = _nf_word(w, p)
            coeff = coeff * cw
            nf_factors.append(ww)
        key = tuple(nf_factors)
        w = out.get(key, Scalar.zero()) + coeff
        if w:
            out[key] = w
        else:
            out.pop(key, None)
    return NCExpr(e.arity, out)


def mul(e1: NCExpr, e2: NCExpr, p: Presentation) -> NCExpr:
    """Product in the quotient algebra: factorwise concatenation, then NF."""
    if e1.arity != e2.arity:
        raise PresentationError("tensor arity mismatch in product")
    out: dict[Monomial, Scalar] = {}
    for m1, c1 in e1._terms.items():
        for m2, c2 in e2._terms.items():
            key = tuple(w1 + w2 for w1, w2 in zip(m1, m2))
            c = c1 * c2
            w = out.get(key, Scalar.zero()) + c
            if w:
                out[key] = w
            else:
                out.pop(key, None)
    return normal_form(NCExpr(e1.arity, out), p)


def star(e: NCExpr, p: Presentation) -> NCExpr:
    """The *-involution: antilinear, reverses words, stars each letter."""
    out: dict[Monomial, Scalar] = {}
    for factors, c in e._terms.items():
        key = tuple(
            tuple(p.star_letter(name, exp) for name, exp in reversed(w))
            for w in factors
        )
        cc = c.conj()
        w = out.get(key, Scalar.zero()) + cc
        if w:
            out[key] = w
        else:
            out.pop(key, None)
    return normal_form(NCExpr(e.arity, out), p)


def tensor(e1: NCExpr, e2: NCExpr) -> NCExpr:
    """Algebraic tensor product, concatenating factor tuples."""
    out: dict[Monomial, Scalar] = {}
    for m1, c1 in e1._terms.items():
        for m2, c2 in e2._terms.items():
            out[m1 + m2] = out.get(m1 + m2, Scalar.zero()) + c1 * c2
    return NCExpr(e1.arity + e2.arity, out)


def expr_power(e: NCExpr, n: int, p: Presentation) -> NCExpr:
    """e**n; negative n requires e to be a single invertible monomial."""
    if n == 0:
        return NCExpr.unit(e.arity)
    if n < 0:
        return expr_power(invert_monomial_expr(e, p), -n, p)
    acc = NCExpr.unit(e.arity)
    for _ in range(n):
        acc = mul(acc, e, p)
    return acc


def invert_monomial_expr(e: NCExpr, p: Presentation) -> NCExpr:
    """Inverse of c*(w_1 x ... x w_k) with every letter invertible."""
    if len(e._terms) != 1:
        raise PresentationError("not invertible: expression is not a monomial")
    (factors, c), = e._terms.items()
    inv_factors = []
    for w in factors:
        for name, _ in w:
            if not p.generator(name).invertible:
                raise PresentationError(f"not invertible: letter {name} has no inverse")
        inv_factors.append(tuple((name, -exp) for name, exp in reversed(w)))
    return normal_form(NCExpr(e.arity, {tuple(inv_factors): c.inverse()}), p)


def flip(e: NCExpr) -> NCExpr:
    """Reverse the tensor factors of every term (the flip map sigma)."""
    out: dict[Monomial, Scalar] = {}
    for factors, c in e._terms.items():
        key = tuple(reversed(factors))
        out[key] = out.get(key, Scalar.zero()) + c
    return NCExpr(e.arity, out)


def subs_s_expr(e: NCExpr, exponent: int) -> NCExpr:
    """Apply s -> s^exponent to every coefficient of e."""
    out: dict[Monomial, Scalar] = {}
    for factors, c in e._terms.items():
        cc = c.subs_s_power(exponent)
        if cc:
            out[factors] = cc
    return NCExpr(e.arity, out)


def multidegree(e: NCExpr) -> dict[str, int] | None:
    """Common per-letter signed degree of all terms, or None if mixed.

    Normal ordering never creates or destroys letters, so this vector is a
    rewrite invariant of every homogeneous expression.
    """
    degs = None
    for factors, _ in e._terms.items():
        d: dict[str, int] = {}
        for w in factors:
            for name, exp in w:
                d[name] = d.get(name, 0) + exp
        d = {k: v for k, v in d.items() if v}
        if degs is None:
            degs = d
        elif degs != d:
            return None
    return degs or {}


# ---------------------------------------------------------------------------
# homomorphism and coassociativity checks
# ---------------------------------------------------------------------------


def extend_images(images: dict[str, NCExpr], p: Presentation) -> dict[str, NCExpr]:
    """Close a generator->image map under adjoints.

    Images of starred partners default to the star of the given image; if
    both are supplied they must agree up to normal form.
    """
    ims = dict(images)
    for g in p.generators:
        if g.name in ims and not g.unitary:
            derived = star(ims[g.name], p)
            if g.adjoint in images:
                if not normal_form(images[g.adjoint] - derived, p).is_zero():
                    raise PresentationError(
                        f"image of {g.adjoint} is inconsistent with star of image of {g.name}"
                    )
            else:
                ims[g.adjoint] = derived
    missing = [g.name for g in p.generators if g.name not in ims]
    if missing:
        raise PresentationError(f"images missing for generators {missing}")
    return ims


def apply_hom(images: dict[str, NCExpr], e: NCExpr, p: Presentation) -> NCExpr:
    """Extend a generator->image assignment multiplicatively to e.

    The images must all share one tensor arity; inverses of invertible
    letters map to the inverse of the (necessarily monomial) image.
    """
    arity = next(iter(images.values())).arity
    out = NCExpr.zero(arity)
    for factors, c in e._terms.items():
        acc = NCExpr.unit(arity, coeff=c)
        for w in factors:
            for name, exp in w:
                if name not in images:
                    raise PresentationError(f"no image assigned for generator {name}")
                acc = mul(acc, expr_power(images[name], exp, p), p)
        out = out + acc
    return normal_form(out, p)


@dataclass
class CheckEntry:
    label: str
    residual_terms: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.residual_terms == 0


@dataclass
class CheckReport:
    """Outcome of a symbolic verification: all residuals must vanish."""

    name: str
    entries: list[CheckEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(en.ok for en in self.entries)

    @property
    def total_residual_terms(self) -> int:
        return sum(en.residual_terms for en in self.entries)

    def add(self, label: str, residual: NCExpr) -> None:
        detail = "" if residual.is_zero() else str(residual)
        self.entries.append(CheckEntry(label, len(residual), detail))


def check_hom(images: dict[str, NCExpr], p: Presentation,
              name: str = "hom") -> CheckReport:
    """Verify that the images respect every defining relation of p.

    For each rule hi*lo = c*lo*hi the residual
    ``image(hi)image(lo) - c image(lo)image(hi)`` is normal-ordered in the
    target; the report records its term count (0 means the relation holds).
    """
    ims = extend_images(images, p)
    for g in p.generators:
        if g.invertible:
            invert_monomial_expr(ims[g.name], p)  # raises if not invertible
    report = CheckReport(name)
    for (hi, lo), c in p._comm.items():
        lhs = mul(ims[hi], ims[lo], p)
        rhs = mul(ims[lo], ims[hi], p).scale(c)
        report.add(f"{hi}.{lo}", normal_form(lhs - rhs, p))
    return report


def _apply_on_factor(e: NCExpr, idx: int, fn: Callable[[Word], NCExpr],
                     p: Presentation) -> NCExpr:
    """Replace factor idx of each term by fn(word), tensoring the rest back."""
    out = None
    for factors, c in e._terms.items():
        pieces = []
        for i, w in enumerate(factors):
            pieces.append(fn(w) if i == idx else NCExpr.word(w))
        acc = pieces[0]
        for piece in pieces[1:]:
            acc = tensor(acc, piece)
        acc = acc.scale(c)
        out = acc if out is None else out + acc
    if out is None:
        # arity of the result: original arity plus what fn adds
        out = NCExpr.zero(e.arity + fn(EMPTY_WORD).arity - 1)
    return normal_form(out, p)


# ---------------------------------------------------------------------------
# exhaustive rewriting oracle and confluence smoke test
# ---------------------------------------------------------------------------


def single_step_rewrites(coeff: Scalar, w: Word,
                         p: Presentation) -> list[tuple[Scalar, Word]]:
    """Every result of applying one rewrite at one position of w.

    Independent of the engine's exponent-block shortcut: a swap here costs
    exactly c^{m*n} for the two adjacent blocks it exchanges, and a merge
    fuses one adjacent equal-letter pair.
    """
    out = []
    for i in range(len(w) - 1):
        (u, m), (v, n) = w[i], w[i + 1]
        if u == v:
            e = m + n
            merged = w[:i] + (((u, e),) if e else ()) + w[i + 2:]
            out.append((coeff, merged))
        elif p.precedence(u) > p.precedence(v):
            c = p.comm_scalar(u, v) ** (m * n)
            out.append((coeff * c, w[:i] + ((v, n), (u, m)) + w[i + 2:]))
    return out


def rewrite_fixpoints(w: Word, p: Presentation,
                      state_cap: int = 200_000) -> set[tuple]:
    """All normal forms reachable from w by exhaustive single-step rewriting.

    Returns a set of (scalar-key, word) pairs; a confluent terminating rule
    system yields exactly one element.  The state cap converts runaway rule
    systems into an error instead of a hang.
    """
    _validate_word(w, p)
    start = (Scalar.one(), tuple(w))
    seen = {(start[0]._key(), start[1])}
    frontier = [start]
    fixpoints: set[tuple] = set()
    while frontier:
        coeff, word = frontier.pop()
        nexts = single_step_rewrites(coeff, word, p)
        if not nexts:
            fixpoints.add((coeff._key(), word))
            continue
        for c2, w2 in nexts:
            key = (c2._key(), w2)
            if key not in seen:
                seen.add(key)
                frontier.append((c2, w2))
        if len(seen) > state_cap:
            raise RewriteBudgetError(f"rewrite closure exceeded {state_cap} states")
    return fixpoints


def confluence_smoke(p: Presentation, length: int = 3) -> list[Word]:
    """Return the words of the given length whose normal form is not unique.

    Every word over the single-letter tokens (negative exponents only on
    invertible letters) is closed under all rewrite orders; the engine's
    answer must be the unique fixpoint.  An empty list means the smoke test
    passed.
    """
    tokens: list[tuple[str, int]] = []
    for g in p.generators:
        tokens.append((g.name, 1))
        if g.invertible:
            tokens.append((g.name, -1))

    def words(k: int):
        if k == 0:
            yield ()
            return
        for rest in words(k - 1):
            for t in tokens:
                yield rest + (t,)

    bad: list[Word] = []
    for w in words(length):
        fps = rewrite_fixpoints(w, p)
        c_engine, w_engine = _nf_word(w, p)
        if fps != {(c_engine._key(), w_engine)}:
            bad.append(w)
    return bad


def coassoc_check(images: dict[str, NCExpr], p: Presentation,
                  degree: int = 1) -> CheckReport:
    """Verify (D x id)D = (id x D)D on generators and words up to ``degree``.

    ``images`` is the arity-2 coproduct assignment on generators; it is
    extended multiplicatively, so checking longer words exercises the engine
    rather than the axioms.
    """
    ims = extend_images(images, p)

    def delta_word(w: Word) -> NCExpr:
        acc = NCExpr.unit(2)
        for name, exp in w:
            acc = mul(acc, expr_power(ims[name], exp, p), p)
        return acc

    report = CheckReport("coassoc")
    words: list[Word] = [((g.name, 1),) for g in p.generators]
    if degree >= 2:
        names = [g.name for g in p.generators]
        for n1 in names:
            for n2 in names:
                words.append(((n1, 1), (n2, 1)))
    for w in words:
        dw = delta_word(w)
        lhs = _apply_on_factor(dw, 0, delta_word, p)
        rhs = _apply_on_factor(dw, 1, delta_word, p)
        label = "".join(f"{n}^{e}" if e != 1 else n for n, e in w)
        report.add(label, normal_form(lhs - rhs, p))
    return report
