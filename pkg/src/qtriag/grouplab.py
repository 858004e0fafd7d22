"""Concrete groups, duals and bicharacters behind the deformation.

The group G consists of pairs (z, w) with z in C^*, w in C, multiplying like
the matrices [[z, w], [0, 1/z]]; K = C^* sits inside as w = 0.  The dual of
C^* is identified with Z x R_+^*: the character labelled (n, rho) sends
r e^{i theta} to e^{i ln r ln rho} e^{i n theta}.  The deforming bicharacter
on that dual is

    Psi_x((n, rho), (k, r)) = exp(i x (k ln rho - n ln r)),

and on the self-dual plane C it is Psi_x(z1, z2) = exp(i x Im(z1 conj(z2))).

A finite-ring analog of G over Z_n (units for z, residues for w) supports
the exact twisting checks; characters of its diagonal subgroup Z_n^* are
built from the unit-group structure (CRT plus primitive roots).

Branch convention: arguments live in (-pi, pi] throughout, so character
multiplicativity is only asserted away from the wrap-around set.

Two convention knobs are deliberately configurable and documented rather
than resolved:

* ``modular`` exponent c (default 2, as stated by the source formula
  |z|^{-c}); the grid Haar oracle in :func:`haar_modulus_oracle` measures
  what the real-Lebesgue convention actually produces (4) and reports it
  alongside, never substituting it.
* ``gamma_t`` constant kappa (default 2) chosen so that the pairing gives
  <gamma_t, z> = |z|^{2it}; the alternative reading gamma_t = (0, e^t)
  would differ by a factor 2 under the same pairing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import gcd

import numpy as np

DEFAULT_MODULAR_EXPONENT = 2
DEFAULT_GAMMA_KAPPA = 2.0


# ---------------------------------------------------------------------------
# the continuous group G
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """(z, w) with z nonzero, standing for [[z, w], [0, 1/z]]."""

    z: complex
    w: complex = 0j

    def __post_init__(self):
        if self.z == 0:
            raise ValueError("z must be nonzero")

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.z, self.w], [0.0, 1.0 / self.z]], dtype=complex)


IDENTITY = GroupElement(1.0 + 0j, 0j)


def mul(g1: GroupElement, g2: GroupElement) -> GroupElement:
    return GroupElement(g1.z * g2.z, g1.z * g2.w + g1.w / g2.z)


def inv(g: GroupElement) -> GroupElement:
    return GroupElement(1.0 / g.z, -g.w)


def modular(g: GroupElement, exponent: float = DEFAULT_MODULAR_EXPONENT) -> float:
    """The modular function |z|^{-exponent} (see module docstring)."""
    return abs(g.z) ** (-exponent)


def haar_modulus_oracle(r: float = 1.5, grid: int = 48,
                        breadth: float = 6.0) -> dict[str, float]:
    """Measure the right-translation scaling of a left-invariant grid sum.

    Uses the left Haar density |z|^{-4} dm(z) dm(w) of the real-Lebesgue
    convention (log-polar in z), integrates a Gaussian bump, right-translates
    by (r, 0) and reads off the exponent p with ratio = r^p.  The modular
    function in that convention is |z|^{-p}.  Quadrature is plain Riemann on
    a compactly supported smooth integrand, accurate far beyond the 1e-3
    comparison tolerance used in tests.
    """
    # coordinates: z = exp(u + i theta), w = wr + i wi
    u = np.linspace(-breadth, breadth, grid)
    th = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    wr = np.linspace(-breadth, breadth, grid)
    wi = np.linspace(-breadth, breadth, grid)
    U, TH, WR, WI = np.meshgrid(u, th, wr, wi, indexing="ij", sparse=True)

    def bump(uu, tt, xr, xi):
        return np.exp(-(uu ** 2) - tt ** 2 - xr ** 2 - xi ** 2)

    # dm(z) = e^{2u} du dtheta; left Haar density |z|^{-4} gives e^{-2u}
    weight = np.exp(-2.0 * U)
    base = float(np.sum(bump(U, TH, WR, WI) * weight))
    # right translation by (r, 0): (z, w) -> (z r, w / r)
    shifted = float(np.sum(bump(U + math.log(r), TH, WR / r, WI / r) * weight))
    measured = math.log(shifted / base) / math.log(r)
    # right translation by (r, 0) scales the left Haar sum by r^measured,
    # so the modular function is |z|^{-measured}: c_observed = measured.
    return {
        "translation_scale_exponent": measured,
        "observed_modular_exponent": measured,
        "declared_modular_exponent": float(DEFAULT_MODULAR_EXPONENT),
    }


# ---------------------------------------------------------------------------
# the dual of C^* and the one-parameter character group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualChar:
    """Character (n, rho) of C^*: re^{i theta} -> e^{i ln r ln rho} e^{i n theta}."""

    n: int
    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")


def pair(chi: DualChar, z: complex) -> complex:
    if z == 0:
        raise ValueError("characters of C^* are undefined at 0")
    r = abs(z)
    theta = cmath.phase(z)  # in (-pi, pi]
    return cmath.exp(1j * (math.log(r) * math.log(chi.rho) + chi.n * theta))


def char_mul(c1: DualChar, c2: DualChar) -> DualChar:
    return DualChar(c1.n + c2.n, c1.rho * c2.rho)


def gamma_t(t: float, kappa: float = DEFAULT_GAMMA_KAPPA) -> DualChar:
    """The modular one-parameter family: pair(gamma_t, z) = |z|^{i kappa t}."""
    return DualChar(0, math.exp(kappa * t))


# ---------------------------------------------------------------------------
# bicharacters
# ---------------------------------------------------------------------------


class Bicharacter:
    """Common interface: unit-modulus, multiplicative in each slot."""

    kind: str

    def eval(self, u, v) -> complex:
        raise NotImplementedError

    def combine(self, u, v):
        """Group law of the domain."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator):
        raise NotImplementedError


@dataclass(frozen=True)
class ZxRBicharacter(Bicharacter):
    """Psi_x on (Z x R_+^*)^2: exp(i x (k ln rho - n ln r))."""

    x: float
    kind: str = field(default="ZxR", init=False)

    def eval(self, u: DualChar, v: DualChar) -> complex:
        return cmath.exp(1j * self.x * (v.n * math.log(u.rho) - u.n * math.log(v.rho)))

    def combine(self, u: DualChar, v: DualChar) -> DualChar:
        return char_mul(u, v)

    def sample(self, rng: np.random.Generator) -> DualChar:
        return DualChar(int(rng.integers(-6, 7)), float(np.exp(rng.uniform(-2.0, 2.0))))


@dataclass(frozen=True)
class PlaneBicharacter(Bicharacter):
    """Psi_x on C^2 (additive, self-dual): exp(i x Im(z1 conj(z2)))."""

    x: float
    kind: str = field(default="C", init=False)

    def eval(self, z1: complex, z2: complex) -> complex:
        return cmath.exp(1j * self.x * (z1 * z2.conjugate()).imag)

    def combine(self, z1: complex, z2: complex) -> complex:
        return z1 + z2

    def sample(self, rng: np.random.Generator) -> complex:
        return complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))


def bichar_eval(psi: Bicharacter, u, v) -> complex:
    val = psi.eval(u, v)
    if abs(abs(val) - 1.0) > 1e-9:
        raise ValueError("bicharacter value escaped the unit circle")
    return val


def lambda_constant(psi: ZxRBicharacter, kappa: float = DEFAULT_GAMMA_KAPPA,
                    grid: int = 5) -> float:
    """Fit lambda with Psi(gamma_t, gamma_s) = lambda^{i t s} on a (t,s) grid.

    Both gamma characters have winding number 0, so for Psi_x every grid
    value is exactly 1 and the fitted lambda must be exactly 1.0.
    """
    logs = []
    ts = [k / 2 for k in range(1, grid + 1)]
    for t in ts:
        for s in ts:
            val = psi.eval(gamma_t(t, kappa), gamma_t(s, kappa))
            logs.append(cmath.phase(val) / (t * s))
    return math.exp(sum(logs) / len(logs))


def cocycle_check(psi: Bicharacter, samples: int = 10_000,
                  seed: int = 42) -> dict[str, float]:
    """Max residual of Psi(u,v)Psi(uv,w) = Psi(v,w)Psi(u,vw) over triples."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u, v, w = psi.sample(rng), psi.sample(rng), psi.sample(rng)
        lhs = psi.eval(u, v) * psi.eval(psi.combine(u, v), w)
        rhs = psi.eval(v, w) * psi.eval(u, psi.combine(v, w))
        worst = max(worst, abs(lhs - rhs))
    return {"max_residual": worst, "samples": samples, "seed": seed}


def antisymmetry_check(make_psi, x: float, samples: int = 10_000,
                       seed: int = 42) -> dict[str, float]:
    """Max residual of Psi_{-x}(u,v) = conj(Psi_x(u,v)) over pairs."""
    pos, neg = make_psi(x), make_psi(-x)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u, v = pos.sample(rng), pos.sample(rng)
        worst = max(worst, abs(neg.eval(u, v) - pos.eval(u, v).conjugate()))
    return {"max_residual": worst, "samples": samples, "seed": seed}


# ---------------------------------------------------------------------------
# finite-ring analog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinGroupElement:
    """(z, w) over Z_n with z a unit."""

    n: int
    z: int
    w: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("modulus must be >= 2")
        if gcd(self.z % self.n, self.n) != 1:
            raise ValueError(f"z = {self.z} is not a unit mod {self.n}")


class FiniteTriangularGroup:
    """Exact analog of G over Z_n, with full multiplication/inverse tables.

    Elements are enumerated z-major with (1, 0) first, so index 0 is the
    identity.  The law mirrors the matrix product:
    (z1, w1)(z2, w2) = (z1 z2, z1 w2 + w1 z2^{-1}) mod n.
    """

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("modulus must be >= 2")
        self.n = n
        self.units = [z for z in range(1, n) if gcd(z, n) == 1]
        self.elements = [FinGroupElement(n, z, w) for z in self.units for w in range(n)]
        self.index = {(g.z, g.w): i for i, g in enumerate(self.elements)}
        self.order = len(self.elements)
        inv_unit = {z: pow(z, -1, n) for z in self.units}

        size = self.order
        self.mul_table = np.empty((size, size), dtype=np.int64)
        for i, g in enumerate(self.elements):
            for j, h in enumerate(self.elements):
                z = (g.z * h.z) % n
                w = (g.z * h.w + g.w * inv_unit[h.z]) % n
                self.mul_table[i, j] = self.index[(z, w)]
        self.inv_table = np.empty(size, dtype=np.int64)
        for i, g in enumerate(self.elements):
            self.inv_table[i] = self.index[((inv_unit[g.z]), (-g.w) % n)]
        self.identity = self.index[(1, 0)]
        #: indices of the diagonal subgroup K = Z_n^*
        self.k_indices = [self.index[(z, 0)] for z in self.units]

    def mul(self, i: int, j: int) -> int:
        return int(self.mul_table[i, j])

    def inverse(self, i: int) -> int:
        return int(self.inv_table[i])


def finite_group(n: int) -> FiniteTriangularGroup:
    return FiniteTriangularGroup(n)


# ---------------------------------------------------------------------------
# characters of the unit group Z_n^*
# ---------------------------------------------------------------------------


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(pk: int, phi: int) -> int:
    prime_divs = [p for p, _ in _factorize(phi)]
    for g in range(2, pk):
        if gcd(g, pk) != 1:
            continue
        if all(pow(g, phi // p, pk) != 1 for p in prime_divs):
            return g
    raise ArithmeticError(f"no primitive root mod {pk}")


def unit_group_structure(n: int) -> tuple[list[int], list[int]]:
    """Generators and orders with Z_n^* the internal direct product <g_i>.

    Odd prime powers use a primitive root, 2^e (e >= 3) uses {-1, 5}; the
    factors are CRT-lifted to mod n.
    """
    if n == 1:
        return [], []
    gens: list[int] = []
    orders: list[int] = []
    factors = _factorize(n)
    for p, e in factors:
        pk = p ** e
        rest = n // pk
        local: list[tuple[int, int]] = []
        if p == 2:
            if e == 2:
                local = [(3, 2)]
            elif e >= 3:
                local = [(pk - 1, 2), (5, 2 ** (e - 2))]
            # e == 1: trivial unit group
        else:
            phi = pk - pk // p
            local = [(_primitive_root(pk, phi), phi)]
        for g, order in local:
            if rest == 1:
                lifted = g % n
            else:
                # CRT: g mod pk, 1 mod rest
                m1 = pow(rest, -1, pk)
                m2 = pow(pk, -1, rest)
                lifted = (g * rest * m1 + 1 * pk * m2) % n
            gens.append(lifted)
            orders.append(order)
    return gens, orders


@dataclass(frozen=True)
class UnitCharacter:
    """A character of Z_n^* given by exponents against the cyclic factors."""

    n: int
    exponents: tuple[int, ...]
    orders: tuple[int, ...]
    _dlog: dict[int, tuple[int, ...]] = field(hash=False, compare=False, repr=False,
                                              default=None)

    def __call__(self, z: int) -> complex:
        xs = self._dlog[z % self.n]
        phase = sum(2.0 * math.pi * a * x / m
                    for a, x, m in zip(self.exponents, xs, self.orders))
        return cmath.exp(1j * phase)


class UnitDual:
    """All characters of Z_n^*, indexed by exponent tuples."""

    def __init__(self, n: int):
        self.n = n
        self.gens, self.orders = unit_group_structure(n)
        # discrete log table by enumeration of exponent tuples
        dlog: dict[int, tuple[int, ...]] = {}
        shape = self.orders or [1]
        for flat in range(int(np.prod(shape))):
            xs = []
            rem = flat
            for m in self.orders:
                xs.append(rem % m)
                rem //= m
            val = 1
            for g, x in zip(self.gens, xs):
                val = (val * pow(g, x, n)) % n
            dlog[val] = tuple(xs)
        self._dlog = dlog
        self.characters = [
            UnitCharacter(n, self._unflatten(i), tuple(self.orders), dlog)
            for i in range(self.size)
        ]

    @property
    def size(self) -> int:
        out = 1
        for m in self.orders:
            out *= m
        return out

    def _unflatten(self, flat: int) -> tuple[int, ...]:
        xs = []
        rem = flat
        for m in self.orders:
            xs.append(rem % m)
            rem //= m
        return tuple(xs)

    def add(self, i: int, j: int) -> int:
        """Index of the product character chi_i * chi_j."""
        xi, xj = self._unflatten(i), self._unflatten(j)
        xs = [(p + q) % m for p, q, m in zip(xi, xj, self.orders)]
        flat = 0
        mult = 1
        for x, m in zip(xs, self.orders):
            flat += x * mult
            mult *= m
        return flat


@dataclass(frozen=True)
class FiniteBicharacter(Bicharacter):
    """A bicharacter on the dual of Z_n^*, given by a value table.

    ``table[i, j]`` is the value on (chi_i, chi_j) in the :class:`UnitDual`
    enumeration.  :func:`is_bicharacter` tests slotwise multiplicativity.
    """

    dual: UnitDual
    table: np.ndarray
    kind: str = field(default="finite", init=False)

    def eval(self, i: int, j: int) -> complex:
        return complex(self.table[i, j])

    def combine(self, i: int, j: int) -> int:
        return self.dual.add(i, j)

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.dual.size))

    def is_bicharacter(self, tol: float = 1e-12) -> bool:
        m = self.dual.size
        if np.max(np.abs(np.abs(self.table) - 1.0)) > tol:
            return False
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    lhs = self.table[self.dual.add(i, j), k]
                    if abs(lhs - self.table[i, k] * self.table[j, k]) > tol:
                        return False
                    rhs = self.table[k, self.dual.add(i, j)]
                    if abs(rhs - self.table[k, i] * self.table[k, j]) > tol:
                        return False
        return True


def standard_finite_bicharacter(n: int) -> FiniteBicharacter:
    """The product-of-roots-of-unity bicharacter on the dual of Z_n^*.

    On exponent tuples a, b it takes the value prod_v zeta_{m_v}^{a_v b_v};
    for n = 5 the dual is Z_4 and this is exactly i^{ab}.
    """
    dual = UnitDual(n)
    m = dual.size
    table = np.empty((m, m), dtype=complex)
    for i in range(m):
        xi = dual._unflatten(i)
        for j in range(m):
            xj = dual._unflatten(j)
            phase = sum(2.0 * math.pi * p * q / mv
                        for p, q, mv in zip(xi, xj, dual.orders))
            table[i, j] = cmath.exp(1j * phase)
    return FiniteBicharacter(dual, table)


def trivial_finite_bicharacter(n: int) -> FiniteBicharacter:
    dual = UnitDual(n)
    return FiniteBicharacter(dual, np.ones((dual.size, dual.size), dtype=complex))


def corrupted_finite_bicharacter(n: int, phase: float = math.pi / 3) -> FiniteBicharacter:
    """Unit-modulus table that is NOT a bicharacter (negative-control input)."""
    psi = standard_finite_bicharacter(n)
    table = psi.table.copy()
    if psi.dual.size > 1:
        table[1, 1] *= cmath.exp(1j * phase)
    return FiniteBicharacter(psi.dual, table)


# ---------------------------------------------------------------------------
# JSON exchange format
# ---------------------------------------------------------------------------


def group_to_json(group: FiniteTriangularGroup) -> dict:
    return {
        "modulus": group.n,
        "elements": [[g.z, g.w] for g in group.elements],
    }


def bicharacter_to_json(psi: FiniteBicharacter) -> dict:
    return {
        "modulus": psi.dual.n,
        "kind": "finite",
        "table": [[[v.real, v.imag] for v in row] for row in psi.table],
    }


def bicharacter_from_json(doc: dict) -> FiniteBicharacter:
    n = int(doc["modulus"])
    dual = UnitDual(n)
    table = np.array(
        [[complex(re, im) for re, im in row] for row in doc["table"]],
        dtype=complex,
    )
    if table.shape != (dual.size, dual.size):
        raise ValueError(
            f"table shape {table.shape} does not match dual size {dual.size}"
        )
    return FiniteBicharacter(dual, table)
