"""Truncated operator models: the deformed modular element and the q-torus.

Two independent deformation scales coexist and are deliberately housed in
two models (no relation between them is asserted beyond their definitions):

* :class:`ModularModel` carries the modular element delta with spectrum
  q_x^Z for q_x = e^{-2x}, via the Fourier picture where translation by a
  unit-circle element acts on winding mode n as a phase, making delta the
  diagonal q_x^n on modes n in [-N, N].  The accumulation point 0 of the
  full spectrum is witnessed by the strict decrease of the smallest
  truncated eigenvalue as N grows, never by a literal zero eigenvalue.

* :class:`TruncModel` realizes the deformed generators on the lattice
  e_{j,k} (|j|,|k| <= N) as weighted shifts: phases shift, moduli multiply
  by e^{4xj} / e^{4xk}, and a = Ph_a M_a, b = Ph_b M_b obey the q = e^{8x}
  commutation relations on the interior.  Truncation uses an annihilating
  (open) boundary: wraparound would break the modulus relations because
  e^{4xj} is not periodic, so relation residuals are asserted on vectors
  supported at distance >= depth from the boundary and the boundary layer
  is reported separately (nonzero is expected there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .coeffs import Scalar
from .ncpoly import NCExpr, normal_form
from .qgroup import build_polar, build_qtriag, q_ladder_engine


def q_x(x: float) -> float:
    """The modular spectral ratio e^{-2x}, evaluated through the exact ring."""
    return Scalar.s_power(-2).evaluate(x).real


def q_double(x: float) -> float:
    """The commutation constant q = e^{8x}."""
    return Scalar.s_power(8).evaluate(x).real


# ---------------------------------------------------------------------------
# modular element
# ---------------------------------------------------------------------------


@dataclass
class ModularModel:
    """Diagonal model of the deformed weight data on modes n in [-N, N]."""

    x: float
    trunc: int
    modes: np.ndarray = field(init=False)
    delta: np.ndarray = field(init=False)
    a_op: np.ndarray = field(init=False)
    b_op: np.ndarray = field(init=False)

    def __post_init__(self):
        self.modes = np.arange(-self.trunc, self.trunc + 1)
        self.delta = np.exp(-2.0 * self.x * self.modes)
        self.a_op = np.exp(self.x * self.modes)
        self.b_op = np.exp(-self.x * self.modes)

    def delta_matrix(self) -> np.ndarray:
        return np.diag(self.delta)


def build_modular(x: float, trunc: int) -> ModularModel:
    if trunc < 1:
        raise ValueError("truncation radius must be >= 1")
    return ModularModel(x, trunc)


def spectrum_report(model: ModularModel,
                    sweep: tuple[int, ...] = (10, 25, 50)) -> dict:
    """Eigenvalues of the truncated delta against the geometric law.

    Measures the spectrum through an eigensolver on the materialized matrix
    (rather than reading the diagonal), compares with q_x^n, checks the
    consecutive-ratio law, and reports the minimum eigenvalue across the
    truncation sweep as the witness that 0 is an accumulation point.
    """
    x = model.x
    qx = q_x(x)
    eigs = np.linalg.eigvalsh(model.delta_matrix())[::-1]   # descending
    expected = np.sort(np.exp(-2.0 * x * model.modes))[::-1]
    eig_rel_err = float(np.max(np.abs(eigs - expected) / expected))

    ratios = eigs[1:] / eigs[:-1]
    ratio_rel_err = float(np.max(np.abs(ratios - qx)) / qx) if len(ratios) else 0.0

    minima = {}
    for n in sweep:
        m = build_modular(x, n)
        minima[n] = float(np.min(np.linalg.eigvalsh(m.delta_matrix())))
    sweep_sorted = sorted(minima)
    if x > 0:
        monotone_violations = sum(
            1 for lo, hi in zip(sweep_sorted, sweep_sorted[1:])
            if not minima[hi] < minima[lo]
        )
    else:
        monotone_violations = 0

    distinct = np.unique(np.round(eigs, 15))
    return {
        "spectrum": [float(v) for v in eigs],
        "ratio": qx,
        "eigenvalue_rel_error": eig_rel_err,
        "ratio_rel_error": ratio_rel_err,
        "min_eigenvalue": float(eigs[-1]),
        "distinct_eigenvalues": int(len(distinct)),
        "sweep_minima": {str(k): v for k, v in minima.items()},
        "monotone_violations": monotone_violations,
    }


# ---------------------------------------------------------------------------
# q-torus truncation
# ---------------------------------------------------------------------------


@dataclass
class TruncModel:
    """Weighted-shift realization of the deformed generators on a square lattice."""

    x: float
    trunc: int
    ops: dict[str, sp.csr_matrix] = field(init=False)

    def __post_init__(self):
        n = self.trunc
        side = 2 * n + 1
        eye = sp.identity(side, format="csr")
        shift_down = sp.csr_matrix(
            (np.ones(side - 1), (np.arange(side - 1), np.arange(1, side))),
            shape=(side, side),
        )  # e_i -> e_{i-1}, annihilating the lowest mode
        j_weights = sp.diags(np.exp(4.0 * self.x * np.arange(-n, n + 1)))
        k_weights = sp.diags(np.exp(4.0 * self.x * np.arange(-n, n + 1)))

        pha = sp.kron(eye, shift_down, format="csr")     # e_{j,k} -> e_{j,k-1}
        phb = sp.kron(shift_down, eye, format="csr")     # e_{j,k} -> e_{j-1,k}
        ma = sp.kron(j_weights, eye, format="csr")       # e^{4xj}
        mb = sp.kron(eye, k_weights, format="csr")       # e^{4xk}
        a = (pha @ ma).tocsr()
        b = (phb @ mb).tocsr()
        self.ops = {
            "Pha": pha, "Phb": phb, "Ma": ma, "Mb": mb,
            "a": a, "b": b,
            "as": a.conj().T.tocsr(), "bs": b.conj().T.tocsr(),
            "Pha*": pha.conj().T.tocsr(), "Phb*": phb.conj().T.tocsr(),
        }

    @property
    def dim(self) -> int:
        return (2 * self.trunc + 1) ** 2

    def interior_mask(self, depth: int) -> np.ndarray:
        n = self.trunc
        side = 2 * n + 1
        coords = np.arange(-n, n + 1)
        jj, kk = np.meshgrid(coords, coords, indexing="ij")
        return ((np.abs(jj) <= n - depth) & (np.abs(kk) <= n - depth)).reshape(side * side)

    def word_op(self, word: list[str]) -> sp.csr_matrix:
        acc = sp.identity(self.dim, format="csr")
        for name in word:
            acc = (acc @ self.ops[name]).tocsr()
        return acc


def build_qtorus(x: float, trunc: int) -> TruncModel:
    if trunc < 2:
        raise ValueError("truncation radius must be >= 2")
    return TruncModel(x, trunc)


def model_relations(x: float) -> list[tuple[str, list[str], list[str], complex]]:
    """Relations to test, as (label, lhs word, rhs word, rhs scalar).

    The scalars come from the symbolic presentations evaluated at s = e^x,
    so the numerics are checked against the rewrite engine's constants, not
    against an independently typed formula.
    """
    out = []
    qt = build_qtriag()
    for (hi, lo), c in qt.base._comm.items():
        out.append((f"{hi}.{lo}", [hi, lo], [lo, hi], c.evaluate(x)))
    polar = build_polar()
    for (hi, lo), c in polar.base._comm.items():
        out.append((f"{hi}.{lo}", [hi, lo], [lo, hi], c.evaluate(x)))
    e4x = Scalar.s_power(4).evaluate(x)
    out.append(("Pha.Mb.Pha*", ["Pha", "Mb", "Pha*"], ["Mb"], e4x))
    out.append(("Phb.Ma.Phb*", ["Phb", "Ma", "Phb*"], ["Ma"], e4x))
    return out


def relation_residuals(model: TruncModel, depth: int = 3) -> dict:
    """Columnwise relative residuals of every relation, interior vs boundary.

    For each relation L = c R the residual operator L - cR is applied to all
    basis vectors at once and normalized per column by
    max(1, |L e|, |c R e|): the modulus weights reach e^{4xN} at the lattice
    edge, so one ulp of rounding in c * (R e) already exceeds any absolute
    tolerance while the relation itself holds to machine precision.
    Interior columns (support at lattice distance >= depth from the
    boundary) must vanish to 1e-12 in this relative sense; boundary columns
    are reported, not failed.
    """
    if depth > model.trunc - 1:
        raise ValueError("depth exceeds truncation radius")
    interior = model.interior_mask(depth)
    interior_res: dict[str, float] = {}
    boundary_res: dict[str, float] = {}
    for label, lhs, rhs, scalar in model_relations(model.x):
        left = model.word_op(lhs)
        right = scalar * model.word_op(rhs)
        residual = left - right

        def col_norms(mat):
            return np.sqrt(np.abs(np.asarray(mat.power(2).sum(axis=0)).ravel()))

        scale = np.maximum(1.0, np.maximum(col_norms(left), col_norms(right)))
        rel = col_norms(residual) / scale
        interior_res[label] = float(rel[interior].max())
        outside = rel[~interior]
        boundary_res[label] = float(outside.max()) if outside.size else 0.0
    return {"interior": interior_res, "boundary": boundary_res, "depth": depth}


def cross_validation(model: TruncModel, max_power: int = 3) -> dict:
    """Engine coefficients q^{mn} against measured reordering amplitudes.

    a^m (b*)^n maps a central basis vector to a single lattice site, so the
    reordering coefficient is measured as the amplitude ratio
    <y, u>/<y, y> with u = a^m (b*)^n v and y = (b*)^n a^m v (the literal
    diagonal matrix element would vanish for these pure shifts).  The
    symbolic side is the normal-ordering coefficient evaluated at s = e^x.
    """
    n = model.trunc
    center = (n) * (2 * n + 1) + n   # index of e_{0,0}
    v = np.zeros(model.dim)
    v[center] = 1.0
    worst = 0.0
    table = {}
    for m in range(1, max_power + 1):
        for k in range(1, max_power + 1):
            u = v.copy()
            for _ in range(k):
                u = model.ops["bs"] @ u
            for _ in range(m):
                u = model.ops["a"] @ u
            y = v.copy()
            for _ in range(m):
                y = model.ops["a"] @ y
            for _ in range(k):
                y = model.ops["bs"] @ y
            denom = np.vdot(y, y)
            measured = complex(np.vdot(y, u) / denom)
            symbolic = q_ladder_engine(m, k).evaluate(model.x)
            rel = abs(measured - symbolic) / abs(symbolic)
            table[f"m{m}n{k}"] = {
                "measured": measured.real,
                "symbolic": symbolic.real,
                "rel_error": rel,
            }
            worst = max(worst, rel)
    return {"max_rel_error": worst, "table": table}


# ---------------------------------------------------------------------------
# the spectral invariant
# ---------------------------------------------------------------------------


def nonisomorphism_witness(x: float, y: float,
                           rel_tol: float = 1e-12,
                           warn_below: float = 1e-9) -> dict:
    """Compare the geometric spectral ratios q_x vs q_y.

    Distinct ratios force distinct spectra q^Z (both ratios lie in (0, 1)
    for positive parameters), hence non-isomorphic deformations.  Equality
    is declared below ``rel_tol`` relative separation; a warning flags
    separations under ``warn_below`` where floating point is doing the
    deciding.
    """
    if x <= 0 or y <= 0:
        raise ValueError("witness requires strictly positive parameters")
    qx, qy = q_x(x), q_x(y)
    gap = abs(qx - qy) / max(qx, qy)
    distinct = gap > rel_tol
    return {
        "q_x": qx,
        "q_y": qy,
        "relative_gap": gap,
        "verdict": "distinct" if distinct else "equal",
        "close_call_warning": bool(0.0 < gap < warn_below),
    }
