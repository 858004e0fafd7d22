"""Finite twisting model: exact lifts, residual brackets, pentagon."""

import numpy as np
import pytest

from qtriag.fintwist import (
    SpanError,
    build_multiplicative_unitary,
    build_omega,
    check_2cocycle,
    coassociativity_residual,
    coeff_norms,
    coproduct,
    group_opnorm,
    haar_invariance,
    load_bicharacter,
    pentagon_residual,
    reference_untwisted_w,
    regular_rep,
    run_suite,
    spectral_projections,
    twist_coproduct,
    twisted_basis_coeffs,
)
from qtriag.grouplab import (
    UnitDual,
    corrupted_finite_bicharacter,
    finite_group,
    standard_finite_bicharacter,
    trivial_finite_bicharacter,
)

GROUP = finite_group(5)
F = regular_rep(GROUP)
DUAL = UnitDual(5)
PSI = standard_finite_bicharacter(5)
OMEGA = build_omega(F, PSI)


class TestRegularRep:
    def test_permutation_matrices(self):
        for g in range(F.dim):
            mat = F.lambda_op(g)
            assert np.array_equal(mat @ mat.T, np.eye(F.dim))
            assert set(np.unique(mat)) <= {0.0, 1.0}

    def test_identity_and_inverses(self):
        assert np.array_equal(F.lambda_op(GROUP.identity), np.eye(F.dim))
        for g in range(F.dim):
            prod = F.lambda_op(g) @ F.lambda_op(GROUP.inverse(g))
            assert np.array_equal(prod, np.eye(F.dim))

    def test_exact_product_table(self):
        for g in [1, 4, 9, 13]:
            for h in [2, 7, 19]:
                lhs = F.lambda_op(g) @ F.lambda_op(h)
                assert np.array_equal(lhs, F.lambda_op(GROUP.mul(g, h)))

    def test_trace_orthogonality(self):
        for g in range(F.dim):
            expected = 1.0 if g == GROUP.identity else 0.0
            assert F.haar(F.lambda_op(g)) == expected


class TestCoefficientAlgebra:
    def test_fourier_inversion_exact(self):
        rng = np.random.default_rng(0)
        c = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
        assert np.abs(F.coeff_from_op(F.op_from_coeff(c)) - c).max() <= 1e-13

    def test_span_error(self):
        off = np.zeros((F.dim, F.dim))
        off[0, 1] = 1.0                      # not translation-invariant
        with pytest.raises(SpanError):
            F.coeff_from_op(off)

    def test_convolution_matches_operator_product(self):
        rng = np.random.default_rng(1)
        c = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
        d = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
        lhs = F.op_from_coeff(F.conv(c, d))
        rhs = F.op_from_coeff(c) @ F.op_from_coeff(d)
        assert np.linalg.norm(lhs - rhs, 2) <= 1e-12 * np.linalg.norm(rhs, 2)

    def test_adjoint_coeff(self):
        rng = np.random.default_rng(2)
        c = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
        lhs = F.op_from_coeff(F.adjoint_coeff(c))
        assert np.linalg.norm(lhs - F.op_from_coeff(c).conj().T, 2) <= 1e-13

    def test_group_opnorm_of_permutation(self):
        c = np.zeros((F.dim, F.dim))
        c[3, 7] = 1.0
        out = group_opnorm(F, c, iters=30)
        assert abs(out["opnorm"] - 1.0) <= 1e-9
        assert out["l2_lower"] <= out["opnorm"] + 1e-9 <= out["l1_upper"] + 2e-9


class TestCoproduct:
    def test_grouplike_on_basis(self):
        for g in [0, 3, 11]:
            lam = F.lambda_op(g)
            delta = coproduct(F, lam)
            assert np.allclose(delta, np.kron(lam, lam), atol=1e-13)

    def test_identity(self):
        assert np.allclose(coproduct(F, np.eye(F.dim)), np.eye(F.dim ** 2),
                           atol=1e-13)

    def test_multiplicative_random_pairs(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(100):
            c1 = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
            c2 = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
            x, y = F.op_from_coeff(c1), F.op_from_coeff(c2)
            lhs = coproduct(F, x @ y)
            rhs = coproduct(F, x) @ coproduct(F, y)
            scale = max(1.0, np.linalg.norm(rhs, 2))
            worst = max(worst, np.linalg.norm(lhs - rhs, 2) / scale)
        assert worst <= 1e-12


class TestProjections:
    def test_resolution_of_identity(self):
        projs = spectral_projections(F, DUAL)
        total = sum(p.mat for p in projs.values())
        assert np.linalg.norm(total - np.eye(F.dim), 2) <= 1e-13

    def test_orthogonal_idempotents(self):
        projs = spectral_projections(F, DUAL)
        for i, p in projs.items():
            assert np.linalg.norm(p.mat @ p.mat - p.mat, 2) <= 1e-13
            assert np.linalg.norm(p.mat - p.mat.conj().T, 2) <= 1e-13
            for j, q in projs.items():
                if i != j:
                    assert np.linalg.norm(p.mat @ q.mat, 2) <= 1e-13

    def test_equal_rank_five(self):
        projs = spectral_projections(F, DUAL)
        ranks = sorted(int(round(np.trace(p.mat).real)) for p in projs.values())
        assert ranks == [5, 5, 5, 5]


class TestOmega:
    def test_trivial_gives_identity(self):
        om = build_omega(F, trivial_finite_bicharacter(5))
        assert np.linalg.norm(om.mat - np.eye(F.dim ** 2), 2) <= 1e-12

    def test_unitary(self):
        assert OMEGA.unitarity_defect() <= 1e-12

    def test_commutes_with_k_grouplikes(self):
        for ki in GROUP.k_indices[:2]:
            for kj in GROUP.k_indices[2:]:
                lk = np.kron(F.lambda_op(ki), F.lambda_op(kj))
                comm = OMEGA.mat @ lk - lk @ OMEGA.mat
                assert np.linalg.norm(comm, 2) <= 1e-12

    def test_validation_rejects_corrupted(self):
        with pytest.raises(ValueError):
            build_omega(F, corrupted_finite_bicharacter(5))

    def test_load_bicharacter_names(self):
        assert load_bicharacter(5, "trivial").is_bicharacter()
        assert load_bicharacter(5, "standard").is_bicharacter()
        with pytest.raises(ValueError):
            load_bicharacter(5, "nope")


class TestCocycleIdentity:
    def test_trivial_residual_zero(self):
        om = build_omega(F, trivial_finite_bicharacter(5))
        assert check_2cocycle(om, iters=20)["opnorm"] == 0.0

    def test_standard_within_tolerance(self):
        out = check_2cocycle(OMEGA, iters=40)
        assert out["l1_upper"] <= 1e-12            # rigorous upper bound
        assert out["opnorm"] <= 1e-12

    def test_corrupted_exceeds_floor(self):
        bad = build_omega(F, corrupted_finite_bicharacter(5), validate=False)
        out = check_2cocycle(bad, iters=40)
        assert out["l2_lower"] > 0.1               # rigorous lower bound
        assert out["opnorm"] > 0.1


class TestTwistedCoproduct:
    def test_trivial_twist_is_plain(self):
        om = build_omega(F, trivial_finite_bicharacter(5))
        for g in [0, 7]:
            lam = F.lambda_op(g)
            assert np.allclose(twist_coproduct(F, lam, om),
                               coproduct(F, lam), atol=1e-12)

    def test_k_elements_stay_grouplike(self):
        for ki in GROUP.k_indices:
            lam = F.lambda_op(ki)
            twisted = twist_coproduct(F, lam, OMEGA)
            assert np.linalg.norm(twisted - np.kron(lam, lam), 2) <= 1e-12

    def test_star_homomorphism_on_samples(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            c1 = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
            c2 = rng.standard_normal(F.dim) + 1j * rng.standard_normal(F.dim)
            x, y = F.op_from_coeff(c1), F.op_from_coeff(c2)
            lhs = twist_coproduct(F, x @ y, OMEGA)
            rhs = twist_coproduct(F, x, OMEGA) @ twist_coproduct(F, y, OMEGA)
            scale = max(1.0, np.linalg.norm(rhs, 2))
            assert np.linalg.norm(lhs - rhs, 2) / scale <= 1e-12
            adj = twist_coproduct(F, x.conj().T, OMEGA)
            assert np.linalg.norm(adj - twist_coproduct(F, x, OMEGA).conj().T,
                                  2) <= 1e-11 * scale

    def test_coassociativity(self):
        out = coassociativity_residual(F, OMEGA, iters=40)
        assert out["l1_upper"] <= 1e-12
        assert out["opnorm"] <= 1e-12

    def test_plain_coassociativity_exact(self):
        out = coassociativity_residual(F, None, iters=10)
        assert out["l1_upper"] == 0.0


class TestHaar:
    def test_basis_cases(self):
        out = haar_invariance(F, OMEGA)
        assert out["haar_left"] <= 1e-12
        assert out["haar_right"] <= 1e-12
        plain = haar_invariance(F, None)
        assert plain["haar_left"] == 0.0 and plain["haar_right"] == 0.0

    def test_partial_trace_oracle(self):
        # independent route: (id x h) as a literal partial trace of the
        # materialized dim^2 matrix
        rng = np.random.default_rng(5)
        n = F.dim
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x = F.op_from_coeff(c)
        dx = twist_coproduct(F, x, OMEGA)
        m4 = dx.reshape(n, n, n, n)
        left = np.einsum("ijkj->ik", m4) / n
        target = F.haar(x) * np.eye(n)
        assert np.linalg.norm(left - target, 2) <= 1e-12 * max(1.0, abs(F.haar(x)))


class TestMultiplicativeUnitary:
    def test_untwisted_is_reference_permutation(self):
        w = build_multiplicative_unitary(F, None)
        assert np.array_equal(w.mat, reference_untwisted_w(F))
        assert w.unitarity_defect() == 0.0

    def test_trivial_twist_same_w(self):
        om = build_omega(F, trivial_finite_bicharacter(5))
        w0 = build_multiplicative_unitary(F, None)
        w1 = build_multiplicative_unitary(F, om)
        assert np.linalg.norm(w1.mat - w0.mat, 2) <= 1e-12

    def test_pentagon_untwisted_exact_zero(self):
        w = build_multiplicative_unitary(F, None)
        assert pentagon_residual(w.mat, iters=20) == 0.0

    def test_pentagon_twisted(self):
        w = build_multiplicative_unitary(F, OMEGA)
        assert w.unitarity_defect() <= 1e-12
        assert pentagon_residual(w.mat, iters=40) <= 1e-10

    def test_pentagon_corrupted_fails_loudly(self):
        bad = build_omega(F, corrupted_finite_bicharacter(5), validate=False)
        w = build_multiplicative_unitary(F, bad)
        assert pentagon_residual(w.mat, iters=40) > 1e-2


class TestSuite:
    def test_full_suite_shape_and_determinism(self):
        out1 = run_suite(n=5, bichar="i^{ab}", seed=42, iters=25)
        out2 = run_suite(n=5, bichar="i^{ab}", seed=42, iters=25)
        assert out1["residuals"] == out2["residuals"]
        expected_names = {
            "omega_unitarity", "cocycle", "coassoc", "haar_left", "haar_right",
            "pentagon", "pentagon_twisted", "control_cocycle_deficit",
            "control_pentagon_deficit",
        }
        assert set(out1["residuals"]) == expected_names
        assert out1["values"]["w_matches_reference_permutation"] is True
