import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from divcurl_lab.grids import ScalarField, make_grid, sample
from divcurl_lab.poisson import (
    NegNormResult,
    SolveFailure,
    _solve_cg,
    apply_neg_laplacian,
    l2_function_error,
    mms_polynomial,
    mms_study,
    mms_trig,
    neg_norm_h_minus_1,
    solve_dirichlet,
    weak_w1p_limit_check,
)

#  analytic dual norms of sin(m pi x) sin(n pi y): (1/2) / (pi sqrt(m^2 + n^2))
NEG_NORM_11 = 0.11253953951963826
NEG_NORM_23 = 0.044141639081644764


def dense_reference_solution(f_values, n, h):
    """Independent 5-point system assembled sparsely and solved directly."""
    m = n - 2
    I = sp.identity(m, format="csr")
    T = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(m, m), format="csr")
    A = (sp.kron(T, I) + sp.kron(I, T)) / h**2
    b = f_values[1:-1, 1:-1].reshape(-1)
    return spla.spsolve(A.tocsc(), b).reshape(m, m)


class TestSolveDirichlet:
    def test_eigenfunction(self):
        g = make_grid(2, 65)
        f = sample(lambda x, y: 2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y), g)
        sol = solve_dirichlet(f)
        exact = np.sin(np.pi * g.mesh[0]) * np.sin(np.pi * g.mesh[1])
        assert np.abs(sol.solution.values - exact).max() < 2.0 * g.h**2
        center = sol.solution.values[g.n // 2, g.n // 2]
        assert center == pytest.approx(1.0, abs=5e-4)

    def test_zero_rhs(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.zeros_like(x), g)
        for backend in ("dst", "cg"):
            sol = solve_dirichlet(f, backend=backend)
            assert np.all(sol.solution.values == 0.0)

    def test_polynomial_rhs_is_inverted_nodally(self):
        # the 5-point stencil is exact on per-axis quadratics, so the discrete
        # solution reproduces the sampled product polynomial to rounding
        g = make_grid(2, 33)
        u_fn, f_fn = mms_polynomial(2)
        sol = solve_dirichlet(sample(f_fn, g))
        assert np.abs(sol.solution.values - u_fn(*g.mesh)).max() < 1e-12

    def test_boundary_exactly_zero(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.exp(x * y), g)
        for backend in ("dst", "cg"):
            u = solve_dirichlet(f, backend=backend).solution.values
            assert np.all(u[0, :] == 0.0) and np.all(u[-1, :] == 0.0)
            assert np.all(u[:, 0] == 0.0) and np.all(u[:, -1] == 0.0)

    def test_discrete_residual_recorded(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.sin(np.pi * x) * y, g)
        dst = solve_dirichlet(f, backend="dst")
        assert dst.stats.residual < 1e-12
        cg = solve_dirichlet(f, tol=1e-10, backend="cg")
        assert cg.stats.residual <= 1e-10
        assert cg.stats.iterations > 0

    def test_linearity(self):
        g = make_grid(2, 33)
        f1 = sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), g)
        f2 = sample(lambda x, y: x * (1 - x) * y, g)
        a, b = 2.0, -3.0
        combo = ScalarField(g, a * f1.values + b * f2.values)
        lhs = solve_dirichlet(combo).solution.values
        rhs = a * solve_dirichlet(f1).solution.values + b * solve_dirichlet(f2).solution.values
        assert np.abs(lhs - rhs).max() < 1e-11

    def test_maximum_principle_spot_check(self):
        g = make_grid(2, 33)
        rng = np.random.default_rng(4)
        f = ScalarField(g, rng.random(g.shape))
        u = solve_dirichlet(f).solution.values
        assert u.min() >= -1e-12

    def test_vector_rhs_componentwise(self):
        g = make_grid(2, 33)
        w = sample(lambda x, y: (2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y), np.zeros_like(x)), g)
        sol = solve_dirichlet(w)
        u0 = solve_dirichlet(w[0]).solution.values
        assert np.array_equal(sol.solution[0].values, u0)
        assert np.all(sol.solution[1].values == 0.0)

    def test_tol_contract(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.ones_like(x), g)
        with pytest.raises(ValueError):
            solve_dirichlet(f, tol=1e-3)
        with pytest.raises(ValueError):
            solve_dirichlet(f, tol=0.0)

    def test_unknown_backend(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.ones_like(x), g)
        with pytest.raises(ValueError):
            solve_dirichlet(f, backend="multigrid")

    def test_cg_failure_raises_with_stats(self):
        g = make_grid(2, 33)
        b = sample(lambda x, y: np.exp(x * y) + x, g).values[1:-1, 1:-1]
        with pytest.raises(SolveFailure) as exc:
            _solve_cg(b, g.h, tol=1e-14, max_iter=3)
        assert exc.value.iterations == 3
        assert exc.value.residual > 0

    def test_3d_solve(self):
        g = make_grid(3, 17)
        f = sample(
            lambda x, y, z: 3 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y) * np.sin(np.pi * z),
            g,
        )
        sol = solve_dirichlet(f)
        exact = np.sin(np.pi * g.mesh[0]) * np.sin(np.pi * g.mesh[1]) * np.sin(np.pi * g.mesh[2])
        assert np.abs(sol.solution.values - exact).max() < 5.0 * g.h**2


class TestSolverOracles:
    def test_cg_matches_dense_direct_n17(self):
        n = 17
        g = make_grid(2, n)
        f = sample(lambda x, y: np.sin(np.pi * x) * np.sin(2 * np.pi * y) + x * (1 - x) * y, g)
        ref = dense_reference_solution(f.values, n, g.h)
        cg = solve_dirichlet(f, tol=1e-12, backend="cg").solution.values[1:-1, 1:-1]
        rel = np.abs(cg - ref).max() / np.abs(ref).max()
        assert rel <= 1e-8

    def test_cg_matches_dst_n65(self):
        g = make_grid(2, 65)
        f = sample(lambda x, y: np.exp(x) * np.sin(np.pi * y) * y, g)
        u_dst = solve_dirichlet(f, backend="dst").solution.values
        u_cg = solve_dirichlet(f, tol=1e-12, backend="cg").solution.values
        rel = np.abs(u_dst - u_cg).max() / np.abs(u_dst).max()
        assert rel <= 1e-8

    def test_apply_operator_matches_matrix(self):
        n = 12
        g = make_grid(2, n)
        rng = np.random.default_rng(5)
        x = rng.standard_normal((n - 2, n - 2))
        m = n - 2
        I = sp.identity(m, format="csr")
        T = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(m, m), format="csr")
        A = (sp.kron(T, I) + sp.kron(I, T)) / g.h**2
        assert np.allclose(apply_neg_laplacian(x, g.h).reshape(-1), A @ x.reshape(-1), rtol=1e-13)


class TestNegNorm:
    def test_eigenfunction_targets(self):
        g = make_grid(2, 129)
        for (m, n_), target in (((1, 1), NEG_NORM_11), ((2, 3), NEG_NORM_23)):
            f = sample(
                lambda x, y, m=m, n_=n_: np.sin(m * np.pi * x) * np.sin(n_ * np.pi * y), g
            )
            r = neg_norm_h_minus_1(f)
            assert abs(r.value - target) / target < 0.01

    def test_all_low_modes_within_one_percent(self):
        g = make_grid(2, 129)
        for m in (1, 2, 3):
            for n_ in (1, 2, 3):
                f = sample(
                    lambda x, y, m=m, n_=n_: np.sin(m * np.pi * x) * np.sin(n_ * np.pi * y), g
                )
                target = 0.5 / (np.pi * np.sqrt(m**2 + n_**2))
                assert abs(neg_norm_h_minus_1(f).value - target) / target < 0.01

    def test_zero_field(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.zeros_like(x), g)
        assert neg_norm_h_minus_1(f).value == 0.0

    def test_surrogate_flag(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), g)
        assert neg_norm_h_minus_1(f).surrogate is False
        r = neg_norm_h_minus_1(f, p=3.0)
        assert isinstance(r, NegNormResult) and r.surrogate is True


class TestManufacturedSolutions:
    def test_polynomial_order_two(self):
        study = mms_study([33, 65, 129], solution="polynomial")
        assert 1.8 <= study["order"] <= 2.2

    def test_trig_order_two(self):
        study = mms_study([33, 65, 129], solution="trig")
        assert 1.8 <= study["order"] <= 2.2

    def test_cg_backend_order(self):
        study = mms_study([17, 33, 65], solution="trig", backend="cg")
        assert 1.7 <= study["order"] <= 2.3

    def test_l2_function_error_zero_case(self):
        g = make_grid(2, 17)
        z = sample(lambda x, y: np.zeros_like(x), g)
        assert l2_function_error(z, lambda x, y: np.zeros_like(x)) == 0.0

    def test_l2_function_error_against_closed_form(self):
        # interpolant of f(x) = x^2 at cell centers misses by exactly h^2/4 per axis
        g = make_grid(2, 33)
        f = sample(lambda x, y: x**2, g)
        err = l2_function_error(f, lambda x, y: x**2)
        assert err == pytest.approx(g.h**2 / 4.0, rel=1e-12)

    def test_trig_rhs_functions(self):
        u, f = mms_trig(2)
        x = np.array(0.5)
        assert f(x, x) == pytest.approx(2 * np.pi**2 * u(x, x))


class TestWeakLimitCheck:
    def setup_family(self, n=257, ks=(2, 4, 8, 16)):
        from divcurl_lab.lab import gen_divfree

        g = make_grid(2, n)
        fam = gen_divfree("1+sin", list(ks))
        sols = [solve_dirichlet(fam.realize(k, g)) for k in fam.k_schedule]
        lim = solve_dirichlet(fam.limit_field(g))
        return fam, g, sols, lim

    def test_constant_family_exact(self):
        from divcurl_lab.lab import gen_divfree
        from divcurl_lab.grids import bump

        g = make_grid(2, 65)
        fam = gen_divfree("constant", [2, 4])
        sols = [solve_dirichlet(fam.realize(k, g)) for k in fam.k_schedule]
        lim = solve_dirichlet(fam.limit_field(g))
        rep = weak_w1p_limit_check(fam.epsilons, sols, lim, [bump((0.5, 0.5), 0.3)])
        for s in rep.series:
            assert all(gap == 0.0 for gap in s.gaps)
        assert rep.verdict

    def test_oscillation_rates_at_least_one(self):
        from divcurl_lab.grids import bump

        fam, g, sols, lim = self.setup_family()
        rep = weak_w1p_limit_check(
            fam.epsilons, sols, lim, [bump((0.45, 0.4), 0.22)], tol=1e-3
        )
        assert rep.verdict
        for s in rep.series:
            if s.rate is not None:
                assert s.rate >= 1.0

    def test_empty_dictionary(self):
        fam, g, sols, lim = self.setup_family(n=65, ks=(2, 4))
        rep = weak_w1p_limit_check(fam.epsilons, sols, lim, [])
        assert rep.verdict and len(rep.series) == 0

    def test_length_mismatch(self):
        fam, g, sols, lim = self.setup_family(n=65, ks=(2, 4))
        with pytest.raises(ValueError):
            weak_w1p_limit_check(fam.epsilons[:-1], sols, lim, [])
