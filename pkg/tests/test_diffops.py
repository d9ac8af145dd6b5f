import numpy as np
import pytest

from divcurl_lab.diffops import (
    GRAD_DIV_SPEC,
    LAPLACIAN_SPEC,
    StencilSpec,
    curl_matrix,
    divergence,
    grad_div,
    gradient,
    hessian_entry,
    laplacian,
    partial_derivative,
    second_derivative,
)
from divcurl_lab.grids import ScalarField, VectorField, make_grid, sample


def rel_max(a, b, mask):
    num = np.abs(a - b)[mask].max()
    den = max(np.abs(b)[mask].max(), 1e-300)
    return num / den


class TestGradient:
    def test_constant(self):
        g = make_grid(2, 17)
        gr = gradient(sample(lambda x, y: np.full_like(x, 2.0), g))
        assert np.all(gr[0].values == 0.0) and np.all(gr[1].values == 0.0)

    def test_linear_exact_everywhere(self):
        g = make_grid(2, 17)
        gr = gradient(sample(lambda x, y: x, g))
        assert np.allclose(gr[0].values, 1.0, atol=1e-13)
        assert np.allclose(gr[1].values, 0.0, atol=1e-13)

    def test_trig_second_order(self):
        errs = []
        for n in (33, 65, 129):
            g = make_grid(2, n)
            gr = gradient(sample(lambda x, y: np.sin(np.pi * x), g))
            exact = np.pi * np.cos(np.pi * g.mesh[0])
            errs.append(np.abs(gr[0].values - exact)[g.interior_mask(1)].max())
        assert errs[-1] < 1e-3
        for e1, e2 in zip(errs, errs[1:]):
            assert 3.5 <= e1 / e2 <= 4.5


class TestDivergence:
    def test_constant_vector(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (np.full_like(x, 1.0), np.full_like(x, 2.0)), g)
        assert np.all(divergence(w).values == 0.0)

    def test_quadratic_exact_interior(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (x**2, y**2), g)
        d = divergence(w)
        exact = 2 * g.mesh[0] + 2 * g.mesh[1]
        m = g.interior_mask(1)
        assert np.abs(d.values - exact)[m].max() < 1e-12

    def test_structurally_divergence_free(self):
        g = make_grid(2, 33)
        w = sample(lambda x, y: (np.sin(2 * np.pi * y), np.zeros_like(x)), g)
        d = divergence(w).values
        assert np.abs(d)[g.interior_mask(1)].max() == 0.0  # centered stencils cancel exactly
        assert np.abs(d).max() <= 1e-13  # one-sided faces leave only rounding


class TestCurlMatrix:
    def test_curl_of_gradient_vanishes(self):
        g = make_grid(2, 33)
        w = gradient(sample(lambda x, y: x * y, g))
        c = curl_matrix(w)
        m = g.interior_mask(2)
        assert np.abs(c.entry(0, 1).values)[m].max() < 1e-12

    def test_rigid_rotation(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (-y, x), g)
        c = curl_matrix(w)
        m = g.interior_mask(1)
        assert np.allclose(c.entry(0, 1).values[m], -2.0, atol=1e-12)

    def test_quadratic_entry(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (y**2, np.zeros_like(x)), g)
        c = curl_matrix(w)
        m = g.interior_mask(1)
        assert np.abs(c.entry(0, 1).values - 2 * g.mesh[1])[m].max() < 1e-12

    def test_antisymmetry_exact_everywhere(self):
        g = make_grid(2, 17)
        rng = np.random.default_rng(3)
        w = VectorField(
            g,
            tuple(ScalarField(g, rng.standard_normal(g.shape)) for _ in range(2)),
        )
        c = curl_matrix(w)
        assert np.all(c.entry(0, 1).values + c.entry(1, 0).values == 0.0)


class TestLaplacian:
    def test_quadratic_exact_interior(self):
        g = make_grid(2, 17)
        f = sample(lambda x, y: x**2, g)
        m = g.interior_mask(LAPLACIAN_SPEC.depth)
        assert np.allclose(laplacian(f).values[m], 2.0, atol=1e-11)

    def test_eigenfunction_second_order(self):
        errs = []
        for n in (33, 65, 129):
            g = make_grid(2, n)
            f = sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), g)
            lap = laplacian(f)
            m = g.interior_mask(2)
            errs.append(np.abs(lap.values + 2 * np.pi**2 * f.values)[m].max())
        for e1, e2 in zip(errs, errs[1:]):
            assert 3.5 <= e1 / e2 <= 4.5

    def test_harmonic_exact_interior(self):
        g = make_grid(2, 17)
        f = sample(lambda x, y: x**2 - y**2, g)
        m = g.interior_mask(2)
        assert np.abs(laplacian(f).values)[m].max() < 1e-11

    def test_vector_componentwise(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (x**2, y**2), g)
        lw = laplacian(w)
        m = g.interior_mask(2)
        assert np.allclose(lw[0].values[m], 2.0, atol=1e-11)
        assert np.allclose(lw[1].values[m], 2.0, atol=1e-11)


class TestGradDiv:
    def test_constant(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (np.full_like(x, 5.0), np.full_like(x, -1.0)), g)
        gd = grad_div(w)
        assert np.abs(gd[0].values).max() < 1e-13
        assert np.abs(gd[1].values).max() < 1e-13

    def test_quadratic_interior(self):
        g = make_grid(2, 17)
        w = sample(lambda x, y: (x**2, y**2), g)
        gd = grad_div(w)
        m = g.interior_mask(GRAD_DIV_SPEC.depth)
        assert np.allclose(gd[0].values[m], 2.0, atol=1e-11)
        assert np.allclose(gd[1].values[m], 2.0, atol=1e-11)

    def test_matches_laplacian_on_gradient_fields(self):
        # for w = grad(psi) the two composites are the same shift polynomial
        g = make_grid(2, 33)
        w = gradient(sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), g))
        gd = grad_div(w)
        lw = laplacian(w)
        m = g.interior_mask(3)
        for k in range(2):
            assert rel_max(gd[k].values, lw[k].values, m) < 1e-12


class TestOperatorIdentities:
    def smooth_field(self, g):
        return sample(
            lambda x, y: (np.exp(x) * np.sin(np.pi * y), np.cos(2 * x + y)), g
        )

    def test_commutation_div_laplacian_exhaustive(self):
        g = make_grid(2, 33)
        w = self.smooth_field(g)
        dl = divergence(laplacian(w)).values
        ld = laplacian(divergence(w)).values
        m = g.interior_mask(3)
        den = np.abs(ld)[m].max()
        assert np.abs(dl - ld)[m].max() / den <= 1e-12

    def test_divfree_combination(self):
        g = make_grid(2, 33)
        w = self.smooth_field(g)
        combo = VectorField(
            g,
            tuple(
                ScalarField(g, grad_div(w)[k].values - laplacian(w)[k].values)
                for k in range(2)
            ),
        )
        d = divergence(combo).values
        m = g.interior_mask(3)
        den = np.abs(divergence(laplacian(w)).values)[m].max()
        assert np.abs(d)[m].max() / den <= 1e-12

    def test_commutation_3d(self):
        g = make_grid(3, 9)
        w = sample(
            lambda x, y, z: (x * y * z, np.sin(x + y), np.cos(z) * y), g
        )
        dl = divergence(laplacian(w)).values
        ld = laplacian(divergence(w)).values
        m = g.interior_mask(3)
        den = max(np.abs(ld)[m].max(), 1e-300)
        assert np.abs(dl - ld)[m].max() / den <= 1e-12


class TestSecondDerivative:
    def test_compact_quadratic_exact_all_nodes(self):
        g = make_grid(2, 17)
        f = sample(lambda x, y: x**2, g)
        d2 = second_derivative(f, 0)
        assert np.allclose(d2.values, 2.0, atol=1e-10)

    def test_mixed_hessian_symmetric(self):
        g = make_grid(2, 33)
        f = sample(lambda x, y: np.sin(x) * np.cos(y), g)
        h01 = hessian_entry(f, 0, 1).values
        h10 = hessian_entry(f, 1, 0).values
        m = g.interior_mask(2)
        assert np.abs(h01 - h10)[m].max() < 1e-12


class TestStencilSpec:
    def test_compose_adds_depth(self):
        assert StencilSpec(1).compose(StencilSpec(2)).depth == 3

    def test_margin(self):
        g = make_grid(2, 129)
        assert StencilSpec(3).margin(g) == pytest.approx(3.0 / 128.0)

    def test_mask_counts(self):
        g = make_grid(2, 9)
        assert StencilSpec(1).mask(g).sum() == 7 * 7


class TestPartialDerivative:
    def test_one_sided_edges_second_order(self):
        # quadratics are differentiated exactly even at the faces
        g = make_grid(2, 17)
        f = sample(lambda x, y: x**2, g)
        d = partial_derivative(f, 0)
        assert np.abs(d.values - 2 * g.mesh[0]).max() < 1e-12
