"""Second-order finite-difference operators on grid fields.

All first derivatives use centered stencils in the interior and one-sided
second-order stencils at the box faces. The laplacian is realized as the
divergence of the gradient, i.e. a double application of the centered first
difference per axis. That composition keeps three identities exact (to
rounding) at fully interior nodes, because every operator is then a polynomial
in the same commuting shift operators:

  * divergence(laplacian(w)) == laplacian(divergence(w))
  * divergence(grad_div(w) - laplacian(w)) == 0
  * grad_div(w) == laplacian(w) whenever w is a sampled discrete gradient

A compact per-axis second difference is provided separately for diagnostics;
the Poisson solver owns its own 5/7-point stencil.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Grid, ScalarField, SkewMatrixField, VectorField


@dataclass(frozen=True)
class StencilSpec:
    """Trust bookkeeping for composed stencils.

    depth counts applied derivative layers: results are centered-stencil pure
    at nodes at least `depth` layers away from every face.
    """

    depth: int
    order: int = 2

    def compose(self, other: "StencilSpec") -> "StencilSpec":
        return StencilSpec(self.depth + other.depth, min(self.order, other.order))

    def mask(self, grid: Grid) -> np.ndarray:
        return grid.interior_mask(self.depth)

    def margin(self, grid: Grid) -> float:
        return self.depth * grid.h


GRADIENT_SPEC = StencilSpec(1)
DIVERGENCE_SPEC = StencilSpec(1)
CURL_SPEC = StencilSpec(1)
LAPLACIAN_SPEC = StencilSpec(2)
GRAD_DIV_SPEC = StencilSpec(2)
# deepest composite used by the identity evaluators: divergence(laplacian(.))
IDENTITY_SPEC = StencilSpec(3)


def _d(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    return np.gradient(values, h, axis=axis, edge_order=2)


def partial_derivative(f: ScalarField, axis: int) -> ScalarField:
    """Centered first difference along one axis, one-sided at the two faces."""
    return ScalarField(f.grid, _d(f.values, f.grid.h, axis))


def gradient(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField(g, tuple(partial_derivative(f, k) for k in range(g.dim)))


def divergence(w: VectorField) -> ScalarField:
    g = w.grid
    out = np.zeros(g.shape)
    for k in range(g.dim):
        out += _d(w[k].values, g.h, k)
    return ScalarField(g, out)


def curl_matrix(w: VectorField) -> SkewMatrixField:
    """All rotation entries d w_i / d x_j - d w_j / d x_i for i < j."""
    g = w.grid
    upper = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            upper.append(ScalarField(g, _d(w[i].values, g.h, j) - _d(w[j].values, g.h, i)))
    return SkewMatrixField(g, tuple(upper))


def laplacian(f: ScalarField | VectorField) -> ScalarField | VectorField:
    """Sum over axes of the doubled centered first difference; componentwise for vectors."""
    if isinstance(f, VectorField):
        return VectorField(f.grid, tuple(laplacian(c) for c in f.components))
    g = f.grid
    out = np.zeros(g.shape)
    for k in range(g.dim):
        out += _d(_d(f.values, g.h, k), g.h, k)
    return ScalarField(g, out)


def grad_div(w: VectorField) -> VectorField:
    return gradient(divergence(w))


def second_derivative(f: ScalarField, axis: int) -> ScalarField:
    """Compact second difference (f[i-1] - 2 f[i] + f[i+1]) / h^2, one-sided at faces."""
    v = f.values
    h2 = f.grid.h**2
    out = np.empty_like(v)
    mid = [slice(None)] * v.ndim
    lo = [slice(None)] * v.ndim
    hi = [slice(None)] * v.ndim
    mid[axis], lo[axis], hi[axis] = slice(1, -1), slice(0, -2), slice(2, None)
    out[tuple(mid)] = (v[tuple(lo)] - 2.0 * v[tuple(mid)] + v[tuple(hi)]) / h2

    def face(idx_out, i0, i1, i2, i3):
        sl = [slice(None)] * v.ndim

        def at(i):
            s = list(sl)
            s[axis] = i
            return v[tuple(s)]

        s_out = list(sl)
        s_out[axis] = idx_out
        out[tuple(s_out)] = (2.0 * at(i0) - 5.0 * at(i1) + 4.0 * at(i2) - at(i3)) / h2

    face(0, 0, 1, 2, 3)
    face(-1, -1, -2, -3, -4)
    return ScalarField(f.grid, out)


def hessian_entry(f: ScalarField, i: int, j: int) -> ScalarField:
    """Mixed second derivative d^2 f / dx_i dx_j; compact stencil when i == j."""
    if i == j:
        return second_derivative(f, i)
    return partial_derivative(partial_derivative(f, i), j)
