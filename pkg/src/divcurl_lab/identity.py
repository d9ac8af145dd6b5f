"""Term-by-term evaluation of the Green-Gauss integral balance for vector fields.

For smooth u, v and a bump phi supported away from the boundary, the weighted
product of laplacians decomposes into six boundary-free terms built from
divergences, curls, and the gradient of phi:

    int phi lap(u).lap(v) = - <div lap(u), phi div(v)>
                            - int div(u) grad(phi).lap(v)
                            + int div(u) grad(phi).grad(div(v))
                            - int div(v) grad(phi).grad(div(u))
                            - sum_ij int lap(v)_i curl(u)_ij d_j(phi)
                            - 1/2 sum_ij <curl(lap v)_ij, phi curl(u)_ij>

The bracketed pairings admit two discrete realizations that must agree to
O(h^2):

  * "direct": compose stencils on the left slot and integrate the plain
    product (third-derivative composites, deepest trust requirement).
  * "by-parts": move the outer derivative onto the compactly supported right
    slot, using the analytic gradient of phi plus the discrete derivative of
    the remaining factor. This is the default.

Every integrand carries a factor of phi or grad(phi), so enforcing that the
support of phi keeps a 3h margin from the boundary guarantees no one-sided
stencil value is ever weighted into a result.
"""

from __future__ import annotations

import numpy as np

from .diffops import (
    IDENTITY_SPEC,
    curl_matrix,
    divergence,
    grad_div,
    laplacian,
    partial_derivative,
)
from .grids import Grid, ScalarField, TestFunction, VectorField
from .reports import IdentityReport, ReductionReport

PAIRING_MODES = ("direct", "by-parts")

TERM_NAMES = (
    "pairing_div",
    "gradphi_lap",
    "gradphi_graddiv_v",
    "gradphi_graddiv_u",
    "cross_curl",
    "pairing_curl",
)


def required_margin(grid: Grid) -> float:
    """Support margin needed so the deepest composite stencil stays trusted."""
    return IDENTITY_SPEC.depth * grid.h


def check_support_margin(phi: TestFunction, grid: Grid) -> None:
    need = required_margin(grid)
    have = phi.support_margin()
    if have < need - 1e-12:
        raise ValueError(
            f"test-function support margin {have:.6g} is below the required "
            f"{need:.6g} (3h at n={grid.n}); shrink the radius or refine the grid"
        )


def _quad(grid: Grid, integrand: np.ndarray, mask: np.ndarray | None = None) -> float:
    if mask is not None:
        integrand = np.where(mask, integrand, 0.0)
    return float(np.sum(integrand * grid.quad_weights))


def _grad_of_phi_times(phi_s, gphi, s: ScalarField) -> list[np.ndarray]:
    """Components of grad(phi * s): s grad(phi) analytic + phi * discrete grad(s)."""
    grid = s.grid
    ds = [partial_derivative(s, k).values for k in range(grid.dim)]
    return [s.values * gphi[k] + phi_s * ds[k] for k in range(grid.dim)]


def pairing_div(
    G: VectorField, phi: TestFunction, s: ScalarField, mode: str, mask: np.ndarray | None = None
) -> float:
    """<div G, phi s> realized per mode; s must vanish with phi at the faces."""
    grid = G.grid
    phi_s = phi.sample(grid).values
    if mode == "direct":
        return _quad(grid, divergence(G).values * phi_s * s.values, mask)
    if mode == "by-parts":
        gphi = [g for g in phi.grad(*grid.mesh)]
        grad_phis = _grad_of_phi_times(phi_s, gphi, s)
        return -_quad(grid, sum(G[k].values * grad_phis[k] for k in range(grid.dim)), mask)
    raise ValueError(f"unknown pairing mode {mode!r}")


def pairing_curl(
    G: VectorField, W: VectorField, phi: TestFunction, mode: str, mask: np.ndarray | None = None
) -> float:
    """1/2 sum_ij <curl(G)_ij, phi curl(W)_ij> realized per mode.

    Antisymmetry collapses the half double sum onto the pairs i < j.
    """
    grid = G.grid
    phi_s = phi.sample(grid).values
    cw = curl_matrix(W)
    if mode == "direct":
        cg = curl_matrix(G)
        total = 0.0
        for i, j, e in cg.pairs():
            total += _quad(grid, e.values * phi_s * cw.entry(i, j).values, mask)
        return total
    if mode == "by-parts":
        gphi = [g for g in phi.grad(*grid.mesh)]
        total = 0.0
        for i, j, e in cw.pairs():
            grad_phic = _grad_of_phi_times(phi_s, gphi, e)
            total += _quad(grid, -G[i].values * grad_phic[j] + G[j].values * grad_phic[i], mask)
        return total
    raise ValueError(f"unknown pairing mode {mode!r}")


def _dot(grid: Grid, a: list[np.ndarray] | VectorField, b: list[np.ndarray] | VectorField) -> np.ndarray:
    av = [c.values for c in a.components] if isinstance(a, VectorField) else a
    bv = [c.values for c in b.components] if isinstance(b, VectorField) else b
    return sum(x * y for x, y in zip(av, bv))


def eval_identity(
    u: VectorField, v: VectorField, phi: TestFunction, mode: str = "by-parts"
) -> IdentityReport:
    """Evaluate the full integral balance and return lhs, the six terms, and residuals."""
    grid = u.grid
    if v.grid != grid:
        raise ValueError("u and v must share a grid")
    check_support_margin(phi, grid)
    if mode not in PAIRING_MODES:
        raise ValueError(f"unknown pairing mode {mode!r}")

    phi_s = phi.sample(grid).values
    gphi = [g for g in phi.grad(*grid.mesh)]
    lap_u = laplacian(u)
    lap_v = laplacian(v)
    div_u = divergence(u)
    div_v = divergence(v)
    gd_u = grad_div(u)
    gd_v = grad_div(v)
    curl_u = curl_matrix(u)

    lhs = _quad(grid, phi_s * _dot(grid, lap_u, lap_v))

    t_pairing_div = -pairing_div(lap_u, phi, div_v, mode)
    t_gradphi_lap = -_quad(grid, div_u.values * _dot(grid, gphi, lap_v))
    t_gd_v = _quad(grid, div_u.values * _dot(grid, gphi, gd_v))
    t_gd_u = -_quad(grid, div_v.values * _dot(grid, gphi, gd_u))

    t_cross = 0.0
    for i in range(grid.dim):
        for j in range(grid.dim):
            if i == j:
                continue
            t_cross -= _quad(grid, lap_v[i].values * curl_u.entry(i, j).values * gphi[j])

    t_pairing_curl = -pairing_curl(lap_v, u, phi, mode)

    return IdentityReport(
        label="integral_formula",
        mode=mode,
        n=grid.n,
        dim=grid.dim,
        lhs=lhs,
        terms=(
            ("pairing_div", t_pairing_div),
            ("gradphi_lap", t_gradphi_lap),
            ("gradphi_graddiv_v", t_gd_v),
            ("gradphi_graddiv_u", t_gd_u),
            ("cross_curl", t_cross),
            ("pairing_curl", t_pairing_curl),
        ),
    )


def eval_prelim_identity(
    u: VectorField, v: VectorField, phi: TestFunction, mode: str = "by-parts"
) -> IdentityReport:
    """Evaluate the pairing-expansion step that feeds the full balance.

    lhs collects the two pairings; the right side holds their boundary-free
    expansion. The report reuses the identity shape with lhs vs three terms.
    """
    grid = u.grid
    if v.grid != grid:
        raise ValueError("u and v must share a grid")
    check_support_margin(phi, grid)
    if mode not in PAIRING_MODES:
        raise ValueError(f"unknown pairing mode {mode!r}")

    phi_s = phi.sample(grid).values
    gphi = [g for g in phi.grad(*grid.mesh)]
    lap_u = laplacian(u)
    lap_v = laplacian(v)
    div_v = divergence(v)
    gd_u = grad_div(u)
    curl_u = curl_matrix(u)

    lhs = pairing_div(lap_u, phi, div_v, mode) + pairing_curl(lap_v, u, phi, mode)

    grad_phidv = _grad_of_phi_times(phi_s, gphi, div_v)
    t_lap_grad = -_quad(grid, _dot(grid, lap_u, grad_phidv))

    diff = [gd_u[k].values - lap_u[k].values for k in range(grid.dim)]
    t_divfree_phi = _quad(grid, phi_s * sum(lap_v[k].values * diff[k] for k in range(grid.dim)))

    t_cross = 0.0
    for i in range(grid.dim):
        for j in range(grid.dim):
            if i == j:
                continue
            t_cross -= _quad(grid, lap_v[i].values * curl_u.entry(i, j).values * gphi[j])

    return IdentityReport(
        label="pairing_expansion",
        mode=mode,
        n=grid.n,
        dim=grid.dim,
        lhs=lhs,
        terms=(
            ("lap_grad", t_lap_grad),
            ("divfree_phi", t_divfree_phi),
            ("cross_curl", t_cross),
        ),
    )


def eval_divfree_reduction(u: VectorField, v: VectorField, phi: TestFunction) -> ReductionReport:
    """Check int lap(u).grad(phi div v) == int grad(div u).grad(phi div v).

    The two sides differ by the integral of a divergence-free field against
    the gradient of a compactly supported function, which is reported as the
    residual alongside both values.
    """
    grid = u.grid
    if v.grid != grid:
        raise ValueError("u and v must share a grid")
    check_support_margin(phi, grid)

    phi_s = phi.sample(grid).values
    gphi = [g for g in phi.grad(*grid.mesh)]
    lap_u = laplacian(u)
    gd_u = grad_div(u)
    div_v = divergence(v)
    grad_phidv = _grad_of_phi_times(phi_s, gphi, div_v)

    lap_side = _quad(grid, _dot(grid, lap_u, grad_phidv))
    graddiv_side = _quad(grid, _dot(grid, gd_u, grad_phidv))
    diff = [gd_u[k].values - lap_u[k].values for k in range(grid.dim)]
    divfree_residual = _quad(grid, sum(d * g for d, g in zip(diff, grad_phidv)))

    return ReductionReport(
        n=grid.n,
        dim=grid.dim,
        lap_side=lap_side,
        graddiv_side=graddiv_side,
        divfree_residual=divfree_residual,
    )
