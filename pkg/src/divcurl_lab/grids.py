"""Uniform node-centered grids on the unit box, sampled fields, and bump test functions.

The domain is fixed to (0,1)^dim with dim in {2, 3}. Fields store one value per
node; arrays are indexed [i1, i2(, i3)] with axis k of the array matching
coordinate axis k+1. All objects are immutable after construction and every
operation here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform discretization of (0,1)^dim with n nodes per axis, spacing h = 1/(n-1)."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"unsupported dimension {self.dim}: expected 2 or 3")
        if self.n < 8:
            raise ValueError(f"grid needs at least 8 nodes per axis, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def num_nodes(self) -> int:
        return self.n**self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Node coordinates along one axis: k*h for k = 0..n-1."""
        return _readonly(np.linspace(0.0, 1.0, self.n))

    @cached_property
    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays X1, X2(, X3), each of shape self.shape."""
        return tuple(_readonly(m) for m in np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Trapezoid-rule weights per node; they sum to exactly 1 up to rounding."""
        w1 = np.ones(self.n)
        w1[0] = w1[-1] = 0.5
        w = w1
        for _ in range(self.dim - 1):
            w = np.multiply.outer(w, w1)
        return _readonly(w * self.h**self.dim)

    def interior_mask(self, depth: int) -> np.ndarray:
        """Boolean node mask excluding `depth` layers at every face."""
        if depth < 0:
            raise ValueError("depth must be >= 0")
        mask = np.zeros(self.shape, dtype=bool)
        if 2 * depth < self.n:
            sl = (slice(depth, self.n - depth),) * self.dim
            mask[sl] = True
        return mask


@dataclass(frozen=True)
class ScalarField:
    """Real values sampled at every node of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = _readonly(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"field shape {v.shape} does not match grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorField:
    """dim scalar components on a shared grid."""

    grid: Grid
    components: tuple[ScalarField, ...]

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise ValueError(f"expected {self.grid.dim} components, got {len(self.components)}")
        for c in self.components:
            _same_grid(c.grid, self.grid)
        object.__setattr__(self, "components", tuple(self.components))

    def __getitem__(self, i: int) -> ScalarField:
        return self.components[i]

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_grid(self.grid, other.grid)
        return VectorField(self.grid, tuple(a - b for a, b in zip(self.components, other.components)))

    def magnitude_squared(self) -> ScalarField:
        return ScalarField(self.grid, sum(c.values**2 for c in self.components))


@dataclass(frozen=True)
class SkewMatrixField:
    """Antisymmetric matrix of scalar fields; only the upper triangle is stored.

    entry(i, j) returns the signed field, entry(i, i) is identically zero, so
    antisymmetry holds exactly at every node by construction.
    """

    grid: Grid
    upper: tuple[ScalarField, ...]  # pairs (i, j) with i < j in lexicographic order

    def __post_init__(self):
        expected = self.grid.dim * (self.grid.dim - 1) // 2
        if len(self.upper) != expected:
            raise ValueError(f"expected {expected} upper-triangle entries, got {len(self.upper)}")
        for e in self.upper:
            _same_grid(e.grid, self.grid)
        object.__setattr__(self, "upper", tuple(self.upper))

    def _upper_index(self, i: int, j: int) -> int:
        # lexicographic position of (i, j), i < j, among dim choose 2 pairs
        d = self.grid.dim
        return sum(d - 1 - k for k in range(i)) + (j - i - 1)

    def entry(self, i: int, j: int) -> ScalarField:
        d = self.grid.dim
        if not (0 <= i < d and 0 <= j < d):
            raise IndexError(f"entry ({i},{j}) out of range for dim {d}")
        if i == j:
            return ScalarField(self.grid, np.zeros(self.grid.shape))
        if i < j:
            return self.upper[self._upper_index(i, j)]
        return ScalarField(self.grid, -self.upper[self._upper_index(j, i)].values)

    def pairs(self):
        """Yield (i, j, entry) for all i < j."""
        d = self.grid.dim
        k = 0
        for i in range(d):
            for j in range(i + 1, d):
                yield i, j, self.upper[k]
                k += 1


def _same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True)
class TestFunction:
    """Smooth bump supported on a closed ball strictly inside the open box.

    value(x) = exp(1 - 1/(1 - s)) with s = |x - center|^2 / radius^2 for s < 1,
    exactly 0 otherwise; the peak value at the center is 1 and the gradient is
    available in closed form.
    """

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) not in (2, 3):
            raise ValueError("bump center must be 2- or 3-dimensional")
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")
        if self.support_margin() <= 0:
            raise ValueError(
                f"bump support ball(center={self.center}, radius={self.radius}) "
                "touches the boundary of the unit box"
            )

    @property
    def dim(self) -> int:
        return len(self.center)

    def support_margin(self) -> float:
        """Distance from the support ball to the boundary of the box."""
        return min(min(c - self.radius, 1.0 - c - self.radius) for c in self.center)

    def _s(self, points: Sequence[np.ndarray]) -> np.ndarray:
        s = sum((np.asarray(p) - c) ** 2 for p, c in zip(points, self.center))
        return s / self.radius**2

    def __call__(self, *points: np.ndarray) -> np.ndarray:
        s = self._s(points)
        inside = s < 1.0
        out = np.zeros_like(s, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    def grad(self, *points: np.ndarray) -> tuple[np.ndarray, ...]:
        """Closed-form gradient: -2 phi(x) (x_k - c_k) / (r^2 (1-s)^2) per axis."""
        s = self._s(points)
        inside = s < 1.0
        phi = np.zeros_like(s, dtype=float)
        fac = np.zeros_like(s, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            phi[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
            fac[inside] = phi[inside] / (1.0 - s[inside]) ** 2
        return tuple(
            -2.0 * fac * (np.asarray(p) - c) / self.radius**2 for p, c in zip(points, self.center)
        )

    def sample(self, grid: Grid) -> ScalarField:
        if grid.dim != self.dim:
            raise ValueError("bump dimension does not match grid dimension")
        return ScalarField(grid, self(*grid.mesh))

    def sample_grad(self, grid: Grid) -> VectorField:
        if grid.dim != self.dim:
            raise ValueError("bump dimension does not match grid dimension")
        comps = self.grad(*grid.mesh)
        return VectorField(grid, tuple(ScalarField(grid, g) for g in comps))


def make_grid(dim: int, n: int) -> Grid:
    """Build the uniform unit-box grid; rejects dim not in {2,3} and n < 8."""
    return Grid(int(dim), int(n))


def bump(center: Sequence[float], radius: float) -> TestFunction:
    """Bump test function whose support ball must sit strictly inside the box."""
    return TestFunction(tuple(center), float(radius))


def sample(fn: Callable, grid: Grid) -> ScalarField | VectorField:
    """Evaluate an analytic function at the nodes.

    `fn` receives the coordinate arrays (X1, X2[, X3]) and returns either one
    array (scalar field) or a sequence of dim arrays (vector field). Scalar
    constants broadcast.
    """
    out = fn(*grid.mesh)
    if isinstance(out, (tuple, list)):
        comps = tuple(ScalarField(grid, np.broadcast_to(np.asarray(c, dtype=float), grid.shape)) for c in out)
        return VectorField(grid, comps)
    return ScalarField(grid, np.broadcast_to(np.asarray(out, dtype=float), grid.shape))


def integrate(f: ScalarField) -> float:
    """Trapezoid-rule approximation of the integral over the box.

    Exact for constants, O(h^2) for C^2 integrands.
    """
    return float(np.sum(f.values * f.grid.quad_weights))


def integrate_masked(f: ScalarField, mask: np.ndarray) -> float:
    """Trapezoid quadrature restricted to nodes where mask is True."""
    return float(np.sum(np.where(mask, f.values, 0.0) * f.grid.quad_weights))


def lp_norm(f: ScalarField | VectorField, p: float) -> float:
    """(integral |f|^p)^(1/p) with trapezoid quadrature; vector fields use the euclidean magnitude."""
    if p < 1:
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    if isinstance(f, VectorField):
        mag2 = f.magnitude_squared().values
        integrand = mag2 if p == 2 else mag2 ** (p / 2.0)
        g = f.grid
    else:
        integrand = np.abs(f.values) ** p
        g = f.grid
    return float(np.sum(integrand * g.quad_weights) ** (1.0 / p))


def dump_field(f: ScalarField | VectorField, path, fmt: str = "csv") -> None:
    """Write a field to disk with axis-1-fastest node order.

    csv: one node per row, columns x1, x2(, x3), value(s).
    bin: raw float64 values, components concatenated for vector fields.
    """
    grid = f.grid
    comps = f.components if isinstance(f, VectorField) else (f,)
    flat_vals = [c.values.flatten(order="F") for c in comps]
    if fmt == "bin":
        np.concatenate(flat_vals).tofile(path)
        return
    if fmt != "csv":
        raise ValueError(f"unknown field dump format {fmt!r}")
    coords = [m.flatten(order="F") for m in grid.mesh]
    header = ",".join([f"x{k + 1}" for k in range(grid.dim)] + [f"v{k + 1}" for k in range(len(comps))])
    data = np.column_stack(coords + flat_vals)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
