"""Oscillatory families, hypothesis diagnostics, product experiments, and the proof trace.

Oscillation scales are locked to the box: every epsilon has the form
1/(2*pi*k) for an integer k, and a 1-periodic profile is realized as
profile(k * x_axis), completing exactly k periods per unit length. Discrete
means are then exact and weak limits are clean profile means. A grid resolves
the schedule only when it provides at least 16 intervals per period
(n >= 16 k + 1); under-resolved requests are rejected, never coarsened.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diffops import curl_matrix, divergence, hessian_entry, partial_derivative
from .grids import Grid, ScalarField, TestFunction, VectorField, bump, lp_norm
from .identity import check_support_margin, pairing_curl, pairing_div
from .poisson import neg_norm_h_minus_1, solve_dirichlet
from .reports import (
    ConvergenceReport,
    ConvergenceSeries,
    HypothesisReport,
    ProofTraceReport,
    fit_rate,
)

HYPOTHESES = ("i", "ii", "iii", "iv")

MIN_INTERVALS_PER_PERIOD = 16


@dataclass(frozen=True)
class Profile:
    """1-periodic scalar profile with a declared mean."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    mean: float


def _sin(t):
    return np.sin(2.0 * np.pi * t)


def _cos(t):
    return np.cos(2.0 * np.pi * t)


BASE_PROFILES = {
    "sin": Profile("sin", _sin, 0.0),
    "cos": Profile("cos", _cos, 0.0),
    "constant": Profile("constant", lambda t: np.ones_like(t), 1.0),
}


def parse_profile(spec: str) -> Profile:
    """Resolve a profile name, optionally with a constant offset: "sin", "2+cos", "affine+sin"."""
    spec = spec.strip()
    if spec in BASE_PROFILES:
        return BASE_PROFILES[spec]
    if "+" in spec:
        head, base_name = spec.split("+", 1)
        base_name = base_name.strip()
        if base_name in BASE_PROFILES:
            offset = 1.0 if head.strip() == "affine" else float(head)
            base = BASE_PROFILES[base_name]
            return Profile(
                name=f"{offset:g}+{base.name}",
                fn=lambda t, _b=base.fn, _c=offset: _c + _b(t),
                mean=offset + base.mean,
            )
    raise ValueError(f"unknown profile {spec!r}; use sin, cos, constant, or '<offset>+<name>'")


def ks_from_epsilons(schedule: Sequence[float]) -> tuple[int, ...]:
    """Map an epsilon schedule to the integer oscillation counts k = 1/(2 pi eps).

    Rejects schedules that are not strictly decreasing or not commensurate
    with the box.
    """
    ks = []
    for eps in schedule:
        if isinstance(eps, (int, np.integer)):
            k = int(eps)
        else:
            if not 0.0 < eps < 1.0:
                raise ValueError(f"epsilon {eps} outside (0, 1)")
            k_real = 1.0 / (2.0 * math.pi * eps)
            k = round(k_real)
            if k < 1 or abs(k_real - k) > 1e-9 * max(1.0, k_real):
                raise ValueError(
                    f"epsilon {eps} is not commensurate: 1/(2 pi eps) = {k_real} is not an integer"
                )
        if k < 1:
            raise ValueError(f"oscillation count must be >= 1, got {k}")
        ks.append(k)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError(f"schedule must be strictly decreasing in epsilon (increasing k), got k={ks}")
    return tuple(ks)


def epsilon_of(k: int) -> float:
    return 1.0 / (2.0 * math.pi * k)


def required_n(k: int) -> int:
    return MIN_INTERVALS_PER_PERIOD * k + 1


@dataclass(frozen=True)
class OscillatoryFamily:
    """Epsilon-indexed vector fields with a declared constant weak limit.

    `declared` carries the claimed status of the four product-convergence
    hypotheses; measurements never trust it (hypothesis_check re-derives the
    status and reports disagreements).
    """

    kind: str
    profile: Profile
    k_schedule: tuple[int, ...]
    limit: tuple[float, ...]
    declared: dict
    oscillation_axis: int
    components_on: tuple[int, ...]
    pair_product_means: tuple[float, ...] | None = None

    @property
    def epsilons(self) -> tuple[float, ...]:
        return tuple(epsilon_of(k) for k in self.k_schedule)

    def check_resolution(self, grid: Grid) -> None:
        k_max = max(self.k_schedule)
        if grid.n < required_n(k_max):
            raise ValueError(
                f"grid n={grid.n} under-resolves k={k_max} oscillations: "
                f"need n >= {required_n(k_max)} for {MIN_INTERVALS_PER_PERIOD} intervals per period"
            )

    def realize(self, k: int, grid: Grid) -> VectorField:
        if grid.dim != 2:
            raise ValueError("oscillatory families are generated in dimension 2")
        if k not in self.k_schedule:
            raise ValueError(f"k={k} is not in the schedule {self.k_schedule}")
        if grid.n < required_n(k):
            raise ValueError(
                f"grid n={grid.n} under-resolves k={k}: need n >= {required_n(k)}"
            )
        coord = grid.mesh[self.oscillation_axis]
        osc = self.profile.fn(k * coord)
        comps = []
        for c in range(grid.dim):
            if c in self.components_on:
                comps.append(ScalarField(grid, osc.copy()))
            else:
                comps.append(ScalarField(grid, np.zeros(grid.shape)))
        return VectorField(grid, tuple(comps))

    def limit_field(self, grid: Grid) -> VectorField:
        return VectorField(
            grid,
            tuple(ScalarField(grid, np.full(grid.shape, c)) for c in self.limit),
        )


def gen_divfree(profile: Profile | str, schedule: Sequence) -> OscillatoryFamily:
    """Family (f(k x2), 0): the divergence vanishes identically by construction.

    The rotation entry is k f'(k x2), so the curl-compactness hypothesis fails
    for any non-constant profile; that is declared up front.
    """
    p = parse_profile(profile) if isinstance(profile, str) else profile
    ks = ks_from_epsilons(schedule)
    constant = p.name == "constant"
    return OscillatoryFamily(
        kind="div_free",
        profile=p,
        k_schedule=ks,
        limit=(p.mean, 0.0),
        declared={"i": True, "ii": True, "iii": True, "iv": constant},
        oscillation_axis=1,
        components_on=(0,),
    )


def gen_curlfree(profile: Profile | str, schedule: Sequence) -> OscillatoryFamily:
    """Family (g(k x1), 0): every rotation entry vanishes identically."""
    p = parse_profile(profile) if isinstance(profile, str) else profile
    ks = ks_from_epsilons(schedule)
    constant = p.name == "constant"
    return OscillatoryFamily(
        kind="curl_free",
        profile=p,
        k_schedule=ks,
        limit=(p.mean, 0.0),
        declared={"i": True, "ii": True, "iii": constant, "iv": True},
        oscillation_axis=0,
        components_on=(0,),
    )


def gen_counterexample(schedule: Sequence) -> tuple[OscillatoryFamily, OscillatoryFamily]:
    """Self-paired oscillation (sin(2 pi k x1), sin(2 pi k x1)).

    Both compactness hypotheses fail symmetrically: the divergence is
    (1/eps) cos(x1/eps) and the rotation entry is its negative, neither of
    which decays in the dual norm. The weak limits are zero while each
    componentwise product sin^2 converges to mean 1/2, so the product limit
    separates from the product of the limits.
    """
    ks = ks_from_epsilons(schedule)
    p = BASE_PROFILES["sin"]
    fam = OscillatoryFamily(
        kind="counterexample",
        profile=p,
        k_schedule=ks,
        limit=(0.0, 0.0),
        declared={"i": True, "ii": True, "iii": False, "iv": False},
        oscillation_axis=0,
        components_on=(0, 1),
        pair_product_means=(0.5, 0.5),
    )
    return fam, fam


DEFAULT_DICTIONARY: tuple[TestFunction, ...] = (
    bump((0.5, 0.5), 0.30),
    bump((0.35, 0.35), 0.20),
    bump((0.65, 0.40), 0.22),
    bump((0.40, 0.65), 0.24),
    bump((0.60, 0.60), 0.26),
)


@dataclass(frozen=True)
class SubBox:
    """Axis-aligned box strictly inside the domain, enclosing a bump's support."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(x) for x in self.lower))
        object.__setattr__(self, "upper", tuple(float(x) for x in self.upper))
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper corners must have equal dimension")
        for lo, hi in zip(self.lower, self.upper):
            if not (0.0 < lo < hi < 1.0):
                raise ValueError(
                    f"subbox [{lo}, {hi}] must sit strictly inside the open unit box"
                )

    def margin_to_boundary(self) -> float:
        return min(min(lo, 1.0 - hi) for lo, hi in zip(self.lower, self.upper))

    def support_margin(self, phi: TestFunction) -> float:
        """Distance from the bump's support ball to this box; negative if it escapes."""
        return min(
            min(c - phi.radius - lo, hi - c - phi.radius)
            for c, lo, hi in zip(phi.center, self.lower, self.upper)
        )

    def require_contains(self, phi: TestFunction) -> None:
        m = self.support_margin(phi)
        if m < 0.0:
            raise ValueError(
                f"bump support escapes the subbox by {-m:.6g}; enlarge the box or shrink the bump"
            )

    def mask(self, grid: Grid) -> np.ndarray:
        m = np.ones(grid.shape, dtype=bool)
        for ax, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            coord = grid.mesh[ax]
            m &= (coord >= lo - 1e-12) & (coord <= hi + 1e-12)
        return m

    @staticmethod
    def around(phi: TestFunction, pad: float = 0.05) -> "SubBox":
        lower = tuple(c - phi.radius - pad for c in phi.center)
        upper = tuple(c + phi.radius + pad for c in phi.center)
        return SubBox(lower, upper)


def _weighted(grid: Grid, integrand: np.ndarray, mask: np.ndarray | None = None) -> float:
    if mask is not None:
        integrand = np.where(mask, integrand, 0.0)
    return float(np.sum(integrand * grid.quad_weights))


def product_test(
    A: OscillatoryFamily,
    B: OscillatoryFamily,
    phi: TestFunction,
    grid: Grid,
    tol: float | None = None,
) -> ConvergenceReport:
    """Track int (a.b) phi across the schedule against the declared-limit product.

    The target integrates the declared limit fields on the same grid, so the
    gaps isolate oscillation behavior from quadrature bias. The verdict
    passes iff the final gap is within tolerance (default 1e-2 * int phi).
    """
    if A.k_schedule != B.k_schedule:
        raise ValueError(f"schedule mismatch: {A.k_schedule} vs {B.k_schedule}")
    A.check_resolution(grid)
    B.check_resolution(grid)
    phi_s = phi.sample(grid).values
    int_phi = _weighted(grid, phi_s)
    if tol is None:
        tol = 1e-2 * abs(int_phi)

    a_lim = A.limit_field(grid)
    b_lim = B.limit_field(grid)
    target = _weighted(
        grid, sum(a_lim[c].values * b_lim[c].values for c in range(grid.dim)) * phi_s
    )
    values = []
    for k in A.k_schedule:
        a = A.realize(k, grid)
        b = B.realize(k, grid)
        values.append(
            _weighted(grid, sum(a[c].values * b[c].values for c in range(grid.dim)) * phi_s)
        )
    eps = A.epsilons
    gaps = tuple(abs(v - target) for v in values)
    series = ConvergenceSeries(
        name="product",
        epsilons=eps,
        values=tuple(values),
        target=target,
        gaps=gaps,
        rate=fit_rate(eps, gaps),
        passed=gaps[-1] <= tol,
    )
    return ConvergenceReport(series=(series,), tolerance=tol, verdict=series.passed)


def hypothesis_check(
    F: OscillatoryFamily,
    dictionary: Sequence[TestFunction],
    p: float,
    grid: Grid,
    weak_tol: float = 1e-3,
    compact_ratio: float = 0.5,
    zero_tol: float = 1e-10,
    solver_tol: float = 1e-10,
    backend: str = "dst",
) -> HypothesisReport:
    """Measure the four hypotheses for one family and compare with its declaration.

    (i)/(ii): bounded L^p norms plus dictionary weak-convergence gaps below
    weak_tol at the finest epsilon. (iii)/(iv): the dual-norm diagnostics of
    the divergence and of each rotation entry must either sit at the
    structural-zero floor or decay below compact_ratio times their first
    value. Failures are reported, never repaired.
    """
    F.check_resolution(grid)
    eps = F.epsilons
    realizations = [F.realize(k, grid) for k in F.k_schedule]
    norms = tuple(lp_norm(w, p) for w in realizations)
    bounded = max(norms) <= 2.0 * max(norms[0], 1e-300)

    limit = F.limit_field(grid)
    weak_series = []
    for d_idx, phi in enumerate(dictionary):
        phi_s = phi.sample(grid).values
        for c in range(grid.dim):
            target = _weighted(grid, limit[c].values * phi_s)
            vals = tuple(_weighted(grid, w[c].values * phi_s) for w in realizations)
            gaps = tuple(abs(v - target) for v in vals)
            weak_series.append(
                ConvergenceSeries(
                    name=f"phi{d_idx}_a{c + 1}",
                    epsilons=eps,
                    values=vals,
                    target=target,
                    gaps=gaps,
                    rate=fit_rate(eps, gaps),
                    passed=gaps[-1] <= weak_tol,
                )
            )
    weak_ok = bool(weak_series) and all(s.passed for s in weak_series)

    def compact_verdict(diags: Sequence[float]) -> bool:
        if diags[-1] <= zero_tol:
            return True
        return diags[-1] <= compact_ratio * diags[0]

    div_lim = divergence(limit)
    div_diags = tuple(
        neg_norm_h_minus_1(divergence(w) - div_lim, tol=solver_tol, backend=backend, p=p).value
        for w in realizations
    )
    div_ok = compact_verdict(div_diags)

    curl_lim = curl_matrix(limit)
    curl_diags = []
    curl_ok = True
    for i in range(grid.dim):
        for j in range(i + 1, grid.dim):
            vals = []
            for w in realizations:
                entry = curl_matrix(w).entry(i, j) - curl_lim.entry(i, j)
                vals.append(neg_norm_h_minus_1(entry, tol=solver_tol, backend=backend, p=p).value)
            curl_diags.append((f"c{i + 1}{j + 1}", tuple(vals)))
            curl_ok = curl_ok and compact_verdict(vals)

    measured = {
        "i": bool(bounded and weak_ok),
        "ii": bool(bounded and weak_ok),
        "iii": bool(div_ok),
        "iv": bool(curl_ok),
    }
    return HypothesisReport(
        kind_name=F.kind,
        p=p,
        epsilons=eps,
        lp_norms=norms,
        weak_gap_series=tuple(weak_series),
        div_diagnostics=div_diags,
        curl_diagnostics=tuple(curl_diags),
        measured=measured,
        declared=dict(F.declared),
        surrogate_dual_norm=(p != 2.0),
    )


TRACE_TERM_NAMES = (
    "pairing_div",
    "gradphi_lap",
    "gradphi_graddiv_v",
    "gradphi_graddiv_u",
    "cross_curl",
    "pairing_curl",
)


def _extrapolate(values: Sequence[float]) -> float:
    """Geometric-tail extrapolation of a schedule-indexed sequence; falls back to the last value."""
    v = list(values)
    if len(v) < 3:
        return v[-1]
    d1 = v[-2] - v[-3]
    d2 = v[-1] - v[-2]
    if d2 == 0.0 or abs(d2) >= abs(d1):
        return v[-1]
    rho = d1 / d2
    if rho <= 1.001:
        return v[-1]
    return v[-1] + d2 / (rho - 1.0)


def proof_trace(
    A: OscillatoryFamily,
    B: OscillatoryFamily,
    phi: TestFunction,
    subbox: SubBox,
    grid: Grid,
    solver_tol: float = 1e-10,
    backend: str = "dst",
) -> ProofTraceReport:
    """Lift each realization pair through zero-boundary solves and decompose the product integral.

    Per epsilon: solve -lap u = a and -lap v = b componentwise, evaluate the
    six pairing/cross terms over the subbox (pairings in by-parts mode),
    record the balance against int (a.b) phi, and measure the interior
    second-difference norms of the lifted solutions on the subbox.
    """
    if A.k_schedule != B.k_schedule:
        raise ValueError(f"schedule mismatch: {A.k_schedule} vs {B.k_schedule}")
    A.check_resolution(grid)
    B.check_resolution(grid)
    subbox.require_contains(phi)
    check_support_margin(phi, grid)

    phi_s = phi.sample(grid).values
    gphi = [g for g in phi.grad(*grid.mesh)]
    mask = subbox.mask(grid)

    lhs_vals = []
    term_vals = {name: [] for name in TRACE_TERM_NAMES}
    balance = []
    rel_balance = []
    norms_u = []
    norms_v = []

    for k in A.k_schedule:
        a = A.realize(k, grid)
        b = B.realize(k, grid)
        u = solve_dirichlet(a, tol=solver_tol, backend=backend).solution
        v = solve_dirichlet(b, tol=solver_tol, backend=backend).solution

        div_u = divergence(u)
        div_v = divergence(v)
        grad_div_u = [partial_derivative(div_u, ax).values for ax in range(grid.dim)]
        grad_div_v = [partial_derivative(div_v, ax).values for ax in range(grid.dim)]
        curl_u = curl_matrix(u)

        lhs = _weighted(grid, sum(a[c].values * b[c].values for c in range(grid.dim)) * phi_s, mask)

        t1 = pairing_div(a, phi, div_v, "by-parts", mask)
        t2 = _weighted(
            grid, sum(b[c].values * gphi[c] for c in range(grid.dim)) * div_u.values, mask
        )
        t3 = _weighted(
            grid, div_u.values * sum(gphi[c] * grad_div_v[c] for c in range(grid.dim)), mask
        )
        t4 = -_weighted(
            grid, div_v.values * sum(gphi[c] * grad_div_u[c] for c in range(grid.dim)), mask
        )
        t5 = 0.0
        for i in range(grid.dim):
            for j in range(grid.dim):
                if i == j:
                    continue
                t5 += _weighted(grid, b[i].values * curl_u.entry(i, j).values * gphi[j], mask)
        t6 = pairing_curl(b, u, phi, "by-parts", mask)

        terms = dict(
            zip(
                TRACE_TERM_NAMES,
                (t1, t2, t3, t4, t5, t6),
            )
        )
        for name, val in terms.items():
            term_vals[name].append(val)
        total = sum(terms.values())
        resid = abs(lhs - total)
        scale = max(abs(lhs), sum(abs(t) for t in terms.values()))
        lhs_vals.append(lhs)
        balance.append(resid)
        rel_balance.append(resid / scale if scale > 0.0 else 0.0)

        norms_u.append(_interior_w22(u, grid, mask))
        norms_v.append(_interior_w22(v, grid, mask))

    targets = {name: _extrapolate(vals) for name, vals in term_vals.items()}
    gaps = {
        name: tuple(abs(v - targets[name]) for v in vals) for name, vals in term_vals.items()
    }
    return ProofTraceReport(
        epsilons=A.epsilons,
        lhs=tuple(lhs_vals),
        terms=tuple((name, tuple(vals)) for name, vals in term_vals.items()),
        balance_residuals=tuple(balance),
        relative_balance=tuple(rel_balance),
        term_targets=tuple((name, targets[name]) for name in TRACE_TERM_NAMES),
        term_gaps=tuple((name, gaps[name]) for name in TRACE_TERM_NAMES),
        interior_norms_u=tuple(norms_u),
        interior_norms_v=tuple(norms_v),
        targets_extrapolated=True,
        n=grid.n,
        subbox=(subbox.lower, subbox.upper),
    )


def _interior_w22(w: VectorField, grid: Grid, mask: np.ndarray) -> float:
    """L^2 norm over the masked region of all second differences of all components."""
    total = 0.0
    for comp in w.components:
        for i in range(grid.dim):
            for j in range(grid.dim):
                d2 = hessian_entry(comp, i, j).values
                total += _weighted(grid, d2 * d2, mask)
    return float(np.sqrt(total))
