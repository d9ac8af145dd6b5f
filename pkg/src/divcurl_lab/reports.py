"""Structured experiment reports and their JSON/CSV serialization.

Every report serializes deterministically: fixed key order, repr-level float
formatting, no timestamps. CSV files start with a schema comment line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

SCHEMA_VERSION = 1


def fit_rate(epsilons: Sequence[float], gaps: Sequence[float]) -> float | None:
    """Least-squares slope of log(gap) against log(eps), ignoring zero gaps.

    Returns None when fewer than two usable points remain.
    """
    e, g = [], []
    for eps, gap in zip(epsilons, gaps):
        if gap > 0.0:
            e.append(np.log(eps))
            g.append(np.log(gap))
    if len(e) < 2:
        return None
    return float(np.polyfit(e, g, 1)[0])


@dataclass(frozen=True)
class ConvergenceSeries:
    """One tracked quantity across the epsilon schedule."""

    name: str
    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    target: float
    gaps: tuple[float, ...]
    rate: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "epsilons": list(self.epsilons),
            "values": list(self.values),
            "target": self.target,
            "gaps": list(self.gaps),
            "rate": self.rate,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    series: tuple[ConvergenceSeries, ...]
    tolerance: float
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "convergence",
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "series": [s.to_dict() for s in self.series],
        }

    def csv_rows(self):
        header = ["series", "epsilon", "value", "target", "gap"]
        rows = []
        for s in self.series:
            for eps, v, g in zip(s.epsilons, s.values, s.gaps):
                rows.append([s.name, eps, v, s.target, g])
        return header, rows


@dataclass(frozen=True)
class IdentityReport:
    """One evaluation of an integral balance: lhs against named signed terms."""

    label: str
    mode: str
    n: int
    dim: int
    lhs: float
    terms: tuple[tuple[str, float], ...]
    extras: tuple[tuple[str, float], ...] = ()

    @property
    def rhs_sum(self) -> float:
        return float(sum(v for _, v in self.terms))

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs_sum)

    @property
    def scale(self) -> float:
        return max(abs(self.lhs), sum(abs(v) for _, v in self.terms))

    @property
    def relative_residual(self) -> float:
        s = self.scale
        return self.residual / s if s > 0.0 else 0.0

    def term(self, name: str) -> float:
        for k, v in self.terms:
            if k == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "kind": "identity",
            "label": self.label,
            "mode": self.mode,
            "n": self.n,
            "dim": self.dim,
            "lhs": self.lhs,
        }
        d["terms"] = {k: v for k, v in self.terms}
        d.update(
            rhs_sum=self.rhs_sum,
            residual=self.residual,
            relative_residual=self.relative_residual,
        )
        if self.extras:
            d["extras"] = {k: v for k, v in self.extras}
        return d


@dataclass(frozen=True)
class ReductionReport:
    """Agreement of the two realizations of the lifted pairing integral."""

    n: int
    dim: int
    lap_side: float
    graddiv_side: float
    divfree_residual: float

    @property
    def discrepancy(self) -> float:
        return abs(self.lap_side - self.graddiv_side)

    @property
    def relative_discrepancy(self) -> float:
        s = max(abs(self.lap_side), abs(self.graddiv_side))
        return self.discrepancy / s if s > 0.0 else 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "divfree_reduction",
            "n": self.n,
            "dim": self.dim,
            "lap_side": self.lap_side,
            "graddiv_side": self.graddiv_side,
            "divfree_residual": self.divfree_residual,
            "discrepancy": self.discrepancy,
            "relative_discrepancy": self.relative_discrepancy,
        }


@dataclass(frozen=True)
class HypothesisReport:
    """Measured status of the four product-convergence hypotheses for one family."""

    kind_name: str
    p: float
    epsilons: tuple[float, ...]
    lp_norms: tuple[float, ...]
    weak_gap_series: tuple[ConvergenceSeries, ...]
    div_diagnostics: tuple[float, ...]
    curl_diagnostics: tuple[tuple[str, tuple[float, ...]], ...]
    measured: dict
    declared: dict
    surrogate_dual_norm: bool

    @property
    def agrees_with_declaration(self) -> bool:
        return all(self.measured[k] == self.declared[k] for k in self.declared)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "hypotheses",
            "family": self.kind_name,
            "p": self.p,
            "h_minus_1_surrogate_for_p_ne_2": self.surrogate_dual_norm,
            "epsilons": list(self.epsilons),
            "lp_norms": list(self.lp_norms),
            "weak_gaps": [s.to_dict() for s in self.weak_gap_series],
            "div_h_minus_1": list(self.div_diagnostics),
            "curl_h_minus_1": {name: list(vals) for name, vals in self.curl_diagnostics},
            "measured": dict(self.measured),
            "declared": dict(self.declared),
            "agrees_with_declaration": self.agrees_with_declaration,
        }

    def csv_rows(self):
        header = ["epsilon", "lp_norm", "div_h_minus_1"] + [name for name, _ in self.curl_diagnostics]
        rows = []
        for i, eps in enumerate(self.epsilons):
            row = [eps, self.lp_norms[i], self.div_diagnostics[i]]
            row += [vals[i] for _, vals in self.curl_diagnostics]
            rows.append(row)
        return header, rows


@dataclass(frozen=True)
class ProofTraceReport:
    """Per-epsilon decomposition of the lifted product integral into its six terms."""

    epsilons: tuple[float, ...]
    lhs: tuple[float, ...]
    terms: tuple[tuple[str, tuple[float, ...]], ...]
    balance_residuals: tuple[float, ...]
    relative_balance: tuple[float, ...]
    term_targets: tuple[tuple[str, float], ...]
    term_gaps: tuple[tuple[str, tuple[float, ...]], ...]
    interior_norms_u: tuple[float, ...]
    interior_norms_v: tuple[float, ...]
    targets_extrapolated: bool
    n: int
    subbox: tuple[tuple[float, ...], tuple[float, ...]]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "proof_trace",
            "n": self.n,
            "subbox": {"lower": list(self.subbox[0]), "upper": list(self.subbox[1])},
            "epsilons": list(self.epsilons),
            "lhs": list(self.lhs),
            "terms": {name: list(vals) for name, vals in self.terms},
            "balance_residuals": list(self.balance_residuals),
            "relative_balance": list(self.relative_balance),
            "term_targets": {name: val for name, val in self.term_targets},
            "targets_extrapolated": self.targets_extrapolated,
            "term_gaps": {name: list(vals) for name, vals in self.term_gaps},
            "interior_w22_u": list(self.interior_norms_u),
            "interior_w22_v": list(self.interior_norms_v),
        }

    def csv_rows(self):
        header = (
            ["epsilon", "lhs"]
            + [name for name, _ in self.terms]
            + ["balance_residual", "relative_balance", "interior_w22_u", "interior_w22_v"]
        )
        rows = []
        for i, eps in enumerate(self.epsilons):
            row = [eps, self.lhs[i]]
            row += [vals[i] for _, vals in self.terms]
            row += [
                self.balance_residuals[i],
                self.relative_balance[i],
                self.interior_norms_u[i],
                self.interior_norms_v[i],
            ]
            rows.append(row)
        return header, rows


def dump_json(payload: Mapping, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def dump_csv(header: Sequence[str], rows: Sequence[Sequence], path, meta: str = "") -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}" + (f" {meta}" if meta else "") + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")


def _cell(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    return str(x)
