"""Matplotlib renderings of experiment reports, written alongside the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reports import ConvergenceReport, HypothesisReport, ProofTraceReport

_FIGSIZE = (6.4, 4.2)


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_convergence(report: ConvergenceReport, path, title: str = "gap vs epsilon") -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    floor = 1e-17
    for s in report.series:
        gaps = np.maximum(np.asarray(s.gaps), floor)
        label = s.name if s.rate is None else f"{s.name} (rate {s.rate:.2f})"
        ax.loglog(s.epsilons, gaps, "o-", label=label)
    ax.axhline(report.tolerance, color="gray", ls="--", lw=1, label=f"tol {report.tolerance:.2e}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("|value - target|")
    ax.set_title(title)
    ax.legend(fontsize=8)
    _save(fig, path)


def render_identity_ladder(ladder: list[int], curves: dict[str, list[float]], path) -> None:
    """Residual-vs-h plot with a slope-2 guide; zero residuals are clipped to the floor."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    hs = np.array([1.0 / (n - 1) for n in ladder])
    floor = 1e-17
    top = floor
    for name, residuals in curves.items():
        r = np.maximum(np.asarray(residuals, dtype=float), floor)
        top = max(top, r.max())
        ax.loglog(hs, r, "o-", label=name)
    guide = top * (hs / hs[0]) ** 2
    ax.loglog(hs, guide, "k--", lw=1, label="h^2 guide")
    ax.set_xlabel("h")
    ax.set_ylabel("relative residual")
    ax.set_title("integral-balance residuals under refinement")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_hypotheses(report: HypothesisReport, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0))
    eps = report.epsilons
    axes[0].semilogx(eps, report.lp_norms, "o-")
    axes[0].set_xlabel("epsilon")
    axes[0].set_ylabel(f"L^{report.p:g} norm")
    axes[0].set_title("family norms")
    floor = 1e-17
    axes[1].loglog(eps, np.maximum(report.div_diagnostics, floor), "o-", label="div")
    for name, vals in report.curl_diagnostics:
        axes[1].loglog(eps, np.maximum(vals, floor), "s-", label=f"curl {name}")
    axes[1].set_xlabel("epsilon")
    axes[1].set_ylabel("dual-norm diagnostic")
    axes[1].set_title(f"compactness diagnostics ({report.kind_name})")
    axes[1].legend(fontsize=8)
    _save(fig, path)


def render_trace(report: ProofTraceReport, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0))
    eps = report.epsilons
    axes[0].semilogx(eps, report.lhs, "k*-", label="lhs")
    for name, vals in report.terms:
        axes[0].semilogx(eps, vals, "o-", ms=3, label=name)
    axes[0].set_xlabel("epsilon")
    axes[0].set_ylabel("term value")
    axes[0].set_title("lifted decomposition terms")
    axes[0].legend(fontsize=7)
    axes[1].loglog(eps, np.maximum(report.relative_balance, 1e-17), "o-")
    axes[1].set_xlabel("epsilon")
    axes[1].set_ylabel("relative balance residual")
    axes[1].set_title("per-epsilon balance")
    _save(fig, path)


def render_mms(study: dict, path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    hs = np.asarray(study["hs"])
    errs = np.asarray(study["errors"])
    ax.loglog(hs, errs, "o-", label=f"L2 error (order {study['order']:.2f})")
    ax.loglog(hs, errs[0] * (hs / hs[0]) ** 2, "k--", lw=1, label="h^2 guide")
    ax.set_xlabel("h")
    ax.set_ylabel("L2 error")
    ax.set_title(f"manufactured solution: {study['solution']}")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_negnorm(modes: list, values: list[float], targets: list[float], path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    x = np.arange(len(modes))
    ax.plot(x, values, "o", label="computed")
    ax.plot(x, targets, "x", ms=10, label="analytic")
    ax.set_xticks(x)
    ax.set_xticklabels([f"({m},{n})" for m, n in modes])
    ax.set_xlabel("eigen mode")
    ax.set_ylabel("dual norm")
    ax.set_title("negative-norm eigenfunction check")
    ax.legend(fontsize=8)
    _save(fig, path)
