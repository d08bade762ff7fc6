"""Markdown rendering of sweep, robustness, and case-study results.

Reports contain no timestamps or host details so identical runs produce
byte-identical files.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .case_study import (
    IOS_PHASES,
    RUBRIC_INDICATORS,
    CounterfactualComparison,
    PhaseStats,
    RubricScore,
)
from .stats import StatsSummary, effect_size_label
from .sweep import MonteCarloReport, TargetReport


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def render_target_report(report: TargetReport, grid_size: int,
                         stats: Optional[StatsSummary] = None) -> str:
    lines = [
        "# Behavioral target achievement",
        "",
        f"Configurations: {grid_size}",
        "",
        "| # | Target | Achieved | Rate | Threshold | Status |",
        "|---|--------|----------|------|-----------|--------|",
    ]
    for i, row in enumerate(report.rows, start=1):
        status = "pass" if row["pass"] else "FAIL"
        lines.append(
            f"| {i} | {row['name']} | {row['achieved']} / {row['total']} "
            f"| {_pct(row['rate'])} | >= {_pct(row['threshold'])} | {status} |"
        )
    lines.append("")
    if stats is not None:
        lines += [
            "## Differentiation analysis (high vs low dependency)",
            "",
            f"- mean ratio: {stats.mean:.3f} (sd {stats.sd:.3f})",
            f"- bootstrap 95% CI of the mean ratio: [{stats.ci_lo:.3f}, {stats.ci_hi:.3f}]",
            f"- paired t({stats.df}) = {stats.t_stat:.2f}, p = {stats.p_value:.3g}",
            f"- Cohen's d = {stats.cohens_d:.3f} ({effect_size_label(stats.cohens_d)})",
            f"- Wilcoxon signed-rank vs 1.5 (one-sided): W+ = {stats.wilcoxon_stat:.1f}, "
            f"p = {stats.wilcoxon_p:.3g}",
            "",
        ]
    return "\n".join(lines)


def render_monte_carlo(report: MonteCarloReport) -> str:
    ratios = report.ratios
    lines = [
        "# Robustness under parameter perturbation",
        "",
        "| Metric | Value |",
        "|--------|-------|",
        f"| Trials | {report.n} |",
        f"| Perturbation | +/-{_pct(report.perturb)} |",
        f"| All targets met | {sum(1 for t in report.trials if t.all_targets)} / "
        f"{report.n} ({_pct(report.all_targets_rate)}) |",
        f"| Mean differentiation ratio | {ratios.mean():.3f} |",
        f"| Ratio sd | {ratios.std(ddof=1):.3f} |",
        f"| Minimum ratio | {report.min_ratio:.3f} |",
        f"| Ratio >= 1.5 | {_pct(report.ratio_threshold_rate)} |",
        f"| Trials with clamped parameters | {report.clamped_trials} |",
        "",
    ]
    return "\n".join(lines)


def render_phase_stats(stats: Sequence[PhaseStats], labels: Sequence[str]) -> str:
    header = "| Phase | Quarters | " + " | ".join(
        f"{lab} mean (sd)" for lab in labels
    ) + " |"
    sep = "|" + "---|" * (2 + len(labels))
    lines = ["# Phase statistics", "", header, sep]
    for p in stats:
        cells = " | ".join(
            f"{m:.3f} ({s:.3f})" for m, s in zip(p.means, p.sds)
        )
        lines.append(f"| {p.phase} | {p.start}-{p.end} | {cells} |")
    lines.append("")
    return "\n".join(lines)


def phase_stats_csv(stats: Sequence[PhaseStats], labels: Sequence[str]) -> str:
    lines = ["phase,start,end,actor,mean,sd"]
    for p in stats:
        for lab, m, s in zip(labels, p.means, p.sds):
            lines.append(f"{p.phase},{p.start},{p.end},{lab},{m:.12g},{s:.12g}")
    return "\n".join(lines) + "\n"


def render_rubric(score: RubricScore, phases=IOS_PHASES) -> str:
    ref_total, applicable = RubricScore.reference_total()
    lines = [
        "# Validation rubric",
        "",
        "Automated scoring covers indicators 1, 4, 8, and 10; the remaining",
        "indicators require documentary judgment and are reported with the",
        "reference assessment attached (`ref` columns).  `n/a` marks cells",
        "not applicable to a phase.",
        "",
        "| # | Indicator | " + " | ".join(p.name for p in phases) + " | Auto avg |",
        "|---|-----------|" + "---|" * (len(phases) + 1),
    ]

    def cell(value) -> str:
        return "n/a" if value is None else f"{value:g}"

    for idx, name in enumerate(RUBRIC_INDICATORS, start=1):
        auto_row = score.auto[idx]
        ref_row = score.reference[idx]
        if any(v is not None for v in auto_row):
            cells = " | ".join(cell(v) for v in auto_row)
            avg = score.auto_average(idx)
            lines.append(f"| {idx} | {name} | {cells} | {avg:.2f} |")
        else:
            cells = " | ".join(f"ref {cell(v)}" for v in ref_row)
            lines.append(f"| {idx} | {name} | {cells} | (manual) |")
    lines += [
        "",
        f"Reference assessment total: {ref_total:g} / {applicable:g} applicable points.",
        "",
    ]
    return "\n".join(lines)


def render_counterfactual(cmp: CounterfactualComparison, labels: Sequence[str]) -> str:
    lines = [
        "# Counterfactual comparison",
        "",
        "| Actor | Baseline mean | Counterfactual mean | Uplift |",
        "|-------|---------------|---------------------|--------|",
    ]
    for lab, b, c, u in zip(labels, cmp.base_means, cmp.cf_means, cmp.uplift):
        lines.append(f"| {lab} | {b:.3f} | {c:.3f} | {100 * u:+.1f}% |")
    lines += [
        "",
        f"Minimum bilateral trust over the horizon: {cmp.min_bilateral_trust:.3f}",
        "",
    ]
    return "\n".join(lines)
