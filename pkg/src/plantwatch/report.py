"""Rendering of run results: text, delimited output, and figures.

Figures are written next to the report file (same stem, ``.png``
suffixes) so a single ``--report`` path yields the whole bundle.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .detectors import PLACEMENTS
from .harness import CalibrationReport, CatalogReport, RunOutcome
from .simulation import SimResult

PLACEMENT_LABEL = {"plc": "in-PLC", "historian": "at-historian"}


def _verdict(flag: bool) -> str:
    return "detected" if flag else "not-detected"


# -- scenario runs -----------------------------------------------------

def scenario_text(outcome: RunOutcome) -> str:
    sc = outcome.scenario
    lines = [
        f"scenario {sc.scenario_id}: {sc.name}",
        f"  profile={sc.profile} category={sc.category} "
        f"window=[{sc.attack_start}, {sc.attack_end}] horizon={sc.horizon}",
    ]
    for placement in PLACEMENTS:
        expected = outcome.expected[placement]
        got = outcome.verdicts[placement]
        first = outcome.first_alarm(placement)
        where = f" first alarm t={first.tick} {first.name}" if first else ""
        suffix = "" if expected is None else (
            " [ok]" if got == expected else f" [DEVIATION, expected {_verdict(expected)}]")
        lines.append(f"  {PLACEMENT_LABEL[placement]}: {_verdict(got)}{where}{suffix}")
    return "\n".join(lines) + "\n"


def scenario_csv(outcome: RunOutcome) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["scenario", "placement", "expected", "detected",
                     "first_alarm_tick", "first_alarm_name", "deviation"])
    for placement in PLACEMENTS:
        expected = outcome.expected[placement]
        first = outcome.first_alarm(placement)
        writer.writerow([
            outcome.scenario.scenario_id, placement,
            "" if expected is None else int(expected),
            int(outcome.verdicts[placement]),
            first.tick if first else "", first.name if first else "",
            int(placement in outcome.deviations),
        ])
    return buf.getvalue()


# -- catalog runs ------------------------------------------------------

def catalog_text(report: CatalogReport) -> str:
    lines = [f"catalog {report.year}: {len(report.outcomes)} scenarios"]
    for outcome in report.outcomes:
        sc = outcome.scenario
        cells = []
        for placement in PLACEMENTS:
            if outcome.expected[placement] is None:
                continue
            mark = "ok" if placement not in outcome.deviations else "DEVIATION"
            cells.append(f"{PLACEMENT_LABEL[placement]}="
                         f"{_verdict(outcome.verdicts[placement])} [{mark}]")
        lines.append(f"  {sc.scenario_id} {sc.category:<11} {' '.join(cells)}")
    for placement in PLACEMENTS:
        if any(o.expected[placement] is not None for o in report.outcomes):
            lines.append(f"  {PLACEMENT_LABEL[placement]} detection rate: "
                         f"{report.rate(placement):.2f}%")
    lines.append("  per category (percent detected):")
    for cat, row in sorted(report.by_category().items()):
        lines.append(f"    {cat:<11} n={row['total']} in-PLC={row['plc']}% "
                     f"at-historian={row['historian']}%")
    lines.append(f"  deviations: {len(report.deviations)}")
    return "\n".join(lines) + "\n"


def catalog_csv(report: CatalogReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["scenario", "category", "placement", "expected", "detected",
                     "deviation"])
    for outcome in report.outcomes:
        for placement in PLACEMENTS:
            expected = outcome.expected[placement]
            if expected is None:
                continue
            writer.writerow([
                outcome.scenario.scenario_id, outcome.scenario.category, placement,
                int(expected), int(outcome.verdicts[placement]),
                int(placement in outcome.deviations),
            ])
    return buf.getvalue()


# -- calibration -------------------------------------------------------

def calibration_text(cal: CalibrationReport) -> str:
    lines = [f"calibration over {cal.ticks} ticks "
             f"(false alarms: " +
             ", ".join(f"{PLACEMENT_LABEL[p]}={n}" for p, n in cal.false_alarms.items())
             + ")"]
    for tank in sorted(cal.peaks):
        lines.append(f"  {tank}: peak window mean {cal.peaks[tank]:.3f} mm, "
                     f"threshold {cal.thresholds[tank]}, "
                     f"suggested (3x peak) {cal.suggested[tank]}")
    return "\n".join(lines) + "\n"


def calibration_csv(cal: CalibrationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["tank", "peak_window_mean", "threshold", "suggested"])
    for tank in sorted(cal.peaks):
        writer.writerow([tank, f"{cal.peaks[tank]:.6f}",
                         cal.thresholds[tank], cal.suggested[tank]])
    return buf.getvalue()


# -- figures -----------------------------------------------------------

def trace_figures(result: SimResult, report_path: str | Path) -> list[Path]:
    """Tank levels and membrane pressure over the run, alarms marked."""
    stem = Path(report_path).with_suffix("")
    ticks = [row["tick"] for row in result.trace]
    written = []

    fig, ax = plt.subplots(figsize=(10, 5))
    for tank in ("T101", "T301", "T401"):
        ax.plot(ticks, [row["level"][tank] for row in result.trace], label=tank)
    for placement, style in (("plc", "r"), ("historian", "orange")):
        seen = sorted({a.tick for a in result.alarms[placement]})
        if seen:
            ax.plot(seen, [0] * len(seen), "|", color=style,
                    label=f"{PLACEMENT_LABEL[placement]} alarms")
    ax.set_xlabel("tick")
    ax.set_ylabel("level (mm)")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("tank levels")
    path = stem.parent / (stem.name + "-levels.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(10, 3.5))
    ax.plot(ticks, [row["dp"] for row in result.trace], label="DPIT301")
    ax2 = ax.twinx()
    for analyzer in ("AIT202", "AIT503", "AIT504"):
        ax2.plot(ticks, [row["ph"][analyzer] for row in result.trace],
                 alpha=0.6, label=analyzer)
    ax.set_xlabel("tick")
    ax.set_ylabel("dp (bar)")
    ax2.set_ylabel("pH")
    ax.legend(loc="upper left", fontsize=8)
    ax2.legend(loc="upper right", fontsize=8)
    ax.set_title("membrane pressure and analyzers")
    path = stem.parent / (stem.name + "-pressure.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written


def catalog_figure(report: CatalogReport, report_path: str | Path) -> list[Path]:
    stem = Path(report_path).with_suffix("")
    table = sorted(report.by_category().items())
    cats = [cat for cat, _ in table]
    x = range(len(cats))
    fig, ax = plt.subplots(figsize=(10, 4))
    width = 0.38
    ax.bar([i - width / 2 for i in x], [row["plc"] for _, row in table],
           width, label="in-PLC")
    ax.bar([i + width / 2 for i in x], [row["historian"] for _, row in table],
           width, label="at-historian")
    ax.set_xticks(list(x))
    ax.set_xticklabels(cats, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("% detected")
    ax.set_title(f"catalog {report.year} detection by category")
    ax.legend()
    path = stem.parent / (stem.name + "-categories.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return [path]


def calibration_figure(cal: CalibrationReport, report_path: str | Path) -> list[Path]:
    stem = Path(report_path).with_suffix("")
    tanks = sorted(cal.peaks)
    x = range(len(tanks))
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.38
    ax.bar([i - width / 2 for i in x], [cal.peaks[t] for t in tanks],
           width, label="peak nominal window mean")
    ax.bar([i + width / 2 for i in x], [cal.thresholds[t] for t in tanks],
           width, label="threshold")
    ax.set_xticks(list(x))
    ax.set_xticklabels(tanks)
    ax.set_ylabel("mm")
    ax.set_title("balance residuals: nominal peaks vs thresholds")
    ax.legend()
    path = stem.parent / (stem.name + "-residuals.png")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return [path]
