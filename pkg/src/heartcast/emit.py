"""Report serialization: canonical JSON and the CSV curve bundle.

Both emissions print numbers via ``repr`` (shortest exact round-trip), so
the same run yields identical digits in JSON and CSV and reruns with the
same scenario and seed are byte-identical.
"""

from __future__ import annotations

import json
import os
import re

from .forecast import Report


def report_to_dict(report: Report) -> dict:
    """JSON-ready representation of a report (plain lists and floats)."""

    def series(values) -> list[float]:
        return [float(v) for v in values]

    def curve(option) -> dict:
        out = {
            "kind": option.kind,
            "value": float(option.value),
            "mean": series(option.curve.mean),
            "p10": series(option.curve.p10) if option.curve.p10 is not None else None,
            "p90": series(option.curve.p90) if option.curve.p90 is not None else None,
        }
        return out

    cumulative = report.cumulative
    return {
        "schema_version": report.schema_version,
        "seed": report.seed,
        "grid_months": series(report.grid_months),
        "cumulative": {
            "total": series(cumulative.total),
            "by_group": {k: series(v) for k, v in cumulative.by_group.items()},
            "by_quality": {k: series(v) for k, v in cumulative.by_quality.items()},
            "hazard_by_group": {k: series(v) for k, v in cumulative.hazard_by_group.items()},
            "hazard_by_quality": {k: series(v) for k, v in cumulative.hazard_by_quality.items()},
        },
        "options": [curve(o) for o in report.options],
        "recommendation": {
            "option": report.recommendation.option,
            "margin": float(report.recommendation.margin),
            "note": report.recommendation.note,
        },
        "scores": {
            "selectivity": float(report.scores.selectivity),
            "social_growth": float(report.scores.social_growth),
            "opportunity_1y": float(report.scores.opportunity_1y),
            "opportunity_5y": float(report.scores.opportunity_5y),
            "opportunity_10y": float(report.scores.opportunity_10y),
            "partner_quality_percentile": (
                float(report.scores.partner_quality_percentile)
                if report.scores.partner_quality_percentile is not None
                else None
            ),
        },
        "penalty": {
            "suitor_mean": float(report.penalty.mean),
            "suitor_std": float(report.penalty.std),
            "partner": float(report.penalty.partner) if report.penalty.partner is not None else None,
        },
        "relaxation_logs": {
            group: [{"step": s.step, "action": s.action, "count": s.count} for s in log]
            for group, log in report.relaxation_logs.items()
        },
    }


def report_json_bytes(report: Report) -> bytes:
    return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def write_csv_bundle(report: Report, out_dir: str) -> list[str]:
    """One CSV per curve (t_months,value[,p10,p90]) plus report.json.

    Returns the written file paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    grid = [repr(float(t)) for t in report.grid_months]
    written: list[str] = []

    def write_curve(filename: str, columns: dict[str, list[str]]):
        path = os.path.join(out_dir, filename)
        names = list(columns)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(",".join(["t_months"] + names) + "\n")
            for i, t in enumerate(grid):
                handle.write(",".join([t] + [columns[name][i] for name in names]) + "\n")
        written.append(path)

    def fmt(values) -> list[str]:
        return [repr(float(v)) for v in values]

    write_curve("cumulative_total.csv", {"value": fmt(report.cumulative.total)})
    for group, values in report.cumulative.by_group.items():
        write_curve(f"cumulative_by_group_{_slug(group)}.csv", {"value": fmt(values)})
    for band, values in report.cumulative.by_quality.items():
        write_curve(f"cumulative_by_quality_{_slug(band)}.csv", {"value": fmt(values)})
    for option in report.options:
        columns = {"value": fmt(option.curve.mean)}
        if option.curve.p10 is not None:
            columns["p10"] = fmt(option.curve.p10)
            columns["p90"] = fmt(option.curve.p90)
        write_curve(f"option_{_slug(option.kind)}.csv", columns)

    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "wb") as handle:
        handle.write(report_json_bytes(report))
    written.append(json_path)
    return written
