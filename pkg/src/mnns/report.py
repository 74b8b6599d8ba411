"""Report serialization: canonical JSON plus a flat CSV mirror.

The JSON file is the authoritative record (sorted keys, fixed indent) so a
rerun with the same seed produces byte-identical output apart from the
wall-clock entry. The CSV carries one row per case for spreadsheet use.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Tuple


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, str)):
        return str(value)
    return json.dumps(value, sort_keys=True)


def canonical_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def cases_csv(cases: list) -> str:
    fieldnames = sorted({key for case in cases for key in case})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for case in cases:
        writer.writerow({k: _csv_cell(case.get(k)) for k in fieldnames})
    return buf.getvalue()


def write_report(report: dict, out_dir: str) -> Tuple[str, str]:
    """Write report.json and report.csv under out_dir, creating it."""
    os.makedirs(out_dir, exist_ok=True)
    public = {k: v for k, v in report.items() if not k.startswith("_")}
    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w", encoding="ascii") as fh:
        fh.write(canonical_json(public))
    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write(cases_csv(public.get("cases", [])))
    return json_path, csv_path
