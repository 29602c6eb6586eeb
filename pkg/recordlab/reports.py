"""CSV and JSON serialization of residual reports and simulation summaries.

Floats are written round-trip safe: CSV cells use 17 significant digits,
JSON numbers use Python's shortest repr. NaN and infinities become empty
CSV cells and JSON nulls.
"""

import csv
import io
import json
import math

SCHEMA_VERSION = 1

REPORT_COLUMNS = ["scenario", "n", "k", "r", "u", "v", "lhs", "rhs", "residual", "method",
                  "mc_std_error", "verdict", "identity", "relative_residual", "error"]

SUMMARY_COLUMNS = ["mode", "distribution", "statistic", "index", "count", "mean", "std_error",
                   "reference"]

SAMPLE_COLUMNS = ["mode", "distribution", "replicate", "index", "value", "time"]


def csv_float(value):
    if value is None or not math.isfinite(value):
        return ""
    return format(value, ".17g")


def _csv_cell(value):
    if isinstance(value, float):
        return csv_float(value)
    return "" if value is None else value


def json_float(value):
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _table(columns, records):
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow(record)
    return output.getvalue()


def _row_fields(report, row):
    ctx = row.ctx
    return {
        "scenario": report.scenario,
        "n": ctx.n,
        "k": ctx.k,
        "r": ctx.r,
        "u": ctx.u,
        "v": ctx.v,
        "lhs": row.lhs,
        "rhs": row.rhs,
        "residual": row.residual,
        "method": row.method,
        "mc_std_error": row.mc_std_error,
        "verdict": report.verdict,
        "identity": row.identity,
        "relative_residual": row.relative_residual,
        "error": row.error,
    }


def reports_to_csv(reports):
    """One CSV line per residual row, reports in the order given.

    Args:
        reports (list): ResidualReport objects.

    Returns:
        str: The CSV text with a header line.
    """
    records = []
    for report in reports:
        for row in report.rows:
            fields = _row_fields(report, row)
            records.append([_csv_cell(value) for value in fields.values()])
    return _table(REPORT_COLUMNS, records)


def report_to_dict(report):
    """The JSON form of one report."""
    rows = []
    for row in report.rows:
        fields = _row_fields(report, row)
        del fields["scenario"], fields["verdict"]
        rows.append({key: json_float(value) if isinstance(value, float) else value
                     for key, value in fields.items()})
    return {
        "scenario": report.scenario,
        "expected": report.expected,
        "rows": rows,
        "max_abs_residual": json_float(report.max_abs_residual),
        "verdict": report.verdict,
    }


def reports_to_json(reports, seed):
    """{"schema_version": 1, "seed": seed, "reports": [...]} as indented JSON."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "reports": [report_to_dict(report) for report in reports],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def summaries_to_csv(rows):
    """CSV of simulation SummaryRow objects."""
    records = [[row.mode, row.distribution, row.statistic, row.index, row.count,
                csv_float(row.mean), csv_float(row.std_error), csv_float(row.reference)]
               for row in rows]
    return _table(SUMMARY_COLUMNS, records)


def summaries_to_json(rows, seed):
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "summaries": [{
            "mode": row.mode,
            "distribution": row.distribution,
            "statistic": row.statistic,
            "index": row.index,
            "count": row.count,
            "mean": json_float(row.mean),
            "std_error": json_float(row.std_error),
            "reference": json_float(row.reference),
        } for row in rows],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def samples_to_csv(rows):
    """CSV of simulation SampleRow objects, one line per simulated value."""
    records = [[row.mode, row.distribution, row.replicate, row.index, csv_float(row.value),
                csv_float(row.time)]
               for row in rows]
    return _table(SAMPLE_COLUMNS, records)


def samples_to_json(rows, seed):
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "samples": [{
            "mode": row.mode,
            "distribution": row.distribution,
            "replicate": row.replicate,
            "index": row.index,
            "value": json_float(row.value),
            "time": json_float(row.time),
        } for row in rows],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"
