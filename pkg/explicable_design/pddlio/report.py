"""
Result tables. Every configuration gives two rows, one without design and one with the chosen design, the second
carrying the percentage differences to the first.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence
import csv
import io
import math

from explicable_design.configs import report_columns, report_formats
from explicable_design.design.objective import ConfigEvaluation
from explicable_design.utils import require_in_list


@dataclass(frozen=True)
class ReportEntry:

    name: str
    baseline: ConfigEvaluation
    chosen: ConfigEvaluation
    time_secs: float = 0.0


def format_number(value) -> str:
    value = float(value)
    if math.isnan(value):
        return 'n/a'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f"{value:.4f}"


def pct_diff(without, with_design) -> float:
    """
    Relative change in percent, -100 when an infinite value became finite
    """

    without, with_design = float(without), float(with_design)
    if without == with_design:
        return 0.0
    if math.isinf(without):
        return -100.0 if not math.isinf(with_design) else math.nan
    if math.isinf(with_design):
        return math.inf
    if without == 0:
        return math.inf if with_design > without else -math.inf
    return (with_design - without) / abs(without) * 100.0


def report_rows(entries: Iterable[ReportEntry]) -> List[Dict[str, str]]:
    rows = []
    for entry in entries:
        baseline, chosen = entry.baseline, entry.chosen
        rows.append({
            'config': f"{entry.name}:without",
            'design_size': '0',
            'inexplicability': format_number(baseline.expected_ie),
            'plan_cost': format_number(baseline.expected_robot_cost),
            'total_cost': format_number(baseline.objective),
            'pct_diff_inexp': format_number(0),
            'pct_diff_cost': format_number(0),
            'pct_diff_total': format_number(0),
            'time_secs': format_number(entry.time_secs),
        })
        rows.append({
            'config': f"{entry.name}:with",
            'design_size': str(chosen.design_size),
            'inexplicability': format_number(chosen.expected_ie),
            'plan_cost': format_number(chosen.expected_robot_cost),
            'total_cost': format_number(chosen.objective),
            'pct_diff_inexp': format_number(pct_diff(baseline.expected_ie, chosen.expected_ie)),
            'pct_diff_cost': format_number(pct_diff(baseline.expected_robot_cost, chosen.expected_robot_cost)),
            'pct_diff_total': format_number(pct_diff(baseline.objective, chosen.objective)),
            'time_secs': format_number(entry.time_secs),
        })
    return rows


def write_table(rows: Sequence[Dict[str, str]], columns: Sequence[str], fmt: str = 'csv') -> str:
    require_in_list(fmt, report_formats)

    if fmt == 'csv':
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue()

    lines = ['| ' + ' | '.join(columns) + ' |', '|' + '---|' * len(columns)]
    lines += ['| ' + ' | '.join(str(row.get(column, '')) for column in columns) + ' |' for row in rows]
    return '\n'.join(lines) + '\n'


def write_report(entries: Iterable[ReportEntry], fmt: str = 'csv') -> str:
    """
    Render the with/without design comparison of every entry.
    Args:
        entries (iterable): the configurations, each with its baseline and its chosen design evaluation
        fmt (str): 'csv' or 'markdown'
    """
    return write_table(report_rows(entries), report_columns, fmt)
