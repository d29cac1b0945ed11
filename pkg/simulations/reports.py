"""Rendering of experiment reports as JSON, CSV or gnuplot data blocks."""
import io
import logging
from typing import Dict, List, Optional

import pandas as pd
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from copulas.exceptions import UnsupportedFormat

from .harness import ExperimentReport, ReportRow
from .serializers import ExperimentReportSerializer

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'gnuplot')

REPORT_COLUMNS = [
    'design_id', 'mode', 'n', 'scenario', 'replications', 'hits', 'rate',
    'standard_error', 'alpha', 'd1_fraction', 's1_fraction', 'mean_statistic',
    'ks_distance', 'mean_clusters',
]

# Rates and standard errors print with 4 decimals, other reals with 6
RATE_COLUMNS = ('rate', 'standard_error')
REAL_COLUMNS = ('alpha', 'd1_fraction', 's1_fraction', 'mean_statistic', 'ks_distance', 'mean_clusters')


def _format_real(value: Optional[float], decimals: int) -> str:
    if value is None:
        return ''
    return f'{value:.{decimals}f}'


def report_records(report: ExperimentReport) -> List[Dict[str, str]]:
    """One flat record per row, every cell already formatted."""
    records = []
    for row in report.rows:
        record = {
            'design_id': report.design_id,
            'mode': report.mode,
            'n': row.n,
            'scenario': row.scenario,
            'replications': str(row.replications),
            'hits': str(row.hits),
        }
        record.update({column: _format_real(getattr(row, column), 4) for column in RATE_COLUMNS})
        record.update({column: _format_real(getattr(row, column), 6) for column in REAL_COLUMNS})
        records.append(record)
    return records


def _emit_csv(report: ExperimentReport) -> bytes:
    frame = pd.DataFrame(report_records(report), columns=REPORT_COLUMNS)
    return frame.to_csv(index=False, lineterminator='\n').encode('utf-8')


def _emit_gnuplot(report: ExperimentReport) -> bytes:
    """One data block per scenario, blocks separated by two blank lines (gnuplot `index`)."""
    lines = [f'# design {report.design_id} ({report.mode}), seed {report.seed}, {report.n_replications} replications']
    scenarios = list(dict.fromkeys(row.scenario for row in report.rows))
    for position, scenario in enumerate(scenarios):
        if position:
            lines.extend(['', ''])
        lines.append(f'# scenario {scenario}')
        lines.append('# n rate standard_error')
        lines.extend(
            f'{row.n} {row.rate:.4f} {row.standard_error:.4f}'
            for row in report.rows
            if row.scenario == scenario
        )
    return ('\n'.join(lines) + '\n').encode('utf-8')


def emit_report(report: ExperimentReport, fmt: str = 'json', include_timing: bool = False) -> bytes:
    """
    Render a report with a stable field order.

    Args:
        report: Aggregated experiment report
        fmt: 'json', 'csv' or 'gnuplot'
        include_timing: Add runtime_seconds (JSON only); off by default so that
            reports of equal designs and seeds are byte-identical

    Returns:
        bytes: UTF-8 document; an empty report still carries its header

    Raises:
        UnsupportedFormat: If fmt is not one of FORMATS
    """
    if fmt == 'json':
        data = ExperimentReportSerializer(report, context={'include_timing': include_timing}).data
        return JSONRenderer().render(data)
    if fmt == 'csv':
        return _emit_csv(report)
    if fmt == 'gnuplot':
        return _emit_gnuplot(report)
    raise UnsupportedFormat(f"Unsupported report format {fmt!r}; expected one of {', '.join(FORMATS)}")


def read_report(data: bytes, fmt: str):
    """Parse an emitted report: a dict for JSON, a DataFrame for CSV."""
    if fmt == 'json':
        return JSONParser().parse(io.BytesIO(data))
    if fmt == 'csv':
        return pd.read_csv(io.BytesIO(data), keep_default_na=False, dtype={'n': str, 'scenario': str})
    raise UnsupportedFormat(f"Cannot read back {fmt!r} reports")


def report_from_dict(data: Dict) -> ExperimentReport:
    """Rebuild an ExperimentReport from its JSON form (e.g. a saved ExperimentRun)."""
    rows = []
    for item in data.get('rows', []):
        values = dict(item)
        values['cluster_counts'] = {int(count): total for count, total in values.get('cluster_counts', {}).items()}
        rows.append(ReportRow(**values))
    return ExperimentReport(
        design_id=data['design_id'],
        mode=data['mode'],
        seed=data['seed'],
        n_replications=data['n_replications'],
        level=data['level'],
        pairing=data['pairing'],
        rows=rows,
        runtime_seconds=data.get('runtime_seconds'),
        description=data.get('description', ''),
    )
