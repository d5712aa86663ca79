#!/usr/bin/env python3
"""
Excel workbook of experiment reports: a summary sheet plus one sheet per experiment
"""

import os
from datetime import datetime
from typing import List, Optional, Sequence

import openpyxl
from openpyxl.styles import Alignment, Border, Font, NamedStyle, PatternFill, Side
from openpyxl.utils import get_column_letter

from harness import ConvergenceReport, Verdict
from sets import DefectPair

_GRID = Border(left=Side(style="thin", color="BFBFBF"), right=Side(style="thin", color="BFBFBF"),
               top=Side(style="thin", color="BFBFBF"), bottom=Side(style="thin", color="BFBFBF"))

_HEAD_FILL = "1F4E5F"
_SUMMARY_COLUMNS = 6
_MAX_WIDTH = 60

_VERDICT_FILLS = {
    Verdict.CONVERGES: "C6EFCE",
    Verdict.DIVERGES: "FFC7CE",
    Verdict.INCONCLUSIVE: "FFEB9C",
}

_INVALID_SHEET_CHARS = ":\\/?*[]"


def _shown(value) -> str:
    """Text as the cell displays it: floats in the scientific format of the magnitude style"""
    return f"{value:.3E}" if isinstance(value, float) else str(value)


def sheet_title(name: str, taken: Sequence[str] = ()) -> str:
    """Excel sheet names: at most 31 characters, none of :\\/?*[] and unique"""
    base = "".join("_" if ch in _INVALID_SHEET_CHARS else ch for ch in name)[:31] or "report"
    title, k = base, 1
    while title in taken:
        suffix = f"~{k}"
        title = base[:31 - len(suffix)] + suffix
        k += 1
    return title


class ReportWorkbookGenerator:
    """Lays out one run's reports: a summary table, then a sheet of series per experiment"""

    def __init__(self, reports: List[ConvergenceReport]):
        self.reports = list(reports)
        self.wb = openpyxl.Workbook()
        self.ws = self.wb.active
        self.ws.title = "Summary"
        self.current_row = 1

        self._register_styles()

    def _register_styles(self):
        """Named styles for column heads, block titles, labels, magnitudes and verdicts"""
        column_head = NamedStyle(name="column_head")
        column_head.font = Font(bold=True, color="FFFFFF")
        column_head.fill = PatternFill(start_color=_HEAD_FILL, end_color=_HEAD_FILL, fill_type="solid")
        column_head.border = _GRID
        column_head.alignment = Alignment(horizontal="left", vertical="bottom", wrap_text=True)

        block_title = NamedStyle(name="block_title")
        block_title.font = Font(bold=True, size=13, color=_HEAD_FILL)
        block_title.border = Border(bottom=Side(style="medium", color=_HEAD_FILL))

        label = NamedStyle(name="label")
        label.border = _GRID

        magnitude = NamedStyle(name="magnitude")
        magnitude.number_format = "0.000E+00"
        magnitude.border = _GRID
        magnitude.alignment = Alignment(horizontal="right")

        styles = [column_head, block_title, label, magnitude]
        for verdict, color in _VERDICT_FILLS.items():
            style = NamedStyle(name=f"verdict_{verdict.value.lower()}")
            style.font = Font(bold=True)
            style.fill = PatternFill(start_color=color, end_color=color, fill_type="solid")
            style.border = _GRID
            styles.append(style)

        for style in styles:
            if style.name not in self.wb.named_styles:
                self.wb.add_named_style(style)

    def _put(self, row, col, value, style=None, span_to=None):
        cell = self.ws.cell(row=row, column=col, value=value)
        if style:
            cell.style = style
        if span_to:
            self.ws.merge_cells(start_row=row, start_column=col, end_row=row, end_column=span_to)
        return cell

    def _block_title(self, title):
        self._put(self.current_row, 1, title, "block_title", span_to=_SUMMARY_COLUMNS)
        self.current_row += 1

    def _column_heads(self, labels):
        for col, text in enumerate(labels, start=1):
            self._put(self.current_row, col, text, "column_head")
        self.current_row += 1

    def _key_value(self, key, value, style="label"):
        self._put(self.current_row, 1, key, "label")
        self._put(self.current_row, 2, value, style)
        self.current_row += 1

    @staticmethod
    def _verdict_style(verdict: Optional[Verdict]) -> str:
        return f"verdict_{verdict.value.lower()}" if verdict is not None else "label"

    def _generate_summary(self):
        title = self._put(1, 1, "Set convergence run", span_to=_SUMMARY_COLUMNS)
        title.font = Font(bold=True, size=15, color=_HEAD_FILL)
        self.current_row = 3
        unexpected = sum(report.unexpected for report in self.reports)
        self._put(self.current_row, 1, f"{len(self.reports)} experiments ({unexpected} unexpected), "
                                       f"written {datetime.now():%Y-%m-%d %H:%M}")
        self.current_row += 2

        self._column_heads(["Experiment", "Verdict", "Expected", "Final defect", "Tolerance", "Unexpected"])
        self.ws.freeze_panes = self.ws.cell(self.current_row, 1)
        for report in self.reports:
            row = self.current_row
            self._put(row, 1, report.experiment_id, "label")
            self._put(row, 2, report.verdict.value, self._verdict_style(report.verdict))
            self._put(row, 3, report.expected.value if report.expected else "-", "label")
            self._put(row, 4, report.final_defect, "magnitude")
            self._put(row, 5, report.tolerance, "magnitude")
            self._put(row, 6, "YES" if report.unexpected else "", "label")
            self.current_row += 1

    def _generate_report_sheet(self, report: ConvergenceReport):
        self.ws = self.wb.create_sheet(sheet_title(report.experiment_id, self.wb.sheetnames))
        self.current_row = 1

        self._block_title(report.experiment_id)
        self._key_value("Verdict", report.verdict.value, self._verdict_style(report.verdict))
        self._key_value("Expected", report.expected.value if report.expected else "-")
        self._key_value("Tolerance", report.tolerance, "magnitude")
        for name, value in sorted(report.checks.items()):
            self._key_value(name, value, "magnitude")
        for key, value in sorted(report.parameters.items()):
            self._key_value(key, str(value))
        self.current_row += 1

        aux = sorted(report.aux_series)
        self._block_title("Defect series")
        self._column_heads(["n", "lower_defect", "upper_defect", "value"] + aux)
        for k, (n, entry) in enumerate(zip(report.n_list, report.defect_series)):
            if isinstance(entry, DefectPair):
                cells = [entry.lower_defect, entry.upper_defect, entry.value]
            else:
                cells = [None, None, float(entry)]
            self._put(self.current_row, 1, n, "label")
            for col, value in enumerate(cells, start=2):
                self._put(self.current_row, col, value, "magnitude")
            for col, name in enumerate(aux, start=5):
                series = report.aux_series[name]
                self._put(self.current_row, col, series[k] if k < len(series) else None, "magnitude")
            self.current_row += 1

        if report.notes:
            self.current_row += 1
            self._block_title("Notes")
            for note in report.notes:
                self._put(self.current_row, 1, note)
                self.current_row += 1

    def generate_workbook(self, filename: str) -> str:
        """Write the summary and every report sheet to filename and return the path"""
        self._generate_summary()
        self._fit_columns()
        for report in self.reports:
            self._generate_report_sheet(report)
            self._fit_columns()

        os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)
        self.wb.save(filename)
        return filename

    def _fit_columns(self):
        # free text (titles, notes, the run line) may overflow; only table cells set widths
        widths = {}
        for row in self.ws.iter_rows():
            for cell in row:
                if cell.value is None or cell.style in ("Normal", "block_title"):
                    continue
                widths[cell.column] = max(widths.get(cell.column, 0), len(_shown(cell.value)))
        for col, width in widths.items():
            self.ws.column_dimensions[get_column_letter(col)].width = min(max(width + 2, 8), _MAX_WIDTH)


def generate_report_workbook(reports: List[ConvergenceReport], filename: str) -> str:
    generator = ReportWorkbookGenerator(reports)
    return generator.generate_workbook(filename)
