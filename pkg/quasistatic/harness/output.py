"""
Result files: sweep CSVs and plot data, estimate-suite CSVs, zero-dim tables.

Floats are written with ``repr`` so that identical runs produce identical bytes.
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

from ..estimates.models import EstimateReport
from ..logger import get_logger
from ..zero_dim.models import ScalarTrajectory
from ..zero_dim.oracle import energy_balance_defects, stability_check
from .models import RateFit

logger = get_logger(__name__)

SWEEP_HEADER = ['level', 'h', 'tau', 'sq_error', 'slope', 'pass']
SUITE_HEADER = ['level', 'h', 'tau', 'measured', 'bound_or_trend', 'pass']
ZERO_DIM_HEADER = ['t', 'u', 'locally_stable', 'globally_stable', 'balance_defect']


def _number(value: float) -> str:
    return repr(float(value))


def _flag(value: bool) -> str:
    return 'true' if value else 'false'


class ResultWriter:
    """Writes every result file of a run below one output directory.

    Args:
        output_dir: Directory, created on first write
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    def _path(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def _write_rows(self, name: str, header: List[str], rows: Iterable[List[str]]) -> Path:
        path = self._path(name)
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        return path

    def write_sweep(self, fit: RateFit, name: str) -> Path:
        """CSV with one row per level plus the two-column ``.dat`` plot file."""
        rows = []
        for level, (param, error) in enumerate(zip(fit.params, fit.sq_errors)):
            h, tau = (param, fit.fixed) if fit.parameter == 'h' else (fit.fixed, param)
            rows.append([str(level), _number(h), _number(tau), _number(error), _number(fit.slope), _flag(fit.passed)])
        path = self._write_rows(f"{name}.csv", SWEEP_HEADER, rows)

        with open(self._path(f"{name}.dat"), 'w') as f:
            f.write(f"# {fit.parameter} sq_error  slope={fit.slope!r} theory={fit.theory!r}\n")
            for param, error in zip(fit.params, fit.sq_errors):
                f.write(f"{_number(param)} {_number(error)}\n")
        logger.info(f"Wrote sweep '{name}' to {path}")
        return path

    def write_suite(self, report: EstimateReport) -> Path:
        rows = [
            [str(row.level), _number(row.h), _number(row.tau), _number(row.measured),
             _number(row.bound_or_trend), _flag(row.passed)]
            for row in report.rows
        ]
        path = self._write_rows(f"verify_{report.suite}.csv", SUITE_HEADER, rows)
        logger.info(f"Wrote suite '{report.suite}' ({'PASS' if report.passed else 'FAIL'}) to {path}")
        return path

    def write_zero_dim(self, traj: ScalarTrajectory, name: str) -> Path:
        """Samples with both stability verdicts and the energy balance defect."""
        defects = energy_balance_defects(traj)
        rows = [
            [_number(t), _number(u), _flag(stability_check(t, u, 'local')),
             _flag(stability_check(t, u, 'global')), _number(defect)]
            for t, u, defect in zip(traj.times, traj.values, defects)
        ]
        filename = name if name.endswith('.csv') else f"{name}.csv"
        return self._write_rows(filename, ZERO_DIM_HEADER, rows)

    def write_summary(self, summary: Dict[str, Any], name: str = 'summary.json') -> Path:
        path = self._path(name)
        with open(path, 'w') as f:
            json.dump(summary, f, indent=2, sort_keys=True)
        return path
