"""
Report Service
Per-grid-point tables of geometric quantities, written as CSV or JSON
"""

import io
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from models.records import ReportTable
from services.curvature_service import (curvature_scalar, frame_biforms, lower_first,
                                        ricci_oneform, riemann_from_biforms)
from services.expression_service import check_order
from services.extensor_service import GeometryContext
from services.frame_service import Chart, frame_point
from services.killing_service import hills_report
from services.oracle_service import classical_curvature, metric_jets
from utils.logger import get_logger
from utils.sampling import grid_points, parse_grid

logger = get_logger('report')

QUANTITIES = ('metric', 'shape', 'curvature', 'ricci', 'scalar', 'hills')
FORMATS = ('csv', 'json')
FLOAT_FORMAT = '%.12e'


def parse_quantities(text: str) -> List[str]:
    """'scalar,ricci' -> ['scalar', 'ricci'], validated and deduplicated in input order"""
    out = []
    for part in text.split(','):
        name = part.strip().lower()
        if not name:
            continue
        if name not in QUANTITIES:
            raise ValueError(f"Unknown quantity '{name}'. Available: {', '.join(QUANTITIES)}")
        if name not in out:
            out.append(name)
    if not out:
        raise ValueError("At least one quantity is required")
    return out


class ReportBuilder:
    """Column naming and per-point evaluation for one chart"""

    def __init__(self, chart: Chart, quantities: Sequence[str], order: int = 3, gram_tol: float = 1e-9):
        self.chart = chart
        self.quantities = [q for q in QUANTITIES if q in quantities]
        self.order = order
        self.gram_tol = gram_tol

    def _pairs(self) -> List[Tuple[int, int]]:
        m = self.chart.m
        return [(i, j) for i in range(m) for j in range(i, m)]

    def _bivector_pairs(self) -> List[Tuple[int, int, int, int]]:
        m = self.chart.m
        pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
        return [p + q for i, p in enumerate(pairs) for q in pairs[i:]]

    def columns(self) -> List[str]:
        params = self.chart.params
        cols = ['index'] + list(params)
        for quantity in self.quantities:
            if quantity == 'metric':
                cols += [f"g_{params[i]}_{params[j]}" for i, j in self._pairs()]
            elif quantity == 'shape':
                cols += [f"shape_norm_{a}" for a in range(self.chart.m)] + ['shape_norm']
            elif quantity == 'curvature':
                cols += [f"R_{a}{b}{c}{d}" for a, b, c, d in self._bivector_pairs()]
            elif quantity == 'ricci':
                cols += [f"Ric_{a}{b}" for a, b in self._pairs()]
            elif quantity == 'scalar':
                cols += ['scalar', 'scalar_oracle']
                if self.chart.m == 2:
                    cols += ['gaussian']
            elif quantity == 'hills':
                cols += ['hills_trace', 'hills_residual', 'vacuum']
        return cols

    def row(self, index: int, point: Tuple[float, ...]) -> Dict:
        row: Dict = {'index': index}
        for name, value in zip(self.chart.params, point):
            row[name] = float(value)
        ctx = GeometryContext(frame_point(self.chart, point, self.order, self.gram_tol))
        biforms: Optional[Dict] = None

        def curvature():
            nonlocal biforms
            if biforms is None:
                biforms = frame_biforms(ctx, 'shape')
            return biforms

        for quantity in self.quantities:
            if quantity == 'metric':
                G, _ = metric_jets(self.chart, point, 1)
                for i, j in self._pairs():
                    row[f"g_{self.chart.params[i]}_{self.chart.params[j]}"] = float(G[i, j, 0])
            elif quantity == 'shape':
                norms = [s.norm() for s in ctx.shape_frame]
                for a, value in enumerate(norms):
                    row[f"shape_norm_{a}"] = float(value)
                row['shape_norm'] = float(np.sqrt(sum(v * v for v in norms)))
            elif quantity == 'curvature':
                lowered = lower_first(riemann_from_biforms(ctx, curvature()), ctx.eta)
                for a, b, c, d in self._bivector_pairs():
                    row[f"R_{a}{b}{c}{d}"] = float(lowered[a, b, c, d])
            elif quantity == 'ricci':
                for a, b in self._pairs():
                    value = ricci_oneform(ctx, ctx.theta[a], 'contract', biforms=curvature())
                    row[f"Ric_{a}{b}"] = float(value.dot(ctx.reciprocal(b)).value)
            elif quantity == 'scalar':
                scalar = curvature_scalar(ctx, biforms=curvature())
                oracle = classical_curvature(self.chart, point, self.order)
                row['scalar'] = float(scalar)
                row['scalar_oracle'] = float(oracle['scalar'])
                if self.chart.m == 2:
                    row['gaussian'] = float(scalar / 2.0)
            elif quantity == 'hills':
                report = hills_report(ctx)
                trace = report['trace']
                row['hills_trace'] = None if isinstance(trace, str) else float(trace)
                row['hills_residual'] = float(max(f['residual'] for f in report['frames']))
                row['vacuum'] = int(report['vacuum'])
        return row


def build_report(chart: Chart, grid: str, quantities: Sequence[str], order: int = 3,
                 gram_tol: float = 1e-9, target: Optional[str] = None) -> ReportTable:
    """
    Evaluate the requested quantities on an evenly spaced grid.

    Args:
        chart: target chart
        grid: grid spec such as '32x32'
        quantities: subset of QUANTITIES

    Returns:
        ReportTable with rows ordered by grid index
    """
    check_order(order)
    counts = parse_grid(grid, chart.m)
    builder = ReportBuilder(chart, quantities, order, gram_tol)
    rows = []
    for index, point in enumerate(grid_points(chart.domain, counts)):
        logger.debug(f"report point {index}: {point}")
        rows.append(builder.row(index, point))
    logger.info(f"✓ {len(rows)} report rows for {target or chart.name}")
    return ReportTable(
        target=target or chart.name,
        grid=list(counts),
        quantities=builder.quantities,
        columns=builder.columns(),
        rows=rows,
    )


def render_report(table: ReportTable, fmt: str = 'csv') -> str:
    """CSV with a commented header naming target, grid and columns, or indented JSON"""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown report format '{fmt}'. Available: {', '.join(FORMATS)}")
    if fmt == 'json':
        return table.model_dump_json(indent=2) + '\n'
    frame = pd.DataFrame(table.rows, columns=table.columns)
    buffer = io.StringIO()
    buffer.write(f"# target: {table.target}\n")
    buffer.write(f"# grid: {'x'.join(str(c) for c in table.grid)}\n")
    buffer.write(f"# quantities: {','.join(table.quantities)}\n")
    buffer.write(f"# columns: {','.join(table.columns)}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def run_report(chart: Chart, grid: str, quantities: Sequence[str], fmt: str = 'csv', order: int = 3,
               gram_tol: float = 1e-9, target: Optional[str] = None) -> Tuple[ReportTable, str]:
    if fmt not in FORMATS:
        raise ValueError(f"Unknown report format '{fmt}'. Available: {', '.join(FORMATS)}")
    table = build_report(chart, grid, quantities, order, gram_tol, target)
    return table, render_report(table, fmt)
