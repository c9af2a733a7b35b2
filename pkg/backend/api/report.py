"""
Report API - grid tables of geometric quantities
"""

from flask import Blueprint, Response, request, jsonify
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from api.verification import target_from_body
from services.expression_service import check_order
from services.report_service import parse_quantities, run_report
from utils.config import get_settings
from utils.errors import BranegeoError

report_bp = Blueprint('report', __name__)

MAX_ROWS = 4096


@report_bp.route('', methods=['POST'])
def report():
    """
    Tabulate quantities on a grid

    Expects:
        - manifold or manifest
        - grid: e.g. "16x16"
        - quantities: list or comma string (default "scalar")
        - format: "json" (default) or "csv"
    """
    data = request.get_json(silent=True)
    if not data or 'grid' not in data:
        return jsonify({'success': False, 'error': 'Grid not provided'}), 400

    settings = get_settings()
    fmt = data.get('format', 'json')
    try:
        chart, _ = target_from_body(data)
        raw = data.get('quantities', 'scalar')
        quantities = parse_quantities(raw if isinstance(raw, str) else ','.join(raw))
        rows = 1
        for part in str(data['grid']).lower().split('x'):
            rows *= max(int(part), 1)
        if rows > MAX_ROWS:
            raise ValueError(f"Grid has {rows} points, limit is {MAX_ROWS}")
        order = check_order(int(data.get('order', settings.jet_order)))
        table, text = run_report(chart, str(data['grid']), quantities, fmt, order, settings.gram_tol, chart.name)
    except (BranegeoError, KeyError, ValueError, TypeError) as e:
        return jsonify({'success': False, 'error': str(e)}), 400
    except Exception as e:
        return jsonify({'success': False, 'error': str(e)}), 500

    if fmt == 'csv':
        return Response(text, mimetype='text/csv')
    return jsonify({
        'success': True,
        'report': table.model_dump(mode='json')
    }), 200
