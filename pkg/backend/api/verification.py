"""
Verification API - identity suite over a builtin manifold or a posted manifest
"""

from flask import Blueprint, request, jsonify
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models.records import Tolerance
from services.expression_service import check_order
from services.manifest_service import resolve_target
from services.verification_service import CHECK_GROUPS, run_verify
from utils.config import get_settings
from utils.errors import BranegeoError

verification_bp = Blueprint('verification', __name__)

MAX_SAMPLES = 256


def target_from_body(data: dict):
    """(chart, sampling) for a body naming `manifold` (with `params`) or carrying `manifest` text"""
    manifold = data.get('manifold')
    manifest = data.get('manifest')
    if manifold is None and manifest is None:
        raise ValueError("Provide 'manifold' or 'manifest'")
    if manifold is not None:
        return resolve_target(manifold=manifold, constants=data.get('params') or {})
    return resolve_target(manifest_text=manifest)


@verification_bp.route('', methods=['POST'])
def verify():
    """
    Run the identity suite

    Expects:
        - manifold or manifest
        - params, samples, seed, tol, order, groups (optional)

    Returns:
        VerifyReport JSON with its exit_code
    """
    data = request.get_json(silent=True)
    if not data:
        return jsonify({'success': False, 'error': 'No request body provided'}), 400

    settings = get_settings()
    try:
        chart, sampling = target_from_body(data)
        samples = int(data.get('samples') or (sampling.count if sampling else settings.samples))
        if samples < 1 or samples > MAX_SAMPLES:
            raise ValueError(f"samples must be between 1 and {MAX_SAMPLES}")
        seed = int(data.get('seed', settings.seed))
        tol = data.get('tol')
        tolerance = (Tolerance(abs_tol=float(tol), rel_tol=float(tol)) if tol
                     else Tolerance(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol))
        order = check_order(int(data.get('order', settings.jet_order)))
        groups = data.get('groups') or CHECK_GROUPS
        report = run_verify(chart, samples, seed, tolerance, order, settings.gram_tol, settings.fd_step,
                            groups=groups, target=chart.name)
    except (BranegeoError, KeyError, ValueError, TypeError) as e:
        return jsonify({'success': False, 'error': str(e)}), 400
    except Exception as e:
        return jsonify({'success': False, 'error': str(e)}), 500

    return jsonify({
        'success': True,
        'exit_code': report.exit_code,
        'report': report.model_dump(mode='json')
    }), 200
