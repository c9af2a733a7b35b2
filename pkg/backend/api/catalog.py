"""
Catalog API - builtin manifolds and their Killing fields
"""

from flask import Blueprint, jsonify
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from services.catalog_service import catalog

catalog_bp = Blueprint('catalog', __name__)


@catalog_bp.route('', methods=['GET'])
def list_examples():
    return jsonify({
        'success': True,
        'manifolds': catalog.describe()
    }), 200


@catalog_bp.route('/<name>', methods=['GET'])
def get_example(name):
    for entry in catalog.describe():
        if entry['name'] == name:
            return jsonify({'success': True, 'manifold': entry}), 200
    return jsonify({'success': False, 'error': f"Unknown manifold '{name}'"}), 404
