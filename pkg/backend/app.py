"""
branegeo - Clifford-bundle submanifold geometry engine
HTTP application entry point
"""

from flask import Flask, jsonify
from flask_cors import CORS
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from api.catalog import catalog_bp
from api.report import report_bp
from api.verification import verification_bp
from utils.config import get_settings


def create_app():
    """Application factory pattern"""
    app = Flask(__name__)
    app.config['MAX_CONTENT_LENGTH'] = 1024 * 1024  # manifests are small

    CORS(app, resources={r"/api/*": {"origins": "*"}})

    app.register_blueprint(verification_bp, url_prefix='/api/verify')
    app.register_blueprint(report_bp, url_prefix='/api/report')
    app.register_blueprint(catalog_bp, url_prefix='/api/examples')

    @app.route('/health')
    def health_check():
        return jsonify({
            'status': 'healthy',
            'service': 'branegeo API',
            'version': '1.0.0'
        })

    @app.route('/')
    def index():
        return jsonify({
            'message': 'branegeo geometry engine',
            'endpoints': {
                'verify': '/api/verify',
                'report': '/api/report',
                'examples': '/api/examples'
            }
        })

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({'error': 'Endpoint not found'}), 404

    @app.errorhandler(500)
    def internal_error(error):
        return jsonify({'error': 'Internal server error'}), 500

    return app


# Create app instance for WSGI servers (Gunicorn)
app = create_app()

if __name__ == '__main__':
    settings = get_settings()
    app.run(host='0.0.0.0', port=settings.port, debug=settings.debug)
