"""
Engine Configuration
Settings loaded from the environment (.env supported)
"""

from functools import lru_cache
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()


class EngineSettings(BaseModel):
    """Tolerances, sampling defaults and service options"""

    abs_tol: float = Field(default=1e-8, gt=0)
    rel_tol: float = Field(default=1e-8, gt=0)
    jet_order: int = Field(default=3, ge=0, le=3)
    samples: int = Field(default=64, ge=1)
    seed: int = Field(default=42, ge=0)
    gram_tol: float = Field(default=1e-9, gt=0)
    fd_step: float = Field(default=1e-5, gt=0)
    workers: int = Field(default=1, ge=1)
    log_level: str = 'WARNING'
    port: int = 5000
    debug: bool = False


@lru_cache(maxsize=1)
def get_settings() -> EngineSettings:
    """Build settings from BRANEGEO_* environment variables"""
    return EngineSettings(
        abs_tol=float(os.getenv('BRANEGEO_ABS_TOL', 1e-8)),
        rel_tol=float(os.getenv('BRANEGEO_REL_TOL', 1e-8)),
        jet_order=int(os.getenv('BRANEGEO_JET_ORDER', 3)),
        samples=int(os.getenv('BRANEGEO_SAMPLES', 64)),
        seed=int(os.getenv('BRANEGEO_SEED', 42)),
        gram_tol=float(os.getenv('BRANEGEO_GRAM_TOL', 1e-9)),
        fd_step=float(os.getenv('BRANEGEO_FD_STEP', 1e-5)),
        workers=int(os.getenv('BRANEGEO_WORKERS', 1)),
        log_level=os.getenv('BRANEGEO_LOG_LEVEL', 'WARNING'),
        port=int(os.getenv('PORT', 5000)),
        debug=os.getenv('DEBUG', 'False') == 'True',
    )
