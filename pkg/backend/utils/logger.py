"""
Logging setup for branegeo services
"""

import logging

from utils.config import get_settings

_ROOT = 'branegeo'
_configured = False


def get_logger(name: str) -> logging.Logger:
    """Return a child of the branegeo logger, configuring the root once"""
    global _configured
    root = logging.getLogger(_ROOT)
    if not _configured:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
        root.addHandler(handler)
        root.setLevel(get_settings().log_level.upper())
        root.propagate = False
        _configured = True
    return root.getChild(name)
