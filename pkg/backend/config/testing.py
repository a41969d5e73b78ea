# =================================================================
# backend/config/testing.py
"""
Configurações para testes automatizados
"""

import os

# settings.py exige estas variáveis; nos testes elas têm valor fixo
os.environ.setdefault('SECRET_KEY', 'test-secret-key-for-testing-only')
os.environ.setdefault('DEBUG', 'False')

from .settings import *  # noqa: E402,F401,F403

# Test configuration
DEBUG = False
TESTING = True

# Valores determinísticos independentes do .env local
GAUGENET = {
    **GAUGENET,  # noqa: F405
    'NWIS_ENDPOINT': 'http://nwis.test/dv/',
    'LOG_OFFSET': 1.0,
    'WORKERS': 1,
    'GLASSO_TOL': 1e-4,
    'GLASSO_MAX_SWEEPS': 1000,
    'PENALIZE_DIAGONAL': True,
}

# Simplify logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}
