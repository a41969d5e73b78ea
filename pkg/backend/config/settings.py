#backend/config/settings.py
"""
Configurações do Django para o gaugenet
Projeto sem banco de dados e sem rotas HTTP: os apps são usados pelos
comandos de gerenciamento
"""

import sys
from pathlib import Path
from decouple import config, UndefinedValueError


# Validação rigorosa de ambiente
def validate_required_env():
    """Falha imediatamente se alguma variável obrigatória estiver faltando"""
    required = {
        'SECRET_KEY': 'Chave secreta do Django',
        'DEBUG': 'Modo debug (True/False)',
    }

    missing = []
    for var, description in required.items():
        try:
            config(var)
        except UndefinedValueError:
            missing.append(f"  ❌ {var}: {description}")

    if missing:
        print("\n" + "=" * 60, file=sys.stderr)
        print("ERRO: Variáveis de ambiente obrigatórias não encontradas!", file=sys.stderr)
        print("=" * 60, file=sys.stderr)
        print("\nAdicione ao arquivo .env:", file=sys.stderr)
        print("\n".join(missing), file=sys.stderr)
        print("=" * 60 + "\n", file=sys.stderr)
        sys.exit(1)


# Executa validação ANTES de qualquer outra coisa
validate_required_env()

# Base
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY')
DEBUG = config('DEBUG', cast=bool)
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    # Third party
    'rest_framework',

    # Apps do projeto
    'apps.core',
    'apps.dataset',
    'apps.glasso',
    'apps.graph',
    'apps.scoring',
    'apps.sgm',
    'apps.inference',
    'apps.removal',
    'apps.cli',
]

# Sem banco de dados: tudo é arquivo (CSV/JSON)
DATABASES = {}

# REST Framework (só serializers, sem views)
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Parâmetros do domínio
GAUGENET = {
    'NWIS_ENDPOINT': config('GAUGENET_NWIS_ENDPOINT', default='https://waterservices.usgs.gov/nwis/dv/'),
    'HTTP_TIMEOUT': config('GAUGENET_HTTP_TIMEOUT', default=60, cast=float),
    # 1.0 é ln(Q + 1); a variante de Farmer usa 0.00003
    'LOG_OFFSET': config('GAUGENET_LOG_OFFSET', default=1.0, cast=float),
    'WORKERS': config('GAUGENET_WORKERS', default=1, cast=int),
    'GLASSO_TOL': config('GAUGENET_GLASSO_TOL', default=1e-4, cast=float),
    'GLASSO_MAX_SWEEPS': config('GAUGENET_GLASSO_MAX_SWEEPS', default=1000, cast=int),
    'PENALIZE_DIAGONAL': config('GAUGENET_PENALIZE_DIAGONAL', default=True, cast=bool),
}

# i18n
LANGUAGE_CODE = 'pt-br'
TIME_ZONE = 'America/Sao_Paulo'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging básico
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
}
