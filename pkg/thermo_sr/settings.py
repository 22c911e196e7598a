# thermo_sr/settings.py

from pathlib import Path
import os
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env at project root (if present)
load_dotenv(BASE_DIR / '.env')

# ---- Security & env-driven config ----
# No request handling happens here, but Django still wants a key.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'dev-only-not-secure')

DEBUG = os.environ.get('DJANGO_DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []

# ---- Apps ----
INSTALLED_APPS = [
    'semirings.apps.SemiringsConfig',
]

# No models and no service mode: management commands and tests only.
DATABASES = {}

# ---- Solver defaults (WittContext.solver) ----
SEMIRINGS_SOLVER = {
    'grid_n': int(os.environ.get('SEMIRINGS_GRID_N', '512')),
    'refine_iters': int(os.environ.get('SEMIRINGS_REFINE_ITERS', '80')),
    'tol': float(os.environ.get('SEMIRINGS_TOL', '1e-10')),
}

# Seed used by commands when --seed is not given
SEMIRINGS_DEFAULT_SEED = int(os.environ.get('SEMIRINGS_DEFAULT_SEED', '0'))

# ---- Logging ----
# Everything goes to stderr so command output on stdout stays reproducible.
SEMIRINGS_LOG_LEVEL = os.environ.get('SEMIRINGS_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'semirings': {
            'handlers': ['console'],
            'level': SEMIRINGS_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# ---- i18n ----
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
