from pathlib import Path
from decouple import config, Csv
import dj_database_url

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-change-this-in-production')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=True, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    # Third party apps
    'rest_framework',
    'django_celery_results',

    # Local apps
    'copulas',
    'simulations',
]

# Database
DATABASES = {
    'default': dj_database_url.config(
        default=config('DATABASE_URL', default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}"),
        conn_max_age=600,
    )
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework (serializers and renderers only, there is no HTTP API)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
}

# K-sample copula test defaults
COPULA_TEST = {
    'D_MAX': config('COPULA_D_MAX', default=3, cast=int),
    'MAX_D_MAX': config('COPULA_MAX_D_MAX', default=6, cast=int),
    'ALPHA_PENALTY': config('COPULA_ALPHA_PENALTY', default=1.0, cast=float),
    'PAIRING': config('COPULA_PAIRING', default='paired'),
    'LEVEL': config('COPULA_LEVEL', default=0.05, cast=float),
    'TIES': config('COPULA_TIES', default='error'),
}

# Penalty tuning by merge-split resampling
COPULA_TUNING = {
    'K_PRIME': config('COPULA_TUNING_K_PRIME', default=3, cast=int),
    'N_REPS': config('COPULA_TUNING_N_REPS', default=20, cast=int),
    'ALPHA_GRID': config(
        'COPULA_TUNING_ALPHA_GRID',
        default=','.join(f'{0.05 * step:.2f}' for step in range(1, 101)),
        cast=Csv(float),
    ),
    'SEED': config('COPULA_TUNING_SEED', default=0, cast=int),
}

# Monte Carlo harness
SIMULATION = {
    'N_REPLICATIONS': config('SIMULATION_N_REPLICATIONS', default=500, cast=int),
    'BATCH_SIZE': config('SIMULATION_BATCH_SIZE', default=25, cast=int),
    'DESIGNS_DIR': BASE_DIR / 'simulations' / 'designs',
    'STUDENT_DF': config('SIMULATION_STUDENT_DF', default=4.0, cast=float),
}

RUN_SLOW_TESTS = config('RUN_SLOW_TESTS', default=False, cast=bool)

# Celery Configuration
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379/1')
CELERY_RESULT_BACKEND = 'django-db'

CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 60 * 60  # 1 hour per replication batch
CELERY_RESULT_EXTENDED = True
# Run replication batches inline unless a broker and workers are available
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True

# Create logs directory if it doesn't exist
LOGS_DIR = BASE_DIR / 'logs'
LOGS_DIR.mkdir(exist_ok=True)

# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': config('CONSOLE_LOG_LEVEL', default='WARNING'),
            'class': 'logging.StreamHandler',
            'formatter': 'simple'
        },
        'file': {
            'level': 'INFO',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOGS_DIR / 'copula_lab.log',
            'maxBytes': 1024 * 1024 * 15,  # 15MB
            'backupCount': 10,
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console', 'file'],
        'level': config('LOG_LEVEL', default='INFO'),
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': config('LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
        'copulas': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'simulations': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}

# Sentry Configuration (Error Tracking)
SENTRY_DSN = config('SENTRY_DSN', default='')

if not DEBUG and SENTRY_DSN:
    import sentry_sdk
    from sentry_sdk.integrations.django import DjangoIntegration
    from sentry_sdk.integrations.celery import CeleryIntegration

    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[
            DjangoIntegration(),
            CeleryIntegration(),
        ],
        traces_sample_rate=0.1,
        send_default_pii=False,
        environment='production' if not DEBUG else 'development',
    )
