"""
Django settings for django-ris-feedback tests.
"""

SECRET_KEY = 'django-insecure'
DEBUG = True


INSTALLED_APPS = (
    # project apps
    "ris_feedback",
    "testapp",
)

USE_TZ = True

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {'class': 'logging.StreamHandler'},
    },
    'loggers': {
        'ris_feedback': {'handlers': ['console'], 'level': 'ERROR', 'propagate': False},
    },
}

# Keep the Monte-Carlo tests quick on small CI runners
RIS_FEEDBACK_THREADS = 2
RIS_FEEDBACK_TRIALS = 20
