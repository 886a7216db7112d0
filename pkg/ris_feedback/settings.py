""" Default settings can be overridden in project settings """
import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

# Autodiscover all 'feedback_schemes' modules in installed apps, so projects can register their own schemes.
# Module name to autodiscover -  None to disable (e.g. if schemes are defined in models.py)
RIS_FEEDBACK_AUTODISCOVER_MODULE = getattr(settings, 'RIS_FEEDBACK_AUTODISCOVER_MODULE', 'feedback_schemes')


def worker_threads(environ=os.environ):
    """ RIS_FEEDBACK_THREADS if set, else the RIS_SIM_THREADS environment variable, else the CPU count """
    configured = getattr(settings, 'RIS_FEEDBACK_THREADS', None)
    if configured:
        return configured
    value = environ.get('RIS_SIM_THREADS', '').strip()
    if not value:
        return os.cpu_count() or 1
    if not value.isdigit() or int(value) < 1:
        raise ImproperlyConfigured('RIS_SIM_THREADS must be a positive integer, not {v!r}.'.format(v=value))
    return int(value)


# Default Monte-Carlo trials per experiment point.
RIS_FEEDBACK_TRIALS = getattr(settings, 'RIS_FEEDBACK_TRIALS', 500)

# A trial that hits a degenerate channel is resampled at most this many times before the error propagates.
RIS_FEEDBACK_MAX_RESAMPLES = getattr(settings, 'RIS_FEEDBACK_MAX_RESAMPLES', 10)

# Runs with fewer trials than this log a high-variance warning.
RIS_FEEDBACK_LOW_TRIALS_WARNING = getattr(settings, 'RIS_FEEDBACK_LOW_TRIALS_WARNING', 100)
