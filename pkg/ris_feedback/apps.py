"""
    RIS feedback simulation app - registers the built-in feedback schemes and discovers project schemes.
"""
from django.apps import AppConfig
from ris_feedback import settings


class RisFeedbackConfig(AppConfig):
    name = 'ris_feedback'
    default = True

    def ready(self):
        import ris_feedback.core.schemes  # noqa: F401 - registers the built-in schemes
        if settings.RIS_FEEDBACK_AUTODISCOVER_MODULE:
            from django.utils.module_loading import autodiscover_modules

            autodiscover_modules(settings.RIS_FEEDBACK_AUTODISCOVER_MODULE)
