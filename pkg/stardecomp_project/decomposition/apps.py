"""
Application configuration for the decomposition app.
"""
from django.apps import AppConfig


class DecompositionConfig(AppConfig):
    """Configuration for the decomposition app."""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'stardecomp_project.decomposition'
    verbose_name = 'Star-edge decomposition'

    def ready(self):
        """
        Initialize app when ready.
        Import signals module to register signal handlers.
        """
        import stardecomp_project.decomposition.signals  # noqa
