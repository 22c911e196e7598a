import logging

from django.apps import AppConfig

logger = logging.getLogger(__name__)


class SemiringsConfig(AppConfig):
    name = 'semirings'
    verbose_name = 'Thermodynamic semirings'

    def ready(self):
        """Log the solver defaults the commands will build contexts from."""
        from .conf import solver_settings

        logger.debug("solver defaults: %s", solver_settings())
