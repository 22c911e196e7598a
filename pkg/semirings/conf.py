from django.conf import settings

from .solvers import SolverSettings


def solver_settings(**overrides) -> SolverSettings:
    """Solver defaults from SEMIRINGS_SOLVER, with keyword overrides applied last."""
    configured = dict(getattr(settings, 'SEMIRINGS_SOLVER', {}))
    configured.update({k: v for k, v in overrides.items() if v is not None})
    return SolverSettings(**configured)


def default_seed() -> int:
    return getattr(settings, 'SEMIRINGS_DEFAULT_SEED', 0)
