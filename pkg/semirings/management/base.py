import json
import logging
import math
import sys
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from ..conf import default_seed, solver_settings
from ..entropy import parse_measure
from ..exceptions import NumericalError, SemiringValidationError
from ..witt import WittContext

logger = logging.getLogger(__name__)


def jsonable(value):
    """Plain JSON types; infinities become the string 'inf', sets become sorted lists."""
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((jsonable(item) for item in value), key=repr)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def float_list(text: str):
    """Comma-separated numbers; 'inf' is allowed."""
    try:
        return [float(item) for item in str(text).split(',') if item.strip()]
    except ValueError:
        raise SemiringValidationError(f"{text!r} is not a comma-separated list of numbers.")


class SemiringCommand(BaseCommand):
    """
    Base for the semiring commands: one JSON (or CSV) document per run,
    written to ``--out`` ('-' for standard output). Validation failures exit
    with status 1, numerical failures with status 2.
    """
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def error(message):
            if parser.called_from_command_line:
                parser.print_usage(sys.stderr)
                parser.exit(1, f"{parser.prog}: error: {message}\n")
            raise CommandError(f"Error: {message}", returncode=1)

        parser.error = error
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--out', default='-', help="Output path, '-' for standard output.")

    def add_context_arguments(self, parser, measure_required=True):
        parser.add_argument('--measure', required=measure_required,
                            help="shannon[:C], renyi:a, tsallis:a or kl:q")
        parser.add_argument('--T', type=float, default=1.0, help="Temperature, T >= 0.")
        parser.add_argument('--deform', type=float, default=None, help="Exponent deformation alpha > 0.")
        parser.add_argument('--grid-n', type=int, default=None)
        parser.add_argument('--refine-iters', type=int, default=None)
        parser.add_argument('--solver-tol', type=float, default=None)

    def add_seed_argument(self, parser):
        parser.add_argument('--seed', type=int, default=None, help="Random seed (default from settings).")

    def seed(self, options) -> int:
        return options['seed'] if options.get('seed') is not None else default_seed()

    def context(self, options) -> WittContext:
        solver = solver_settings(
            grid_n=options.get('grid_n'),
            refine_iters=options.get('refine_iters'),
            tol=options.get('solver_tol'),
        )
        return WittContext(parse_measure(options['measure']), float(options['T']),
                           deform_alpha=options.get('deform'), solver=solver)

    def document(self, inputs, result, defects=None, tolerances=None) -> dict:
        return {
            'command': self.name,
            'inputs': inputs,
            'result': result,
            'defects': defects or {},
            'tolerances': tolerances or {},
        }

    @property
    def name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def build(self, options):
        """Return the document: a dict for JSON output or a str for CSV output."""
        raise NotImplementedError

    def emit(self, text: str, target: str) -> None:
        if target == '-':
            self.stdout.write(text, ending='')
            return
        Path(target).write_text(text, encoding='utf-8')
        logger.info("wrote %s output to %s", self.name, target)

    def handle(self, *args, **options):
        logger.info("running %s with %s", self.name,
                    {k: v for k, v in options.items() if k not in ('stdout', 'stderr')})
        try:
            document = self.build(options)
        except SemiringValidationError as exc:
            raise CommandError('; '.join(exc.messages), returncode=1)
        except NumericalError as exc:
            raise CommandError(str(exc), returncode=2)
        if isinstance(document, str):
            text = document
        else:
            text = json.dumps(jsonable(document), sort_keys=True, indent=2) + '\n'
        self.emit(text, options['out'])
