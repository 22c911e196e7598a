import io
import sys

import numpy as np

from ...entropy import binary_values, parse_measure
from ...exceptions import SemiringValidationError
from ...legendre import SampledFunction, biconjugate, conjugate, convexity_defect, read_csv, write_csv
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Legendre-Fenchel conjugate (or biconjugate) of a sampled function."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--input', help="CSV with header x,f; '-' reads standard input.")
        source.add_argument('--negentropy', metavar='MEASURE',
                            help="Sample f(p) = -S(p) on [0, 1] for a measure spec instead of reading a file.")
        parser.add_argument('--grid-step', type=float, default=1e-3, help="Sampling step for --negentropy.")
        parser.add_argument('--dual-min', type=float, default=-10.0)
        parser.add_argument('--dual-max', type=float, default=10.0)
        parser.add_argument('--dual-step', type=float, default=1e-3)
        parser.add_argument('--biconjugate', action='store_true', help="Emit f** on the input grid.")
        parser.add_argument('--format', choices=['csv', 'json'], default='csv')

    def source(self, options) -> SampledFunction:
        if options['input'] == '-':
            return read_csv(sys.stdin)
        if options['input']:
            try:
                return read_csv(options['input'])
            except OSError as exc:
                raise SemiringValidationError(f"Cannot read {options['input']}: {exc.strerror}.")
        measure = parse_measure(options['negentropy'])
        if not 0 < options['grid_step'] <= 0.5:
            raise SemiringValidationError(f"grid-step must lie in (0, 0.5], got {options['grid_step']!r}.")
        steps = int(round(1.0 / options['grid_step']))
        grid = np.linspace(0.0, 1.0, steps + 1)
        return SampledFunction(grid, -binary_values(measure, grid))

    def build(self, options):
        f = self.source(options)
        if not options['dual_min'] < options['dual_max'] or not options['dual_step'] > 0:
            raise SemiringValidationError("Need dual-min < dual-max and a positive dual-step.")
        count = int(np.floor((options['dual_max'] - options['dual_min']) / options['dual_step'] + 1e-9)) + 1
        dual = options['dual_min'] + options['dual_step'] * np.arange(count)
        if options['biconjugate']:
            out = biconjugate(f, dual, f.grid)
        else:
            out = conjugate(f, dual)

        if options['format'] == 'csv':
            buffer = io.StringIO()
            write_csv(out, buffer)
            return buffer.getvalue()
        inputs = {
            'source': options['input'] or f"negentropy:{options['negentropy']}",
            'points': int(f.grid.size), 'dual_points': int(dual.size), 'biconjugate': options['biconjugate'],
        }
        defects = {'input_convexity': convexity_defect(f), 'output_convexity': convexity_defect(out)}
        if options['biconjugate']:
            defects['max_gap'] = float(np.max(np.abs(out.values - f.values)))
            defects['max_excess'] = float(np.max(out.values - f.values))
        result = {'grid': out.grid, 'values': out.values}
        return self.document(inputs, result, defects)
