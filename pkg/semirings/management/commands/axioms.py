from ...entropy import axiom_report, parse_measure
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Axiom defects of a binary information measure over a probability grid."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--measure', required=True)
        parser.add_argument('--grid-step', type=float, default=0.01)
        parser.add_argument('--tol', type=float, default=1e-10)
        parser.add_argument('--alpha', type=float, default=None,
                            help="Exponent of the alpha-associativity check.")

    def build(self, options):
        report = axiom_report(parse_measure(options['measure']), options['grid_step'], options['tol'],
                              alpha=options['alpha'])
        inputs = {'measure': report.measure, 'grid_step': options['grid_step'], 'alpha': report.alpha}
        result = {'passed': report.passed, 'witnesses': report.witnesses}
        return self.document(inputs, result, report.defects, {'tol': report.tol})
