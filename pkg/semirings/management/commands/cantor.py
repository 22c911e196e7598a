from ...conf import solver_settings
from ...kl_spaces import BitString, cantor_report
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "The KL addition indexed by a binary prefix: value, commutator and bit-flip restoration."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--prefix', required=True, help="Binary digits, e.g. 010110.")
        parser.add_argument('--T', type=float, default=1.0)
        parser.add_argument('--x', type=float, required=True)
        parser.add_argument('--y', type=float, required=True)

    def build(self, options):
        prefix = BitString.parse(options['prefix'])
        report = cantor_report(prefix, options['T'], options['x'], options['y'], solver=solver_settings())
        inputs = {'prefix': str(prefix), 'T': options['T'], 'x': options['x'], 'y': options['y']}
        defects = {'comm_defect': report['comm_defect'], 'flipped_check': report['flipped_check']}
        return self.document(inputs, report, defects)
