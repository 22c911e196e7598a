from ...kl_spaces import multifractal_stats
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Local dimension, local entropy and Lyapunov exponent of a two-map Cantor construction."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--q', type=float, required=True, help="Digit frequency.")
        parser.add_argument('--p', type=float, required=True, help="Bernoulli weight in (0, 1).")
        parser.add_argument('--l1', type=float, required=True, help="First contraction ratio in (0, 1).")
        parser.add_argument('--l2', type=float, required=True, help="Second contraction ratio in (0, 1).")

    def build(self, options):
        stats = multifractal_stats(options['q'], options['p'], options['l1'], options['l2'])
        inputs = {key: options[key] for key in ('q', 'p', 'l1', 'l2')}
        return self.document(inputs, stats)
