import io

from ...successor import sample_curve
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Sample the successor function lambda(x, T) = x (+) 0 as CSV rows x,lambda,argmin_p."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_context_arguments(parser)
        parser.add_argument('--xmin', type=float, required=True)
        parser.add_argument('--xmax', type=float, required=True)
        parser.add_argument('--step', type=float, required=True)

    def build(self, options):
        curve = sample_curve(self.context(options), options['xmin'], options['xmax'], options['step'])
        buffer = io.StringIO()
        curve.write_csv(buffer)
        return buffer.getvalue()
