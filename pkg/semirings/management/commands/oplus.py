from ...tropical import tropical_value
from ...witt import gap, oplus, oplus_closed
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Evaluate x (+)_{S,T} y, with the closed form where one exists."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_context_arguments(parser)
        parser.add_argument('x', help="Left argument; 'inf' allowed.")
        parser.add_argument('y', help="Right argument; 'inf' allowed.")

    def build(self, options):
        ctx = self.context(options)
        x, y = tropical_value(options['x']), tropical_value(options['y'])
        found = oplus(ctx, x, y)
        result = found.as_dict()
        defects = {}
        if ctx.measure.kind in ('shannon', 'kl') and ctx.T > 0 and not ctx.deformed:
            result['closed'] = oplus_closed(ctx, x, y)
            defects['closed_gap'] = float(gap(result['closed'], found.value))
            if ctx.measure.kind == 'kl':
                result['closed_published'] = oplus_closed(ctx, x, y, form='published')
        inputs = {'measure': ctx.measure.spec, 'T': ctx.T, 'deform': ctx.deform_alpha, 'x': x, 'y': y}
        return self.document(inputs, result, defects, {'solver_tol': ctx.solver.tol})
