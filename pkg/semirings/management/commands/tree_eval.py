from ...trees import NaryFamily, parse_tree, tree_eval, tree_eval_oracle
from ...witt import gap
from ..base import SemiringCommand, float_list


class Command(SemiringCommand):
    help = "Evaluate a guessing tree by nested additions, optionally against the simplex oracle."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_context_arguments(parser)
        parser.add_argument('--tree', required=True, help='e.g. "((1 2) 3)"')
        parser.add_argument('--xs', required=True, help="Comma-separated leaf values, x_k for leaf k.")
        parser.add_argument('--v', type=int, default=None, help="Arity bound; defaults to the widest node.")
        parser.add_argument('--family', choices=['chain', 'direct'], default='chain')
        parser.add_argument('--oracle', action='store_true', help="Also run the brute-force simplex oracle.")

    def build(self, options):
        ctx = self.context(options)
        tree = parse_tree(options['tree'], v=options['v'])
        xs = float_list(options['xs'])
        family = NaryFamily(ctx.measure, mode=options['family'])
        result = {'value': tree_eval(tree, ctx, xs, family)}
        defects = {}
        if options['oracle']:
            result['oracle_value'] = tree_eval_oracle(tree, ctx, xs, family)
            result['defect'] = float(gap(result['value'], result['oracle_value']))
            defects['oracle'] = result['defect']
        inputs = {'measure': ctx.measure.spec, 'T': ctx.T, 'tree': str(tree), 'n': tree.n, 'v': tree.v,
                  'xs': xs, 'family': options['family']}
        return self.document(inputs, result, defects, {'solver_tol': ctx.solver.tol})
