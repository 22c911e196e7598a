from ...witt import defect_report, kl_closed_form_report
from ..base import SemiringCommand


class Command(SemiringCommand):
    help = "Search seeded random arguments for the largest commutator or associator."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_context_arguments(parser)
        self.add_seed_argument(parser)
        parser.add_argument('--kind', required=True, choices=['comm', 'assoc', 'kl-forms'])
        parser.add_argument('--samples', type=int, default=200)
        parser.add_argument('--low', type=float, default=-3.0)
        parser.add_argument('--high', type=float, default=3.0)

    def build(self, options):
        ctx = self.context(options)
        seed = self.seed(options)
        inputs = {
            'measure': ctx.measure.spec, 'T': ctx.T, 'deform': ctx.deform_alpha, 'kind': options['kind'],
            'samples': options['samples'], 'seed': seed, 'low': options['low'], 'high': options['high'],
        }
        if options['kind'] == 'kl-forms':
            report = kl_closed_form_report(ctx, options['samples'], seed, options['low'], options['high'])
            defects = {'variational': report['variational_max_error'], 'published': report['published_max_error']}
            return self.document(inputs, report, defects, {'solver_tol': ctx.solver.tol})
        report = defect_report(ctx, options['kind'], options['samples'], seed, options['low'], options['high'])
        return self.document(inputs, report, {options['kind']: report['max_defect']},
                             {'solver_tol': ctx.solver.tol})
