from ...entropy import direct_values, entropy2, entropy_chain, parse_measure
from ...exceptions import SemiringValidationError
from ..base import SemiringCommand, float_list


class Command(SemiringCommand):
    help = "Evaluate a binary measure at p, or its n-ary extensions at a probability vector."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--measure', required=True)
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--p', type=float, help="Binary argument in [0, 1].")
        group.add_argument('--probs', help="Comma-separated probability vector.")

    def build(self, options):
        measure = parse_measure(options['measure'])
        inputs = {'measure': measure.spec}
        if options['p'] is not None:
            inputs['p'] = options['p']
            return self.document(inputs, {'entropy2': entropy2(measure, options['p'])})
        probs = float_list(options['probs'])
        inputs['probs'] = probs
        result = {'chain': entropy_chain(measure, probs)}
        try:
            result['direct'] = float(direct_values(measure, probs))
        except SemiringValidationError:
            result['direct'] = None
        return self.document(inputs, result)
