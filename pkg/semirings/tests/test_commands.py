import json
import math
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def run_json(*args):
    return json.loads(run(*args))


class DocumentShapeTest(SimpleTestCase):
    def test_every_json_command_has_the_fixed_keys(self):
        documents = [
            run_json('oplus', '--measure', 'shannon', '0', '1'),
            run_json('defect', '--measure', 'shannon', '--kind', 'comm', '--samples', '10'),
            run_json('tree_eval', '--measure', 'shannon', '--tree', '(1 2)', '--xs', '0,1'),
            run_json('cantor', '--prefix', '0101', '--x', '0.3', '--y', '1.7'),
            run_json('multifractal', '--q', '0.5', '--p', '0.5', '--l1', '0.3', '--l2', '0.3'),
            run_json('axioms', '--measure', 'shannon', '--grid-step', '0.05'),
            run_json('entropy', '--measure', 'shannon', '--p', '0.5'),
            run_json('legendre', '--negentropy', 'shannon', '--grid-step', '0.05', '--dual-step', '0.05',
                     '--format', 'json'),
        ]
        for document in documents:
            self.assertEqual(set(document), {'command', 'inputs', 'result', 'defects', 'tolerances'})

    def test_command_name_is_echoed(self):
        self.assertEqual(run_json('entropy', '--measure', 'shannon', '--p', '0.5')['command'], 'entropy')


class OplusCommandTest(SimpleTestCase):
    def test_shannon_with_closed_form(self):
        document = run_json('oplus', '--measure', 'shannon', '--T', '1', '0', '0')
        self.assertAlmostEqual(document['result']['value'], -math.log(2), places=8)
        self.assertAlmostEqual(document['result']['closed'], -math.log(2), places=12)
        self.assertLessEqual(document['defects']['closed_gap'], 1e-8)

    def test_kl_reports_both_closed_forms(self):
        document = run_json('oplus', '--measure', 'kl:0.3', '0', '1')
        self.assertIn('closed_published', document['result'])
        self.assertLessEqual(document['defects']['closed_gap'], 1e-6)

    def test_infinity_argument(self):
        document = run_json('oplus', '--measure', 'renyi:0.5', 'inf', '1.5')
        self.assertEqual(document['result']['value'], 1.5)
        self.assertEqual(document['inputs']['x'], 'inf')

    def test_deformed(self):
        document = run_json('oplus', '--measure', 'tsallis:0.5', '--deform', '0.5', '0', '0')
        self.assertAlmostEqual(document['result']['value'], 2.0 - math.sqrt(8.0), places=7)
        self.assertNotIn('closed', document['result'])


class ExitCodeTest(SimpleTestCase):
    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as caught:
            run(*args)
        self.assertEqual(caught.exception.returncode, code)

    def test_invalid_measure(self):
        self.assertExitCode(1, 'oplus', '--measure', 'kl:1.5', '0', '1')
        self.assertExitCode(1, 'oplus', '--measure', 'gini', '0', '1')

    def test_invalid_arguments(self):
        self.assertExitCode(1, 'oplus', '--measure', 'shannon', '--T', '-1', '0', '1')
        self.assertExitCode(1, 'tree_eval', '--measure', 'shannon', '--tree', '(1 1)', '--xs', '0,0')
        self.assertExitCode(1, 'tree_eval', '--measure', 'shannon', '--tree', '(1 2)', '--xs', '0,a')
        self.assertExitCode(1, 'cantor', '--prefix', '0000', '--x', '0', '--y', '1')
        self.assertExitCode(1, 'multifractal', '--q', '2', '--p', '0.5', '--l1', '0.3', '--l2', '0.3')

    def test_usage_errors(self):
        self.assertExitCode(1, 'oplus', '--measure', 'shannon', '--bogus', '0', '1')
        self.assertExitCode(1, 'defect', '--measure', 'shannon', '--kind', 'sideways')
        self.assertExitCode(1, 'entropy', '--measure', 'shannon')

    def test_unknown_command(self):
        self.assertExitCode(1, 'no_such_command')

    def test_solver_failure_is_a_numeric_error(self):
        self.assertExitCode(2, 'oplus', '--measure', 'shannon', '--refine-iters', '1', '0', '1')


class SuccessorCurveCommandTest(SimpleTestCase):
    ARGS = ('successor_curve', '--measure', 'shannon', '--T', '1', '--xmin', '-5', '--xmax', '5', '--step', '0.01')

    def test_shannon_curve_csv(self):
        lines = run(*self.ARGS).splitlines()
        self.assertEqual(lines[0], 'x,lambda,argmin_p')
        self.assertEqual(len(lines), 1002)
        x, value, p = (float(cell) for cell in lines[501].split(','))
        self.assertAlmostEqual(x, 0.0, places=12)
        self.assertAlmostEqual(value, -0.693147, places=6)
        self.assertAlmostEqual(p, 0.5, places=6)

    def test_output_is_byte_identical(self):
        self.assertEqual(run(*self.ARGS), run(*self.ARGS))

    def test_writes_to_file(self):
        with tempfile.TemporaryDirectory() as directory:
            target = Path(directory) / 'curve.csv'
            self.assertEqual(run(*self.ARGS, '--out', str(target)), '')
            self.assertEqual(len(target.read_text().splitlines()), 1002)


class DefectCommandTest(SimpleTestCase):
    def test_renyi_associativity_witness(self):
        document = run_json('defect', '--kind', 'assoc', '--measure', 'renyi:0.5', '--T', '1',
                            '--samples', '200', '--seed', '0')
        self.assertGreater(document['result']['max_defect'], 1e-3)
        self.assertEqual(len(document['result']['witness']), 3)
        self.assertEqual(document['inputs']['seed'], 0)

    @override_settings(SEMIRINGS_DEFAULT_SEED=0)
    def test_seed_defaults_from_settings(self):
        implicit = run('defect', '--kind', 'comm', '--measure', 'kl:0.3', '--samples', '20')
        explicit = run('defect', '--kind', 'comm', '--measure', 'kl:0.3', '--samples', '20', '--seed', '0')
        self.assertEqual(implicit, explicit)

    def test_kl_forms(self):
        document = run_json('defect', '--kind', 'kl-forms', '--measure', 'kl:0.3', '--samples', '50')
        self.assertEqual(document['result']['oracle_match'], 'variational')


class TreeEvalCommandTest(SimpleTestCase):
    def test_against_oracle(self):
        document = run_json('tree_eval', '--measure', 'shannon', '--T', '1', '--tree', '((1 2) 3)',
                            '--xs', '0,0,0', '--oracle')
        self.assertAlmostEqual(document['result']['value'], -1.098612, places=6)
        self.assertLessEqual(document['result']['defect'], 2e-3)
        self.assertEqual(document['inputs']['n'], 3)


class OtherCommandTest(SimpleTestCase):
    def test_entropy_vector(self):
        document = run_json('entropy', '--measure', 'shannon', '--probs', '0.25,0.25,0.5')
        self.assertAlmostEqual(document['result']['chain'], 1.5 * math.log(2), places=12)
        self.assertAlmostEqual(document['result']['direct'], 1.5 * math.log(2), places=12)
        document = run_json('entropy', '--measure', 'kl:0.3', '--probs', '0.5,0.5')
        self.assertIsNone(document['result']['direct'])

    def test_axioms(self):
        document = run_json('axioms', '--measure', 'tsallis:2')
        self.assertTrue(document['result']['passed']['alpha_associativity'])
        self.assertFalse(document['result']['passed']['associativity'])

    def test_cantor(self):
        document = run_json('cantor', '--prefix', '010110', '--T', '1', '--x', '0.3', '--y', '1.7')
        self.assertEqual(document['result']['q'], 0.5)
        self.assertLessEqual(document['defects']['comm_defect'], 1e-8)

    def test_multifractal(self):
        document = run_json('multifractal', '--q', '0.5', '--p', '0.5', '--l1', '0.5', '--l2', '0.5')
        self.assertAlmostEqual(document['result']['local_dim'], 1.0, places=12)

    def test_legendre_biconjugate(self):
        document = run_json('legendre', '--negentropy', 'shannon', '--grid-step', '0.01', '--dual-step', '0.01',
                            '--biconjugate', '--format', 'json')
        self.assertLessEqual(document['defects']['max_gap'], 2e-3)
        self.assertLessEqual(document['defects']['max_excess'], 1e-12)
        self.assertEqual(len(document['result']['values']), 101)

    def test_legendre_reads_csv(self):
        with tempfile.TemporaryDirectory() as directory:
            source = Path(directory) / 'f.csv'
            source.write_text('x,f\n-1,2\n0,1\n1,2\n')
            lines = run('legendre', '--input', str(source), '--dual-min', '-2', '--dual-max', '2',
                        '--dual-step', '2').splitlines()
        self.assertEqual(lines, ['x,f', '-2.0,0.0', '0.0,-1.0', '2.0,0.0'])

    def test_legendre_missing_file(self):
        with self.assertRaises(CommandError) as caught:
            run('legendre', '--input', '/nonexistent/f.csv')
        self.assertEqual(caught.exception.returncode, 1)
