import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

from mip_arrival.cli import main
from mip_arrival.constants import ExitCodes
from mip_arrival.data_bridge import parse_instance, serialize_instance
from mip_arrival.generators import gen_counter
from test_mip_arrival import utils


def run(argv, stdin=''):
    """Runs the command line; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with mock.patch('sys.stdin', io.StringIO(stdin)), redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def doc(name):
    return utils.data_path('documents', name)


class TestDecide(unittest.TestCase):

    def test_1_trap(self):
        code, out, _ = run(['decide', doc('trap.json')])
        self.assertEqual(code, ExitCodes.OK)
        self.assertEqual(out, "NO dead_end=o steps=0\n")

    def test_2_pipe_from_gen(self):
        _, generated, _ = run(['gen', 'counter', '--n', '3'])
        self.assertEqual(parse_instance(generated), gen_counter(3))
        code, out, _ = run(['decide', '-'], stdin=generated)
        self.assertEqual(code, ExitCodes.OK)
        self.assertEqual(out, "YES steps=22\n")

    def test_3_file_and_pipe_agree(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'counter.json')
            run(['gen', 'counter', '--n', '4', '--out', path])
            _, from_file, _ = run(['decide', path])
        _, generated, _ = run(['gen', 'counter', '--n', '4'])
        _, from_pipe, _ = run(['decide', '-'], stdin=generated)
        self.assertEqual(from_file, from_pipe)

    def test_4_complement_flips_the_answer(self):
        _, complemented, _ = run(['complement', doc('direct.json')])
        _, out, _ = run(['decide', '-'], stdin=complemented)
        self.assertTrue(out.startswith('NO '))
        _, out, _ = run(['decide', doc('direct.json')])
        self.assertTrue(out.startswith('YES '))

    def test_5_oracles_agree(self):
        for name in ('direct.json', 'trap.json', 'zigzag.json', 'counter2.json', 'gap.json'):
            _, dead_end, _ = run(['decide', doc(name)])
            _, staterep, _ = run(['decide', '--oracle', 'staterep', doc(name)])
            self.assertEqual(dead_end, staterep)

    def test_6_budgets(self):
        code, _, err = run(['simulate', '--max-steps', '50', doc('trap.json')])
        self.assertEqual(code, ExitCodes.BUDGET_EXHAUSTED)
        self.assertIn('budget exhausted', err)
        code, out, _ = run(['simulate', '--max-steps', '50', doc('zigzag.json')])
        self.assertEqual((code, out), (ExitCodes.OK, "YES steps=4\n"))
        code, _, _ = run(['decide', '--max-steps', '3', doc('counter2.json')])
        self.assertEqual(code, ExitCodes.BUDGET_EXHAUSTED)
        code, _, _ = run(['decide', '--oracle', 'staterep', '--max-steps', '3', doc('counter2.json')])
        self.assertEqual(code, ExitCodes.BUDGET_EXHAUSTED)
        code, out, _ = run(['decide', '--oracle', 'staterep', '--max-steps', '100', doc('counter2.json')])
        self.assertEqual((code, out), (ExitCodes.OK, "YES steps=10\n"))

    def test_7_state_cap(self):
        code, _, err = run(['decide', '--oracle', 'staterep', '-'], stdin=serialize_instance(gen_counter(28)))
        self.assertEqual(code, ExitCodes.TOO_LARGE)

    def test_8_malformed_document(self):
        code, _, err = run(['decide', '-'], stdin='{"vertices": ["o"]}')
        self.assertEqual(code, ExitCodes.BAD_DOCUMENT)
        self.assertIn('even', err)

    def test_9_usage_errors(self):
        with redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as cm:
            main(['teleport', doc('trap.json')])
        self.assertEqual(cm.exception.code, ExitCodes.USAGE)
        with redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as cm:
            main(['simulate', doc('trap.json')])
        self.assertEqual(cm.exception.code, ExitCodes.USAGE)


class TestCertificates(unittest.TestCase):

    def test_1_profile_then_verify(self):
        with tempfile.TemporaryDirectory() as tmp:
            flow = os.path.join(tmp, 'profile.json')
            code, _, _ = run(['profile', doc('zigzag.json'), '--out', flow])
            self.assertEqual(code, ExitCodes.OK)
            with open(flow) as f:
                self.assertEqual(json.load(f)['edges'], {'o->w': '1', 'w->u': '1', 'w->d': '1', 'u->w': '1',
                                                         'd->d': '0'})
            code, out, _ = run(['verify-flow', doc('zigzag.json'), flow])
        self.assertEqual((code, out), (ExitCodes.OK, "VALID\n"))

    def test_2_invalid_flow(self):
        with tempfile.TemporaryDirectory() as tmp:
            verdict_path = os.path.join(tmp, 'verdict.json')
            code, out, _ = run(['verify-flow', doc('zigzag.json'), doc('zigzag_unbalanced_flow.json'),
                                '--out', verdict_path])
            with open(verdict_path) as f:
                verdict = json.load(f)
        self.assertEqual(code, ExitCodes.OK)
        self.assertTrue(out.startswith("INVALID\nBALANCE at w: "))
        self.assertFalse(verdict['valid'])
        self.assertEqual(verdict['violations'][0]['vertex'], 'w')

    def test_3_non_edge(self):
        code, _, _ = run(['verify-flow', doc('direct.json'), '-'], stdin='{"edges": {"d->o": "1"}}')
        self.assertEqual(code, ExitCodes.BAD_DOCUMENT)

    def test_4_minimality(self):
        code, out, _ = run(['minimality', doc('counter2.json'), '--cap', '8'])
        self.assertEqual(code, ExitCodes.OK)
        self.assertTrue(out.startswith('CONFIRMED flows='))

    def test_5_analyze_and_dot(self):
        _, out, _ = run(['analyze', doc('trap.json')])
        self.assertEqual(json.loads(out)['dead'], ['o', 't'])
        _, out, _ = run(['export-dot', doc('zigzag.json')])
        self.assertIn('"w" -> "d" [style=dashed];', out)

    def test_6_profile_tables(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, _, _ = run(['profile', doc('counter2.json'), '--out', os.path.join(tmp, 'p.json'),
                              '--tables', os.path.join(tmp, 'tables')])
            self.assertEqual(code, ExitCodes.OK)
            self.assertTrue(os.path.exists(os.path.join(tmp, 'tables', 'profile.csv')))
            self.assertTrue(os.path.exists(os.path.join(tmp, 'tables', 'kpis.csv')))


class TestRelaxation(unittest.TestCase):

    def test_1_relax(self):
        self.assertEqual(run(['relax', doc('trap.json')])[1], "INFEASIBLE\n")
        with tempfile.TemporaryDirectory() as tmp:
            witness = os.path.join(tmp, 'witness.json')
            code, out, _ = run(['relax', doc('gap.json'), '--out', witness])
            self.assertEqual((code, out), (ExitCodes.OK, "FEASIBLE\n"))
            code, out, _ = run(['relax', doc('gap.json'), '--point', witness])
            self.assertEqual(out, "FEASIBLE\n")

    def test_2_point(self):
        code, out, _ = run(['relax', doc('gap.json'), '--point', doc('gap_point.json')])
        self.assertEqual((code, out), (ExitCodes.OK, "FEASIBLE\n"))
        code, _, _ = run(['relax', doc('gap.json'), '--point', '-'], stdin='{"edges": {"o->a": "1/0"}}')
        self.assertEqual(code, ExitCodes.BAD_DOCUMENT)

    def test_3_gap_search(self):
        self.assertEqual(run(['gap-search', '--n', '2'])[1].split()[0], 'NOT_FOUND')
        code, out, _ = run(['gap-search', '--n', '5'])
        self.assertEqual(code, ExitCodes.OK)
        bundle = json.loads(out)
        self.assertEqual(set(bundle), {'instance', 'point'})

    def test_4_ip(self):
        code, out, _ = run(['ip', doc('counter2.json')])
        self.assertEqual((code, out), (ExitCodes.OK, "OPTIMAL total=10\n"))
        code, out, _ = run(['ip', doc('gap.json')])
        self.assertFalse(out.startswith('OPTIMAL'))
        code, out, _ = run(['ip', '--relax', doc('gap.json')])
        self.assertTrue(out.startswith('OPTIMAL total='))


class TestDeterminism(unittest.TestCase):

    def test_1_repeated_runs_are_identical(self):
        commands = [
            ['decide', doc('counter2.json')],
            ['analyze', doc('gap.json')],
            ['complement', doc('zigzag.json')],
            ['export-dot', doc('counter2.json')],
            ['gen', 'random', '--n', '7', '--seed', '42'],
            ['relax', doc('gap.json')],
            ['gap-search', '--n', '6', '--mode', 'seeded-random', '--budget', '300', '--seed', '5'],
            ['fuzz', '--count', '50', '--n', '6', '--seed', '3'],
        ]
        for argv in commands:
            self.assertEqual(run(argv), run(argv), ' '.join(argv))

    def test_3_logging_follows_each_call(self):
        for _ in range(2):
            _, out, err = run(['-v', 'decide', doc('counter2.json')])
            self.assertEqual(out, "YES steps=10\n")
            self.assertIn('Run terminates after 10 steps', err)

    def test_2_fuzz(self):
        code, out, _ = run(['fuzz', '--count', '200', '--n', '7'])
        self.assertEqual(code, ExitCodes.OK)
        self.assertTrue(out.strip().endswith('failures=0'))
        self.assertEqual(run(['fuzz', '--count', '40', '--n', '5', '--workers', '2'])[1],
                         run(['fuzz', '--count', '40', '--n', '5'])[1])


if __name__ == '__main__':
    unittest.main()
