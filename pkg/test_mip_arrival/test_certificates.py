import itertools
import unittest

from mip_arrival.certificates import (check_minimality, complement, count_candidates, enumerate_switching_flows,
                                      fresh_vertex_name, verify_switching_flow)
from mip_arrival.constants import ViolationKinds
from mip_arrival.data_bridge import parse_flow
from mip_arrival.generators import gen_counter, gen_random, gen_trap, gen_zigzag
from mip_arrival.run_engine import decide, initial_state, simulate, step
from mip_arrival.switch_graph import Edge, Flow, Instance
from mip_arrival.utils import BudgetExhaustedError, EnumerationBudgetError, NonEdgeError
from test_mip_arrival import utils

ZIGZAG_PROFILE = Flow({('o', 'w'): 1, ('w', 'u'): 1, ('u', 'w'): 1, ('w', 'd'): 1})
ZIGZAG_FAKE = Flow({('o', 'w'): 1, ('w', 'u'): 2, ('u', 'w'): 2, ('w', 'd'): 1})


class TestVerify(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.direct = utils.read_instance('direct.json')
        cls.zigzag = utils.read_instance('zigzag.json')

    def test_1_direct(self):
        verdict = verify_switching_flow(self.direct, Flow({('o', 'd'): 1}))
        self.assertTrue(verdict.valid)
        self.assertEqual(verdict.violations, [])

    def test_2_fake_zigzag_flow(self):
        flow = parse_flow(utils.read_text('zigzag_fake_flow.json'), self.zigzag)
        self.assertEqual(flow, ZIGZAG_FAKE)
        self.assertTrue(verify_switching_flow(self.zigzag, flow).valid)

    def test_3_unbalanced_zigzag_flow(self):
        flow = parse_flow(utils.read_text('zigzag_unbalanced_flow.json'), self.zigzag)
        verdict = verify_switching_flow(self.zigzag, flow)
        self.assertFalse(verdict.valid)
        self.assertEqual([(v.kind, v.vertex) for v in verdict.violations], [(ViolationKinds.BALANCE, 'w')])

    def test_4_trap_has_no_switching_flow(self):
        trap = gen_trap()
        for value in range(4):
            verdict = verify_switching_flow(trap, Flow({('o', 't'): value, ('t', 't'): value}))
            self.assertFalse(verdict.valid)
            self.assertIn(ViolationKinds.CONSERVATION, [v.kind for v in verdict.violations])

    def test_5_non_edge_is_an_input_error(self):
        with self.assertRaises(NonEdgeError):
            verify_switching_flow(self.direct, Flow({('d', 'o'): 1}))

    def test_6_large_values_are_flagged(self):
        verdict = verify_switching_flow(self.direct, Flow({('o', 'd'): 1, ('d', 'd'): 9}))
        self.assertTrue(verdict.valid)
        self.assertEqual(len(verdict.warnings), 1)
        self.assertIn('d->d', verdict.warnings[0])


class TestComplement(unittest.TestCase):

    def test_1_trap(self):
        trap = gen_trap()
        result = complement(trap)
        self.assertEqual(result.vertices, ('o', 't', 'd', 'd_bar'))
        self.assertEqual(result.destination, 'd_bar')
        self.assertEqual(result.successors('o'), ('d_bar', 'd_bar'))
        self.assertEqual(result.successors('t'), ('d_bar', 'd_bar'))
        decision = decide(result)
        self.assertTrue(decision.terminates)
        self.assertEqual(decision.steps, 1)

    def test_2_direct(self):
        result = complement(utils.read_instance('direct.json'))
        self.assertEqual(result.successors('d'), ('d', 'd'))
        self.assertEqual(result.successors('d_bar'), ('d_bar', 'd_bar'))
        decision = decide(result)
        self.assertFalse(decision.terminates)
        self.assertEqual(decision.dead_end, 'o')
        self.assertEqual(decision.steps, 0)

    def test_3_counter(self):
        self.assertTrue(decide(gen_counter(2)).terminates)
        self.assertFalse(decide(complement(gen_counter(2))).terminates)

    def test_4_fresh_name(self):
        instance = Instance(vertices=['o', 'd_bar', 'd'],
                            even={'o': 'd_bar', 'd_bar': 'd_bar', 'd': 'd'},
                            odd={'o': 'd', 'd_bar': 'd_bar', 'd': 'd'},
                            origin='o', destination='d')
        self.assertEqual(fresh_vertex_name(instance), "d_bar'")
        self.assertEqual(complement(instance).destination, "d_bar'")

    def test_5_exactly_one_terminates(self):
        for seed in range(1000):
            instance = gen_random(2 + seed % 7, seed)
            original = decide(instance)
            result = decide(complement(instance))
            self.assertNotEqual(original.terminates, result.terminates, f"seed {seed}")
            if not original.terminates:
                self.assertEqual(result.steps, original.steps + 1, f"seed {seed}")

    def test_6_complement_run_parks_at_the_old_destination(self):
        for seed in range(300):
            instance = gen_random(2 + seed % 7, seed)
            original = decide(instance)
            if not original.terminates:
                continue
            result = complement(instance)
            state = initial_state(result)
            for _ in range(original.steps):
                state = step(result, state)
            self.assertEqual(state.current, instance.destination, f"seed {seed}")
            self.assertEqual(step(result, state).current, instance.destination, f"seed {seed}")
            with self.assertRaises(BudgetExhaustedError):
                simulate(result, original.steps + 50)


class TestEnumeration(unittest.TestCase):

    def test_1_direct(self):
        flows = enumerate_switching_flows(utils.read_instance('direct.json'), cap=3)
        self.assertEqual(flows, [Flow({('o', 'd'): 1, ('d', 'd'): c}) for c in range(4)])

    def test_2_trap(self):
        self.assertEqual(enumerate_switching_flows(gen_trap(), cap=5), [])

    def test_3_zigzag(self):
        flows = enumerate_switching_flows(gen_zigzag(), cap=2)
        self.assertIn(ZIGZAG_PROFILE, flows)
        self.assertIn(ZIGZAG_FAKE, flows)
        self.assertTrue(ZIGZAG_FAKE.dominates(ZIGZAG_PROFILE))

    def test_4_matches_brute_force(self):
        for instance in [gen_zigzag(), utils.read_instance('gap.json'), gen_random(4, 7)]:
            cap = 2
            edges = instance.edges
            expected = []
            for vector in itertools.product(range(cap + 1), repeat=len(edges)):
                flow = Flow.from_vector(edges, vector)
                if verify_switching_flow(instance, flow).valid:
                    expected.append(flow)
            self.assertEqual(enumerate_switching_flows(instance, cap), expected)

    def test_5_budget(self):
        instance = gen_counter(3)
        self.assertGreater(count_candidates(instance, 10), 1000)
        with self.assertRaises(EnumerationBudgetError):
            enumerate_switching_flows(instance, 10, budget=10)

    def test_6_presolve_short_circuits(self):
        trap = gen_trap()
        self.assertGreater(count_candidates(trap, 1000), 10 ** 6)
        self.assertEqual(enumerate_switching_flows(trap, 1000, budget=1), [])

    def test_7_soundness(self):
        for seed in range(300):
            instance = gen_random(2 + seed % 3, seed)
            decision = decide(instance)
            cap = (decision.profile.max_value() if decision.terminates else 0) + 2
            for flow in enumerate_switching_flows(instance, cap):
                self.assertTrue(decision.terminates, f"seed {seed}")
                self.assertTrue(flow.dominates(decision.profile), f"seed {seed}")


class TestMinimality(unittest.TestCase):

    def test_1_direct(self):
        report = check_minimality(utils.read_instance('direct.json'), cap=3)
        self.assertTrue(report.confirmed)
        self.assertEqual(report.profile, Flow({('o', 'd'): 1}))
        self.assertEqual(report.flows_checked, 4)

    def test_2_zigzag(self):
        report = check_minimality(gen_zigzag(), cap=3)
        self.assertTrue(report.confirmed)
        self.assertEqual(report.profile, ZIGZAG_PROFILE)

    def test_3_counter(self):
        report = check_minimality(utils.read_instance('counter2.json'), cap=8)
        self.assertTrue(report.confirmed)
        self.assertEqual(report.profile[Edge('o', 'v1')], 4)

    def test_4_preconditions(self):
        with self.assertRaises(ValueError):
            check_minimality(gen_trap(), cap=3)
        with self.assertRaises(ValueError):
            check_minimality(utils.read_instance('counter2.json'), cap=2)


if __name__ == '__main__':
    unittest.main()
