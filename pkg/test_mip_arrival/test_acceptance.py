"""
Slow differential checks over a large seeded corpus of random instances.

The corpus size is read from the MIP_ARRIVAL_FUZZ_SEEDS environment variable (default 10000); set it lower for a
quick pass.
"""
import os
import unittest
from collections import Counter
from fractions import Fraction

from mip_arrival.certificates import check_minimality, complement, count_candidates, enumerate_switching_flows
from mip_arrival.cli import fuzz_one
from mip_arrival.constants import SearchModes
from mip_arrival.generators import gen_counter, gen_direct, gen_gap, gen_random, gen_trap, gen_zigzag
from mip_arrival.relaxation import RationalPoint, build_constraints, check_point, gap_search
from mip_arrival.run_engine import decide, oracle_decide_staterep
from mip_arrival.utils import EnumerationBudgetError, state_bound
from test_mip_arrival.test_cli import run

SEEDS = int(os.environ.get('MIP_ARRIVAL_FUZZ_SEEDS', 10_000))
ENUMERATION_LIMIT = 20_000
SEARCH_BUDGET = 100_000


def corpus(max_n=8):
    for seed in range(SEEDS):
        yield seed, gen_random(2 + seed % (max_n - 1), seed)


class TestAcceptance(unittest.TestCase):

    def test_1_counter_steps(self):
        for n in range(1, 21):
            self.assertEqual(decide(gen_counter(n)).steps, 3 * 2 ** n - 2, f"n={n}")

    def test_2_state_repetition_oracle(self):
        for seed in range(1000):
            instance = gen_random(10, seed)
            decision = oracle_decide_staterep(instance)
            self.assertEqual(decision.outcome, decide(instance).outcome, f"seed {seed}")
            self.assertLessEqual(decision.transitions, state_bound(instance.n))

    def test_3_soundness_and_completeness(self):
        seen, skipped = Counter(), Counter()
        for seed, instance in corpus():
            decision = decide(instance)
            cap = (decision.profile.max_value() if decision.terminates else 0) + 2
            seen[instance.n] += 1
            try:
                flows = enumerate_switching_flows(instance, cap, budget=SEARCH_BUDGET)
            except EnumerationBudgetError:
                skipped[instance.n] += 1
                continue
            if decision.terminates:
                self.assertIn(decision.profile, flows, f"seed {seed}")
            for flow in flows:
                self.assertTrue(decision.terminates, f"seed {seed}")
                self.assertTrue(flow.dominates(decision.profile), f"seed {seed}")
        for n, total in seen.items():
            self.assertLessEqual(skipped[n] * 10, total, f"n={n}: {skipped[n]} of {total} instances over budget")

    def test_4_fuzz_properties(self):
        for seed in range(SEEDS):
            _, failures = fuzz_one(2 + seed % 7, seed)
            self.assertEqual(failures, [], f"seed {seed}")

    def test_5_complement_over_named_instances(self):
        named = [gen_direct(), gen_trap(), gen_zigzag(), gen_gap()] + [gen_counter(n) for n in range(1, 7)]
        for instance in named:
            self.assertNotEqual(decide(instance).terminates, decide(complement(instance)).terminates)

    def test_6_minimality(self):
        for seed, instance in corpus():
            if len(instance.edges) > 6:
                continue
            decision = decide(instance)
            if not decision.terminates:
                continue
            cap = decision.profile.max_value() + 1
            if count_candidates(instance, cap) > ENUMERATION_LIMIT:
                continue
            report = check_minimality(instance, cap)
            self.assertTrue(report.confirmed, f"seed {seed}: {report.reason}")

    def test_7_integral_relaxation_points_on_terminating_runs(self):
        for seed, instance in corpus():
            decision = decide(instance)
            if decision.terminates:
                point = RationalPoint({e: Fraction(v) for e, v in decision.profile.values.items()})
                self.assertTrue(check_point(build_constraints(instance), point).feasible, f"seed {seed}")

    def test_8_exhaustive_gap_search(self):
        result = gap_search(8, mode=SearchModes.EXHAUSTIVE)
        self.assertTrue(result.found)
        self.assertLessEqual(result.instance.n, 5)
        self.assertFalse(decide(result.instance).terminates)
        self.assertTrue(check_point(build_constraints(result.instance), result.point).feasible)

    def test_9_cli_determinism(self):
        for argv in (['gen', 'random', '--n', '9', '--seed', '11'],
                     ['fuzz', '--count', '300', '--n', '8', '--seed', '17'],
                     ['gap-search', '--n', '5']):
            self.assertEqual(run(argv), run(argv))


if __name__ == '__main__':
    unittest.main()
