"""
Exact-rational relaxation of the switching-flow constraints.

The integral switching flows are the nonnegative integer solutions of

    sum_{e in E+(v)} x_e - sum_{e in E-(v)} x_e = +1 (v = o), -1 (v = d), 0 (otherwise)    for every vertex v
    0 <= x(v, s1(v)) <= x(v, s0(v)) <= x(v, s1(v)) + 1                                   for every switch v

Dropping integrality gives a polyhedron that may be nonempty although the run cycles: the integrality gap. This
module decides feasibility of the relaxation exactly (fractions, no tolerance) by equality substitution followed by
Fourier-Motzkin elimination, and searches small instances for gap witnesses.
"""

import itertools
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from mip_arrival.constants import Defaults, SearchModes
from mip_arrival.generators import gen_random
from mip_arrival.run_engine import decide
from mip_arrival.switch_graph import Edge, Instance, analyze
from mip_arrival.utils import DimensionMismatchError, EliminationTooLargeError

logger = logging.getLogger(__name__)


class LinearConstraint(NamedTuple):
    """sum_j coefficients[j] * x_j (= or <=) constant."""
    coefficients: Tuple[Fraction, ...]
    constant: Fraction
    label: str


@dataclass(frozen=True)
class ConstraintSystem:
    """
    Attributes
    ----------
    variables : tuple of Edge
        One variable per edge, in instance.edges order.
    equalities : tuple of LinearConstraint
        Flow conservation, one per vertex.
    inequalities : tuple of LinearConstraint
        For a switch v: -x_odd <= 0, x_odd - x_even <= 0 and x_even - x_odd <= 1. For a vertex with a single
        out-edge e: -x_e <= 0.
    """
    variables: Tuple[Edge, ...]
    equalities: Tuple[LinearConstraint, ...]
    inequalities: Tuple[LinearConstraint, ...]


@dataclass(frozen=True)
class RationalPoint:
    """Exact rational value per edge; absent edges mean 0."""
    values: Mapping[Edge, Fraction] = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', {Edge(*e): Fraction(value) for e, value in self.values.items()})

    def __getitem__(self, edge) -> Fraction:
        return self.values.get(edge, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def is_integral(self) -> bool:
        return all(value.denominator == 1 for value in self.values.values())


class PointCheck(NamedTuple):
    feasible: bool
    violations: List[str]


class Feasibility(NamedTuple):
    feasible: bool
    witness: Optional[RationalPoint]


class Presolve(NamedTuple):
    """Edges forced to zero in every real solution, and whether that alone proves infeasibility."""
    zero_edges: FrozenSet[Edge]
    infeasible: bool


@dataclass(frozen=True)
class GapSearchResult:
    found: bool
    examined: int
    instance: Optional[Instance] = None
    point: Optional[RationalPoint] = None


def build_constraints(instance: Instance) -> ConstraintSystem:
    """
    Builds the constraint system over the rationals. A loop edge (v, v) gets coefficient +1 - 1 = 0 in the
    conservation equality of v.
    """
    variables = instance.edges
    position = {e: j for j, e in enumerate(variables)}
    zero = Fraction(0)
    rows = {v: [zero] * len(variables) for v in instance.vertices}
    for edge in variables:
        rows[edge.tail][position[edge]] += 1
        rows[edge.head][position[edge]] -= 1
    equalities = tuple(LinearConstraint(tuple(rows[v]), Fraction(instance.supply(v)), f"conservation at {v}")
                       for v in instance.vertices)

    def row(terms):
        coefficients = [zero] * len(variables)
        for edge, coefficient in terms:
            coefficients[position[edge]] += coefficient
        return tuple(coefficients)

    inequalities = []
    for v in instance.vertices:
        if instance.is_switch(v):
            e_even, e_odd = Edge(v, instance.even[v]), Edge(v, instance.odd[v])
            inequalities.append(LinearConstraint(row([(e_odd, -1)]), zero, f"0 <= x(odd) at {v}"))
            inequalities.append(LinearConstraint(row([(e_odd, 1), (e_even, -1)]), zero, f"x(odd) <= x(even) at {v}"))
            inequalities.append(LinearConstraint(row([(e_even, 1), (e_odd, -1)]), Fraction(1),
                                                 f"x(even) <= x(odd) + 1 at {v}"))
        else:
            e = Edge(v, instance.even[v])
            inequalities.append(LinearConstraint(row([(e, -1)]), zero, f"0 <= x({e.key()})"))
    return ConstraintSystem(variables=variables, equalities=equalities, inequalities=tuple(inequalities))


def check_point(system: ConstraintSystem, point: RationalPoint) -> PointCheck:
    """
    Evaluates every constraint exactly at `point`.

    Raises
    ------
    DimensionMismatchError
        If the point has a value for something that is not a variable of the system.
    """
    known = set(system.variables)
    for edge in point.values:
        if edge not in known:
            raise DimensionMismatchError(f"{edge.key()} is not a variable of the constraint system")
    x = [point[e] for e in system.variables]
    violations = []
    for constraint in system.equalities:
        lhs = sum((a * xj for a, xj in zip(constraint.coefficients, x) if a), Fraction(0))
        if lhs != constraint.constant:
            violations.append(f"{constraint.label}: {lhs} != {constraint.constant}")
    for constraint in system.inequalities:
        lhs = sum((a * xj for a, xj in zip(constraint.coefficients, x) if a), Fraction(0))
        if lhs > constraint.constant:
            violations.append(f"{constraint.label}: {lhs} > {constraint.constant}")
    return PointCheck(feasible=not violations, violations=violations)


def _normalize(row: List[Fraction]) -> Optional[Tuple[Fraction, ...]]:
    """Scales an inequality row so that its first nonzero coefficient is +-1; None for a row without variables."""
    for a in row[:-1]:
        if a:
            scale = abs(a)
            return tuple(value / scale for value in row)
    return None


def _popcount(mask: int) -> int:
    return bin(mask).count('1')


def _cleanup(rows, max_ancestors: int):
    """
    Drops trivial rows, duplicates and rows derived from more than `max_ancestors` input inequalities.

    Rows come as (coefficients + [constant], ancestors) where ancestors is the bitmask of the input inequalities the
    row combines. After t eliminations a row with more than t + 1 ancestors is implied by the others. Among
    duplicates the row with the fewest ancestors is kept. Returns None when a trivial row reads 0 <= c with c < 0.
    """
    kept = {}
    for row, ancestors in rows:
        if _popcount(ancestors) > max_ancestors:
            continue
        normalized = _normalize(row)
        if normalized is None:
            if row[-1] < 0:
                return None
            continue
        previous = kept.get(normalized)
        if previous is None or _popcount(ancestors) < _popcount(previous):
            kept[normalized] = ancestors
    return [(list(row), ancestors) for row, ancestors in kept.items()]


def feasible(system: ConstraintSystem, order: Optional[Sequence[Edge]] = None,
             max_variables: int = Defaults.MAX_ELIMINATION_VARIABLES,
             max_rows: int = Defaults.MAX_ELIMINATION_ROWS,
             fixed_zero: Iterable[Edge] = ()) -> Feasibility:
    """
    Decides whether the relaxation has a real solution, and returns an exact rational witness if it does.

    Equalities are used first to substitute one variable each; the remaining variables are removed by
    Fourier-Motzkin elimination, pruning redundant rows by counting the input inequalities each row combines. A
    witness is then rebuilt by back-substitution, taking the smallest value allowed for each variable.

    Parameters
    ----------
    system : ConstraintSystem
    order : sequence of Edge, optional
        Preferred order of the variables, for pivots and eliminations. By default pivots follow the variable order
        and eliminations pick the variable producing the fewest new rows.
    max_variables : int
        Cap on the variables left for Fourier-Motzkin after substitution.
    max_rows : int
        Cap on the constraint rows one elimination step may combine.
    fixed_zero : iterable of Edge
        Variables set to 0 before eliminating. The answer is then about the system restricted to x_e = 0 on them.

    Raises
    ------
    EliminationTooLargeError
        If either cap is exceeded ("instance too large"); this is not an infeasibility verdict.
    """
    m = len(system.variables)
    position = {e: j for j, e in enumerate(system.variables)}
    if order is None:
        preference = list(range(m))
    else:
        preference = [position[Edge(*e)] for e in order]
        if sorted(preference) != list(range(m)):
            raise ValueError("order must be a permutation of the system variables")

    equalities = [list(c.coefficients) + [c.constant] for c in system.equalities]
    for edge in fixed_zero:
        row = [Fraction(0)] * (m + 1)
        row[position[Edge(*edge)]] = Fraction(1)
        equalities.insert(0, row)
    inequalities = [list(c.coefficients) + [c.constant] for c in system.inequalities]

    # substitute one variable per equality: x_p = const + sum_j expr[j] * x_j
    substitutions = []
    while equalities:
        row = equalities.pop(0)
        pivot = next((j for j in preference if row[j]), None)
        if pivot is None:
            if row[-1]:
                return Feasibility(False, None)
            continue
        a_p = row[pivot]
        expr = [-row[j] / a_p for j in range(m)]
        expr[pivot] = Fraction(0)
        const = row[-1] / a_p
        substitutions.append((pivot, expr, const))
        for rows in (equalities, inequalities):
            for r in rows:
                coefficient = r[pivot]
                if coefficient:
                    for j in range(m):
                        r[j] += coefficient * expr[j]
                    r[pivot] = Fraction(0)
                    r[-1] -= coefficient * const

    pivots = {p for p, _, _ in substitutions}
    remaining = [j for j in preference if j not in pivots]
    if len(remaining) > max_variables:
        raise EliminationTooLargeError(
            f"instance too large: {len(remaining)} variables to eliminate, above the cap of {max_variables}")

    rows = _cleanup([(r, 1 << i) for i, r in enumerate(inequalities)], max_ancestors=1)
    if rows is None:
        return Feasibility(False, None)

    history = []
    while remaining:
        if order is None:
            def growth(j):
                pos = sum(1 for r, _ in rows if r[j] > 0)
                neg = sum(1 for r, _ in rows if r[j] < 0)
                return pos * neg - pos - neg
            j = min(remaining, key=lambda k: (growth(k), k))
        else:
            j = remaining[0]
        remaining.remove(j)
        pos = [(r, h) for r, h in rows if r[j] > 0]
        neg = [(r, h) for r, h in rows if r[j] < 0]
        combined = [(r, h) for r, h in rows if not r[j]]
        if len(combined) + len(pos) * len(neg) > max_rows:
            raise EliminationTooLargeError(
                f"instance too large: {len(combined) + len(pos) * len(neg)} constraint rows during elimination")
        for p, hp in pos:
            for q, hq in neg:
                combined.append(([-q[j] * a + p[j] * b for a, b in zip(p, q)], hp | hq))
        history.append((j, [r for r, _ in pos], [r for r, _ in neg]))
        rows = _cleanup(combined, max_ancestors=len(history) + 1)
        if rows is None:
            return Feasibility(False, None)

    values = [Fraction(0)] * m
    for j, pos, neg in reversed(history):
        def bound(r):
            rest = sum((r[k] * values[k] for k in range(m) if k != j and r[k]), Fraction(0))
            return (r[-1] - rest) / r[j]
        upper = min((bound(r) for r in pos), default=None)
        lower = max((bound(r) for r in neg), default=None)
        if lower is not None:
            values[j] = lower
        elif upper is not None:
            values[j] = min(upper, Fraction(0))
    for pivot, expr, const in reversed(substitutions):
        values[pivot] = const + sum((a * values[k] for k, a in enumerate(expr) if a), Fraction(0))

    witness = RationalPoint(dict(zip(system.variables, values)))
    check = check_point(system, witness)
    if not check.feasible:
        raise RuntimeError(f"back-substitution produced an infeasible point: {check.violations}")
    return Feasibility(True, witness)


def forced_zero_edges(instance: Instance) -> Presolve:
    """
    Collects edges that carry zero in every real solution.

    The dead ends form a closed set with no supply unless o is one of them, so nothing enters it from outside. A
    live vertex whose even (or unique) edge carries zero sends nothing, so its in-edges carry zero too; a live vertex
    other than o whose in-edges all carry zero sends nothing. The relaxation is infeasible if o is dead, if o is
    forced to send nothing, or if nothing can enter d.

    Edges leaving a dead end are never reported: a circulation inside the dead set is compatible with every
    constraint.
    """
    report = analyze(instance)
    in_edges = {v: [] for v in instance.vertices}
    for edge in instance.edges:
        in_edges[edge.head].append(edge)
    zero = {e for e in instance.edges if e.head in report.dead and e.tail not in report.dead}
    silent = set()
    changed = True
    while changed:
        changed = False
        for v in instance.vertices:
            if v in silent or v in report.dead or v == instance.destination:
                continue
            starved = v != instance.origin and all(e in zero for e in in_edges[v])
            if Edge(v, instance.even[v]) in zero or starved:
                silent.add(v)
                zero.update(instance.out_edges(v))
                zero.update(in_edges[v])
                changed = True
    infeasible = (instance.origin in report.dead or instance.origin in silent
                  or all(e in zero for e in in_edges[instance.destination]))
    return Presolve(zero_edges=frozenset(zero), infeasible=infeasible)


def decide_relaxation(instance: Instance, max_variables: int = Defaults.MAX_ELIMINATION_VARIABLES,
                      max_rows: int = Defaults.MAX_ELIMINATION_ROWS) -> Feasibility:
    """
    Feasibility of the relaxation of `instance`, with the presolve applied first.

    The forced zeros are fixed before eliminating, and so are the edges leaving dead ends: once nothing enters the
    dead set, zeroing every edge inside it keeps a solution a solution. The witness is checked against the full
    system.
    """
    presolve = forced_zero_edges(instance)
    if presolve.infeasible:
        logger.info("Relaxation infeasible by presolve")
        return Feasibility(False, None)
    dead = analyze(instance).dead
    fixed = presolve.zero_edges | {e for e in instance.edges if e.tail in dead}
    logger.info(f"Presolve fixed {len(fixed)} of {len(instance.edges)} edges to zero")
    return feasible(build_constraints(instance), max_variables=max_variables, max_rows=max_rows, fixed_zero=fixed)


def profile_sum_bound(instance: Instance, point: RationalPoint) -> bool:
    """
    For a feasible integral point, checks Sigma(run profile) <= Sigma(point).
    """
    check = check_point(build_constraints(instance), point)
    if not check.feasible or not point.is_integral():
        raise ValueError("profile_sum_bound needs a feasible integral point")
    decision = decide(instance)
    return decision.terminates and decision.profile.total() <= point.total()


def _is_canonical(switches, n: int) -> bool:
    """
    True iff every vertex is reachable from x0 and the internal vertices are labelled in breadth-first discovery
    order (even successor first). The destination x_{n-1} is not expanded.
    """
    destination = n - 1
    seen = {0}
    queue = [0]
    next_label = 1
    for u in queue:
        if u == destination:
            continue
        for w in switches[u]:
            if w in seen:
                continue
            if w != destination:
                if w != next_label:
                    return False
                next_label += 1
            seen.add(w)
            queue.append(w)
    return len(seen) == n


def _canonical_instances(n: int):
    labels = [f"x{i}" for i in range(n)]
    pairs = list(itertools.product(range(n), repeat=2))
    for switches in itertools.product(pairs, repeat=n - 1):
        if not _is_canonical(switches, n):
            yield None
            continue
        even = {labels[i]: labels[s[0]] for i, s in enumerate(switches)}
        odd = {labels[i]: labels[s[1]] for i, s in enumerate(switches)}
        even[labels[-1]] = odd[labels[-1]] = labels[-1]
        yield Instance(vertices=labels, even=even, odd=odd, origin=labels[0], destination=labels[-1])


def _random_instances(max_vertices: int, seed: int):
    sizes = list(range(3, max_vertices + 1))
    for i in itertools.count():
        yield gen_random(sizes[i % len(sizes)], seed + i)


def _is_gap_witness(instance: Instance, max_variables: int) -> Optional[RationalPoint]:
    if decide(instance).terminates:
        return None
    try:
        result = decide_relaxation(instance, max_variables=max_variables)
    except EliminationTooLargeError as e:
        logger.info(f"Skipping instance: {e}")
        return None
    return result.witness if result.feasible else None


def gap_search(max_vertices: int, mode: str = SearchModes.EXHAUSTIVE, budget: int = Defaults.GAP_SEARCH_BUDGET,
               seed: int = 0, max_variables: int = Defaults.MAX_ELIMINATION_VARIABLES) -> GapSearchResult:
    """
    Looks for an instance whose run cycles while the relaxation is feasible.

    Parameters
    ----------
    max_vertices : int
        Largest instance size examined.
    mode : str
        SearchModes.EXHAUSTIVE enumerates, by increasing size, every instance on x0..x_{n-1} with origin x0,
        destination x_{n-1} (self-loop) and canonical labels; SearchModes.SEEDED_RANDOM samples gen_random instances
        with seeds seed, seed + 1, ... cycling through the sizes 3..max_vertices.
    budget : int
        Number of candidates examined before giving up.
    seed : int
        First seed of the random mode.

    Returns
    -------
    GapSearchResult
        The first witness in search order, or found=False once the budget or the search space is exhausted.
    """
    if mode == SearchModes.EXHAUSTIVE:
        candidates = itertools.chain.from_iterable(_canonical_instances(n) for n in range(2, max_vertices + 1))
    elif mode == SearchModes.SEEDED_RANDOM:
        if max_vertices < 3:
            return GapSearchResult(found=False, examined=0)
        candidates = _random_instances(max_vertices, seed)
    else:
        raise ValueError(f"unknown search mode {mode!r}")

    logger.info(f"Searching integrality gap witnesses ({mode}, up to {max_vertices} vertices)...")
    t1 = time.perf_counter()
    examined = 0
    for instance in candidates:
        if examined >= budget:
            break
        examined += 1
        if instance is None:
            continue
        point = _is_gap_witness(instance, max_variables)
        if point is not None:
            logger.info(f"Witness found after {examined} candidates ({time.perf_counter() - t1:.2f} s)")
            return GapSearchResult(found=True, examined=examined, instance=instance, point=point)
    logger.info(f"No witness after {examined} candidates ({time.perf_counter() - t1:.2f} s)")
    return GapSearchResult(found=False, examined=examined)
