"""
Certificates for both answers of the arrival problem.

- YES: a switching flow, i.e. a nonnegative integer edge labeling x with flow conservation (net +1 at o, -1 at d,
  0 elsewhere) and the balancing condition x(v, s1(v)) <= x(v, s0(v)) <= x(v, s1(v)) + 1 at every switch. Every run
  profile is one; any switching flow dominates the run profile and implies termination.
- NO: the complement instance, which terminates iff the original run does not.
"""

import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

from mip_arrival.constants import Defaults, ViolationKinds
from mip_arrival.relaxation import forced_zero_edges
from mip_arrival.run_engine import decide
from mip_arrival.switch_graph import Edge, Flow, Instance, analyze
from mip_arrival.utils import EnumerationBudgetError, NonEdgeError, state_bound

logger = logging.getLogger(__name__)


class Violation(NamedTuple):
    kind: str
    vertex: str
    detail: str


@dataclass(frozen=True)
class Verdict:
    valid: bool
    violations: List[Violation] = field(default_factory=list, hash=False)
    warnings: List[str] = field(default_factory=list, hash=False)


def _check_edges(instance: Instance, flow: Flow) -> None:
    for edge in flow.values:
        if edge not in instance.edge_set:
            raise NonEdgeError(edge)


def verify_switching_flow(instance: Instance, flow: Flow) -> Verdict:
    """
    Checks whether `flow` is a switching flow of `instance`.

    Loop edges (v, v) count on both sides of the conservation sum at v. Values above n * 2^n are accepted but
    reported as warnings: the run profile of a terminating run never exceeds that bound.

    Raises
    ------
    NonEdgeError
        If the flow puts a value on a pair that is not an edge; this is an input error, not an invalid certificate.
    """
    _check_edges(instance, flow)
    divergence = {v: 0 for v in instance.vertices}
    for edge, value in flow.values.items():
        divergence[edge.tail] += value
        divergence[edge.head] -= value

    violations = []
    for v in instance.vertices:
        expected = instance.supply(v)
        if divergence[v] != expected:
            violations.append(Violation(ViolationKinds.CONSERVATION, v,
                                        f"out - in = {divergence[v]}, expected {expected}"))
        if instance.is_switch(v):
            x_even, x_odd = flow[Edge(v, instance.even[v])], flow[Edge(v, instance.odd[v])]
            if not x_odd <= x_even <= x_odd + 1:
                violations.append(Violation(ViolationKinds.BALANCE, v,
                                            f"x(odd)={x_odd}, x(even)={x_even}: need x(odd) <= x(even) <= x(odd) + 1"))

    warnings = []
    bound = state_bound(instance.n)
    for edge, value in flow.values.items():
        if value > bound:
            message = f"value {value} on {edge.key()} exceeds n*2^n = {bound}"
            logger.warning(message)
            warnings.append(message)
    return Verdict(valid=not violations, violations=violations, warnings=warnings)


def fresh_vertex_name(instance: Instance) -> str:
    """Name of the new destination: '<d>_bar', with apostrophes appended until it is not taken."""
    name = f"{instance.destination}_bar"
    while name in instance.even:
        name += "'"
    return name


def complement(instance: Instance) -> Instance:
    """
    Builds (G', o, d') such that the run on G' terminates iff the run on G does not.

    Every dead end of G gets both successors d'; the old destination d gets a loop; d' loops on itself. All other
    switches are unchanged. The dead ends are those of G, computed before rewiring.
    """
    dead = analyze(instance).dead
    new_destination = fresh_vertex_name(instance)
    even, odd = dict(instance.even), dict(instance.odd)
    for w in dead:
        even[w] = odd[w] = new_destination
    even[instance.destination] = odd[instance.destination] = instance.destination
    even[new_destination] = odd[new_destination] = new_destination
    logger.info(f"Complement: {len(dead)} dead ends rewired to {new_destination!r}")
    return Instance(vertices=instance.vertices + (new_destination,), even=even, odd=odd,
                    origin=instance.origin, destination=new_destination)


def _local_assignments(instance: Instance, v: str, cap: int):
    """Out-edge values at v allowed by the balancing condition, as tuples aligned with instance.out_edges(v)."""
    if not instance.is_switch(v):
        return [(value,) for value in range(cap + 1)]
    assignments = []
    for x_odd in range(cap + 1):
        for x_even in (x_odd, x_odd + 1):
            if x_even <= cap:
                assignments.append((x_even, x_odd))
    return assignments


def count_candidates(instance: Instance, cap: int) -> int:
    """Size of the unpruned candidate space: the product of the balanced out-edge assignments of every vertex."""
    total = 1
    for v in instance.vertices:
        total *= len(_local_assignments(instance, v, cap))
    return total


def _search_order(instance: Instance) -> List[str]:
    """Breadth-first order from o, then the unreached vertices in declaration order."""
    order, seen = [instance.origin], {instance.origin}
    for v in order:
        for w in instance.successors(v):
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order + [v for v in instance.vertices if v not in seen]


def enumerate_switching_flows(instance: Instance, cap: int, budget: int = Defaults.ENUMERATION_BUDGET) -> List[Flow]:
    """
    Lists every switching flow whose values are all <= cap.

    Out-edge values are assigned vertex by vertex (breadth-first from o) among those satisfying the balancing
    condition. A partial assignment is abandoned as soon as some vertex can no longer reach its conservation
    balance with the edges still unassigned. Edges the presolve forces to zero only take the value 0. The result is
    sorted lexicographically by the value vector over instance.edges.

    Raises
    ------
    EnumerationBudgetError
        If more than `budget` partial assignments are examined.
    """
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    presolve = forced_zero_edges(instance)
    if presolve.infeasible:
        logger.info("No switching flow: the presolve proves the relaxation infeasible")
        return []
    logger.info(f"Enumerating switching flows (cap {cap}, {count_candidates(instance, cap)} unpruned candidates)...")

    edges = instance.edges
    index = instance.tables.index
    position = {e: i for i, e in enumerate(edges)}
    order = [index[v] for v in _search_order(instance)]
    n = instance.n
    supply = [instance.supply(v) for v in instance.vertices]
    # per vertex: out-edge (position, head index) pairs, without loops, and the admissible value tuples
    outs, choices = [], []
    for v in instance.vertices:
        out_edges = instance.out_edges(v)
        allowed = [values for values in _local_assignments(instance, v, cap)
                   if all(value == 0 or e not in presolve.zero_edges for e, value in zip(out_edges, values))]
        outs.append([(position[e], index[e.head]) for e in out_edges])
        choices.append(allowed)
    net_out = [[sum(value for (p, h), value in zip(outs[i], values) if h != i) for values in choices[i]]
               for i in range(n)]
    out_low = [min(nets, default=0) for nets in net_out]
    out_high = [max(nets, default=0) for nets in net_out]
    pending_in = [0] * n
    for i in range(n):
        for _, h in outs[i]:
            if h != i:
                pending_in[h] += 1

    assigned = [False] * n
    divergence = [0] * n
    vector = [0] * len(edges)
    flows = []
    examined = 0

    def reachable(w: int) -> bool:
        need = supply[w] - divergence[w]
        low, high = (0, 0) if assigned[w] else (out_low[w], out_high[w])
        return low - cap * pending_in[w] <= need <= high

    def descend(k: int) -> None:
        nonlocal examined
        if k == n:
            if divergence == supply:
                flows.append(tuple(vector))
            return
        i = order[k]
        assigned[i] = True
        for values, net in zip(choices[i], net_out[i]):
            examined += 1
            if examined > budget:
                raise EnumerationBudgetError(examined, budget)
            divergence[i] += net
            for (p, h), value in zip(outs[i], values):
                vector[p] = value
                if h != i:
                    divergence[h] -= value
                    pending_in[h] -= 1
            if reachable(i) and all(reachable(h) for _, h in outs[i]):
                descend(k + 1)
            divergence[i] -= net
            for (p, h), value in zip(outs[i], values):
                vector[p] = 0
                if h != i:
                    divergence[h] += value
                    pending_in[h] += 1
        assigned[i] = False

    descend(0)
    flows.sort()
    return [Flow.from_vector(edges, vector) for vector in flows]



@dataclass(frozen=True)
class MinimalityReport:
    """
    Attributes
    ----------
    confirmed : bool
        True iff the run profile is below every enumerated switching flow and the unique minimizer of Sigma.
    profile : Flow
    flows_checked : int
    counterexample : Flow or None
        The first enumerated flow that breaks either property.
    reason : str
    """
    confirmed: bool
    profile: Flow
    flows_checked: int
    counterexample: Optional[Flow] = None
    reason: str = ''


def check_minimality(instance: Instance, cap: int, budget: int = Defaults.ENUMERATION_BUDGET) -> MinimalityReport:
    """
    Confirms by enumeration that the run profile is the least switching flow and the unique minimizer of Sigma(x)
    among the switching flows with values <= cap.
    """
    decision = decide(instance)
    if not decision.terminates:
        raise ValueError("check_minimality requires a terminating run")
    profile = decision.profile
    if cap < profile.max_value():
        raise ValueError(f"cap {cap} is below the largest profile value {profile.max_value()}")
    flows = enumerate_switching_flows(instance, cap, budget=budget)
    best = profile.total()
    found_profile = False
    for flow in flows:
        if flow == profile:
            found_profile = True
            continue
        if not flow.dominates(profile):
            return MinimalityReport(False, profile, len(flows), flow, "flow does not dominate the run profile")
        if flow.total() <= best:
            return MinimalityReport(False, profile, len(flows), flow, "flow ties or beats the run profile on Sigma")
    if not found_profile:
        return MinimalityReport(False, profile, len(flows), None, "run profile missing from the enumeration")
    return MinimalityReport(True, profile, len(flows), None, "run profile is the least switching flow")
