"""
Deterministic simulation of the train run.

The run starts at the origin with every switch pointing to its even successor. Each visit of a vertex v follows the
successor its switch points to and flips the switch. The run terminates when it reaches the destination.

Three deciders are provided:

- `simulate`: the raw run, stopped only by a step budget.
- `decide`: the run cut at the first arrival at a dead end. A run that does not terminate always reaches a dead end
  (hopeful edges can only be traversed finitely often), so `decide` always halts.
- `oracle_decide_staterep`: Brent's cycle detection on the state-transition function (current vertex, switch
  positions), with constant memory; kept as an independent reference for `decide`.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

from mip_arrival.constants import Defaults, Outcomes
from mip_arrival.switch_graph import Flow, Instance, analyze
from mip_arrival.utils import BudgetExhaustedError, StateSpaceTooLargeError, state_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunState:
    """
    Current vertex plus the parity of every switch (0: even successor is next, 1: odd successor is next).
    """
    current: str
    parity: Mapping[str, int] = field(hash=False)


@dataclass(frozen=True)
class Decision:
    """
    Outcome of a run.

    Attributes
    ----------
    outcome : str
        Outcomes.TERMINATES or Outcomes.CYCLES.
    steps : int
        Edges traversed until d, or until the dead end was entered.
    profile : Flow or None
        The run profile x(G, o, d); present iff the run terminates.
    dead_end : str or None
        The first dead end reached; present iff the run cycles.
    prefix : Flow or None
        Traversal counts of the run up to (and including) the step into the dead end; present iff the run cycles.
    final_state : RunState
        The state in which the decider stopped the run.
    transitions : int
        Transition applications performed by the decider.
    """
    outcome: str
    steps: int
    profile: Optional[Flow] = None
    dead_end: Optional[str] = None
    prefix: Optional[Flow] = None
    final_state: Optional[RunState] = None
    transitions: int = 0

    @property
    def terminates(self) -> bool:
        return self.outcome == Outcomes.TERMINATES


def initial_state(instance: Instance) -> RunState:
    return RunState(current=instance.origin, parity={v: 0 for v in instance.vertices})


def step(instance: Instance, state: RunState) -> RunState:
    """
    Traverses one edge: moves to even(v) if parity(v) = 0, else to odd(v), and flips parity(v).
    """
    v = state.current
    if v == instance.destination:
        raise ValueError("the run has already arrived: cannot step from the destination")
    parity = dict(state.parity)
    w = instance.odd[v] if parity[v] else instance.even[v]
    parity[v] ^= 1
    return RunState(current=w, parity=parity)


def _state_from_tables(instance: Instance, current: int, parity) -> RunState:
    vertices = instance.vertices
    return RunState(current=vertices[current], parity={v: parity[i] for i, v in enumerate(vertices)})


def _flow_from_counts(instance: Instance, counts) -> Flow:
    return Flow.from_vector(instance.edges, counts)


def simulate(instance: Instance, max_steps: int) -> Decision:
    """
    Runs the procedure without dead-end analysis.

    Parameters
    ----------
    instance : Instance
    max_steps : int
        Budget of traversed edges. A run that does not reach d within the budget raises BudgetExhaustedError; this
        is the only way a cycling run ends here.
    """
    if max_steps is None or max_steps < 0:
        raise ValueError("simulate requires a nonnegative max_steps")
    tables = instance.tables
    even, odd, even_edge, odd_edge = tables.even, tables.odd, tables.even_edge, tables.odd_edge
    destination = tables.destination
    parity = [0] * instance.n
    counts = [0] * len(instance.edges)
    current, steps = tables.origin, 0
    trace = logger.isEnabledFor(logging.DEBUG)
    while current != destination:
        if steps >= max_steps:
            raise BudgetExhaustedError(steps)
        if parity[current]:
            parity[current] = 0
            counts[odd_edge[current]] += 1
            nxt = odd[current]
        else:
            parity[current] = 1
            counts[even_edge[current]] += 1
            nxt = even[current]
        if trace:
            logger.debug(f"step {steps + 1}: {instance.vertices[current]} -> {instance.vertices[nxt]}")
        current = nxt
        steps += 1
    return Decision(outcome=Outcomes.TERMINATES, steps=steps, profile=_flow_from_counts(instance, counts),
                    final_state=_state_from_tables(instance, current, parity), transitions=steps)


def decide(instance: Instance, max_steps: Optional[int] = None) -> Decision:
    """
    Decides whether the run terminates.

    The dead ends are computed once; the run stops with CYCLES on its first arrival at a dead end (the step into the
    dead end is counted), and with TERMINATES on arrival at d.

    Parameters
    ----------
    instance : Instance
    max_steps : int, optional
        If given, a run still undecided after max_steps traversals raises BudgetExhaustedError.
    """
    tables = instance.tables
    report = analyze(instance)
    dead = [v in report.dead for v in instance.vertices]
    even, odd, even_edge, odd_edge = tables.even, tables.odd, tables.even_edge, tables.odd_edge
    destination = tables.destination
    parity = [0] * instance.n
    counts = [0] * len(instance.edges)
    current, steps = tables.origin, 0
    trace = logger.isEnabledFor(logging.DEBUG)
    while not dead[current]:
        if current == destination:
            logger.info(f"Run terminates after {steps} steps")
            return Decision(outcome=Outcomes.TERMINATES, steps=steps, profile=_flow_from_counts(instance, counts),
                            final_state=_state_from_tables(instance, current, parity), transitions=steps)
        if max_steps is not None and steps >= max_steps:
            raise BudgetExhaustedError(steps)
        if parity[current]:
            parity[current] = 0
            counts[odd_edge[current]] += 1
            nxt = odd[current]
        else:
            parity[current] = 1
            counts[even_edge[current]] += 1
            nxt = even[current]
        if trace:
            logger.debug(f"step {steps + 1}: {instance.vertices[current]} -> {instance.vertices[nxt]}")
        current = nxt
        steps += 1
    dead_end = instance.vertices[current]
    logger.info(f"Run cycles: dead end {dead_end!r} reached after {steps} steps")
    return Decision(outcome=Outcomes.CYCLES, steps=steps, dead_end=dead_end, prefix=_flow_from_counts(instance, counts),
                    final_state=_state_from_tables(instance, current, parity), transitions=steps)


def oracle_decide_staterep(instance: Instance, state_cap: int = Defaults.STATE_CAP,
                           max_steps: Optional[int] = None) -> Decision:
    """
    Decides termination by detecting a repeated state with Brent's method.

    A state is (current vertex, switch positions), encoded as (int, bitmask); at most n * 2^n states exist, so the
    run either reaches d or repeats a state. On repetition the run is re-simulated to report its first dead end.

    Parameters
    ----------
    instance : Instance
    state_cap : int
        Instances with n * 2^n above this cap are refused with StateSpaceTooLargeError.
    max_steps : int, optional
        Raises BudgetExhaustedError once this many transitions are done without reaching d or repeating a state.
    """
    bound = state_bound(instance.n)
    if bound > state_cap:
        raise StateSpaceTooLargeError(f"{instance.n} vertices give {bound} states, above the cap of {state_cap}")
    tables = instance.tables
    even, odd, even_edge, odd_edge = tables.even, tables.odd, tables.even_edge, tables.odd_edge
    destination = tables.destination
    counts = [0] * len(instance.edges)

    def advance(vertex: int, mask: int):
        # the hare walks the run in order, so its traversals make up the profile
        if (mask >> vertex) & 1:
            counts[odd_edge[vertex]] += 1
            return odd[vertex], mask ^ (1 << vertex)
        counts[even_edge[vertex]] += 1
        return even[vertex], mask ^ (1 << vertex)

    tortoise = (tables.origin, 0)
    hare = advance(*tortoise)
    transitions = 1
    power = lam = 1
    while True:
        if hare[0] == destination:
            parity = [(hare[1] >> i) & 1 for i in range(instance.n)]
            return Decision(outcome=Outcomes.TERMINATES, steps=transitions,
                            profile=_flow_from_counts(instance, counts),
                            final_state=_state_from_tables(instance, hare[0], parity), transitions=transitions)
        if hare == tortoise:
            break
        if max_steps is not None and transitions >= max_steps:
            raise BudgetExhaustedError(transitions)
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = advance(*hare)
        transitions += 1
        lam += 1
    logger.info(f"State repetition found after {transitions} transitions (cycle length {lam})")
    reference = decide(instance)
    if reference.terminates:
        raise RuntimeError("a repeated state contradicts a terminating run")
    return Decision(outcome=Outcomes.CYCLES, steps=reference.steps, dead_end=reference.dead_end,
                    prefix=reference.prefix, final_state=reference.final_state, transitions=transitions)
