"""
Switch graph data model, edge flows, Graphviz DOT export and dead-end analysis.

A switch graph assigns to every vertex an even and an odd successor. Together with an origin and a destination it
forms an instance of the arrival problem. Edges are identified by (tail, head): when both successors of a vertex
coincide the vertex has a single outgoing edge.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Tuple

import networkx as nx

from mip_arrival.constants import EdgeSlots
from mip_arrival.utils import InstanceFormatError

logger = logging.getLogger(__name__)

EDGE_SEPARATOR = "->"


class Edge(NamedTuple):
    tail: str
    head: str

    def key(self) -> str:
        """Key of the edge in flow documents."""
        return f"{self.tail}{EDGE_SEPARATOR}{self.head}"


@dataclass(frozen=True)
class Flow:
    """
    Nonnegative integer value per edge (run profiles, prefixes of cycling runs, switching-flow candidates).

    Absent edges mean 0; zero entries are dropped on construction, so two flows compare equal iff they agree on
    every edge.
    """
    values: Mapping[Edge, int] = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        values = {}
        for edge, value in self.values.items():
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"flow value of {Edge(*edge).key()} must be a nonnegative integer, got {value!r}")
            if value:
                values[Edge(*edge)] = value
        object.__setattr__(self, 'values', values)

    def __getitem__(self, edge) -> int:
        return self.values.get(edge, 0)

    def total(self) -> int:
        """Sigma(x), the sum of all values."""
        return sum(self.values.values())

    def max_value(self) -> int:
        return max(self.values.values(), default=0)

    def dominates(self, other: 'Flow') -> bool:
        """True iff self >= other componentwise."""
        return all(self[e] >= value for e, value in other.values.items())

    @classmethod
    def from_vector(cls, edges, vector) -> 'Flow':
        return cls(dict(zip(edges, vector)))


class SwitchTables(NamedTuple):
    """
    Integer-indexed view of an instance, used by the simulation loops.

    Vertex i has successors even[i] / odd[i]; the traversed edges have positions even_edge[i] / odd_edge[i] in
    Instance.edges.
    """
    index: Dict[str, int]
    even: List[int]
    odd: List[int]
    even_edge: List[int]
    odd_edge: List[int]
    origin: int
    destination: int


@dataclass(frozen=True)
class Instance:
    """
    A switch graph (V, E, s0, s1) with origin o and destination d.

    Attributes
    ----------
    vertices : tuple of str
        The vertex identifiers, in declaration order. This order drives every deterministic output.
    even : dict
        {v: s0(v)}, defined for every vertex.
    odd : dict
        {v: s1(v)}, defined for every vertex.
    origin : str
    destination : str
    """
    vertices: Tuple[str, ...]
    even: Mapping[str, str] = field(hash=False)
    odd: Mapping[str, str] = field(hash=False)
    origin: str
    destination: str

    def __post_init__(self) -> None:
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        declared = set()
        for v in self.vertices:
            if not isinstance(v, str):
                raise InstanceFormatError(f"vertex id {v!r} is not a string", key=str(v))
            if EDGE_SEPARATOR in v:
                raise InstanceFormatError(f"vertex id {v!r} contains {EDGE_SEPARATOR!r}", key=v)
            if v in declared:
                raise InstanceFormatError(f"duplicate vertex id {v!r}", key=v)
            declared.add(v)
        for slot_name, successors in (('even', self.even), ('odd', self.odd)):
            for v in successors:
                if v not in declared:
                    raise InstanceFormatError(f"unknown vertex {v!r} in {slot_name}", key=v)
            for v in self.vertices:
                if v not in successors:
                    raise InstanceFormatError(f"missing {slot_name} successor for {v!r}", key=v)
                if successors[v] not in declared:
                    raise InstanceFormatError(f"unknown vertex {successors[v]!r} as {slot_name} successor of {v!r}",
                                              key=v)
        for role in ('origin', 'destination'):
            if getattr(self, role) not in declared:
                raise InstanceFormatError(f"unknown vertex {getattr(self, role)!r} in {role}", key=role)
        if self.origin == self.destination:
            raise InstanceFormatError("origin equals destination", key='destination')
        # freeze the successor maps, keeping declaration order
        object.__setattr__(self, 'even', {v: self.even[v] for v in self.vertices})
        object.__setattr__(self, 'odd', {v: self.odd[v] for v in self.vertices})

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        """E, ordered by tail declaration order, even slot first."""
        edges = []
        for v in self.vertices:
            edges.append(Edge(v, self.even[v]))
            if self.odd[v] != self.even[v]:
                edges.append(Edge(v, self.odd[v]))
        return tuple(edges)

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    @cached_property
    def tables(self) -> SwitchTables:
        index = {v: i for i, v in enumerate(self.vertices)}
        position = {e: i for i, e in enumerate(self.edges)}
        even = [index[self.even[v]] for v in self.vertices]
        odd = [index[self.odd[v]] for v in self.vertices]
        even_edge = [position[Edge(v, self.even[v])] for v in self.vertices]
        odd_edge = [position[Edge(v, self.odd[v])] for v in self.vertices]
        return SwitchTables(index, even, odd, even_edge, odd_edge, index[self.origin], index[self.destination])

    def successors(self, v: str) -> Tuple[str, str]:
        return self.even[v], self.odd[v]

    def is_switch(self, v: str) -> bool:
        """True iff v has two distinct outgoing edges (the balancing condition applies)."""
        return self.even[v] != self.odd[v]

    def out_edges(self, v: str) -> List[Edge]:
        if self.is_switch(v):
            return [Edge(v, self.even[v]), Edge(v, self.odd[v])]
        return [Edge(v, self.even[v])]

    def slot(self, edge: Edge) -> str:
        if edge not in self.edge_set:
            raise KeyError(edge)
        if not self.is_switch(edge.tail):
            return EdgeSlots.UNIQUE
        return EdgeSlots.EVEN if edge.head == self.even[edge.tail] else EdgeSlots.ODD

    def supply(self, v: str) -> int:
        """Right-hand side of the conservation equality at v: +1 at o, -1 at d, 0 elsewhere."""
        if v == self.origin:
            return 1
        if v == self.destination:
            return -1
        return 0

    def to_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True)
class DeadEndReport:
    """
    Result of the dead-end analysis.

    Attributes
    ----------
    dead : frozenset of str
        Vertices without a directed path to the destination.
    desperation : dict
        {edge: k} for every hopeful edge, k being the length of the shortest path from the edge's head to d.
    """
    dead: FrozenSet[str]
    desperation: Mapping[Edge, int] = field(hash=False)

    def is_dead_edge(self, edge: Edge) -> bool:
        return edge.head in self.dead

    def traversal_bound(self, edge: Edge) -> int:
        """2^(k+1) - 1 for a hopeful edge of desperation k."""
        return 2 ** (self.desperation[edge] + 1) - 1


def analyze(instance: Instance) -> DeadEndReport:
    """
    Identifies dead ends and desperations by breadth-first search from d in the reversed graph.
    """
    reverse_graph = instance.to_digraph().reverse(copy=False)
    distance = nx.single_source_shortest_path_length(reverse_graph, instance.destination)
    dead = frozenset(v for v in instance.vertices if v not in distance)
    desperation = {e: distance[e.head] for e in instance.edges if e.head in distance}
    logger.debug(f"Dead-end analysis: {len(dead)} dead ends, {len(desperation)} hopeful edges")
    return DeadEndReport(dead=dead, desperation=desperation)


def _quote(identifier: str) -> str:
    return '"' + identifier.replace('\\', '\\\\').replace('"', '\\"') + '"'


def export_dot(instance: Instance) -> str:
    """
    Renders the instance as a Graphviz digraph.

    Solid edges point to even or unique successors, dashed edges to odd successors. The origin is drawn as a box,
    the destination as a double circle.
    """
    lines = ['digraph switch_graph {', '    rankdir=LR;']
    for v in instance.vertices:
        if v == instance.origin:
            lines.append(f'    {_quote(v)} [shape=box, xlabel="origin"];')
        elif v == instance.destination:
            lines.append(f'    {_quote(v)} [shape=doublecircle, xlabel="destination"];')
        else:
            lines.append(f'    {_quote(v)} [shape=circle];')
    for edge in instance.edges:
        style = 'dashed' if instance.slot(edge) == EdgeSlots.ODD else 'solid'
        lines.append(f'    {_quote(edge.tail)} -> {_quote(edge.head)} [style={style}];')
    lines.append('}')
    return '\n'.join(lines) + '\n'
