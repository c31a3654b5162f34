"""
Readers and writers of the JSON documents (instances, flows, rational points, verdicts, witness bundles) and the
bridge between the ticdat tables and the engine (DatIn / DatOut).
"""

import json
import logging
from fractions import Fraction
from typing import Any, Dict, Optional

import pandas as pd

from mip_arrival.certificates import MinimalityReport, Verdict
from mip_arrival.constants import VertexRoles
from mip_arrival.relaxation import RationalPoint
from mip_arrival.run_engine import Decision
from mip_arrival.schemas import input_schema, output_schema
from mip_arrival.switch_graph import EDGE_SEPARATOR, DeadEndReport, Edge, Flow, Instance
from mip_arrival.utils import FlowFormatError, InstanceFormatError, NonEdgeError

logger = logging.getLogger(__name__)

INSTANCE_KEYS = ('vertices', 'even', 'odd', 'origin', 'destination')


def _dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2) + '\n'


def _loads(text: str, error_class, what: str):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise error_class(f"{what} document is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise error_class(f"{what} document must be a JSON object")
    return document


# region instances
def instance_from_document(document: Dict[str, Any]) -> Instance:
    for key in INSTANCE_KEYS:
        if key not in document:
            raise InstanceFormatError(f"missing key {key!r}", key=key)
    vertices = document['vertices']
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise InstanceFormatError("'vertices' must be an array of strings", key='vertices')
    for key in ('even', 'odd'):
        successors = document[key]
        if not isinstance(successors, dict):
            raise InstanceFormatError(f"{key!r} must be an object vertex -> vertex", key=key)
        for v, w in successors.items():
            if not isinstance(w, str):
                raise InstanceFormatError(f"{key} successor of {v!r} must be a string", key=v)
    for key in ('origin', 'destination'):
        if not isinstance(document[key], str):
            raise InstanceFormatError(f"{key!r} must be a string", key=key)
    return Instance(vertices=vertices, even=document['even'], odd=document['odd'],
                    origin=document['origin'], destination=document['destination'])


def instance_to_document(instance: Instance) -> Dict[str, Any]:
    return {
        'vertices': list(instance.vertices),
        'even': dict(instance.even),
        'odd': dict(instance.odd),
        'origin': instance.origin,
        'destination': instance.destination,
    }


def parse_instance(text: str) -> Instance:
    """
    Reads an instance document.

    Raises
    ------
    InstanceFormatError
        On malformed JSON, missing keys, wrong types and every violated Instance invariant; `key` names the
        offending entry.
    """
    return instance_from_document(_loads(text, InstanceFormatError, 'instance'))


def serialize_instance(instance: Instance) -> str:
    """Writes an instance document; vertices and successor maps follow the declaration order."""
    return _dumps(instance_to_document(instance))
# endregion


# region flows and points
def _edge_from_key(instance: Instance, key: str, error_class) -> Edge:
    edges = {e.key(): e for e in instance.edges}
    if key in edges:
        return edges[key]
    tail, sep, head = key.partition(EDGE_SEPARATOR)
    if sep and tail in instance.even and head in instance.even:
        raise NonEdgeError((tail, head))
    raise error_class(f"{key!r} is not a 'tail->head' key over the instance vertices", key=key)


def _edge_values(text: str, error_class, what: str) -> Dict[str, Any]:
    document = _loads(text, error_class, what)
    if 'edges' not in document or not isinstance(document['edges'], dict):
        raise error_class(f"{what} document needs an 'edges' object", key='edges')
    return document['edges']


def parse_flow(text: str, instance: Instance) -> Flow:
    """
    Reads a flow document {"edges": {"tail->head": "value"}}; values are decimal strings (JSON integers are accepted
    too).

    Raises
    ------
    NonEdgeError
        If a key names two vertices that do not form an edge.
    FlowFormatError
        On any other malformed key or value.
    """
    values = {}
    for key, raw in _edge_values(text, FlowFormatError, 'flow').items():
        edge = _edge_from_key(instance, key, FlowFormatError)
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise FlowFormatError(f"value of {key!r} must be a decimal string", key=key)
        if isinstance(raw, str) and not raw.isdigit():
            raise FlowFormatError(f"value of {key!r} must be a nonnegative decimal integer, got {raw!r}", key=key)
        value = int(raw)
        if value < 0:
            raise FlowFormatError(f"value of {key!r} must be nonnegative", key=key)
        values[edge] = value
    return Flow(values)


def serialize_flow(instance: Instance, flow: Flow) -> str:
    """Writes a flow document listing every edge of the instance, in edge order."""
    return _dumps({'edges': {e.key(): str(flow[e]) for e in instance.edges}})


def _format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_point(text: str, instance: Instance) -> RationalPoint:
    """
    Reads a rational point document {"edges": {"tail->head": "num/den"}}; plain integers ("3") are accepted.
    """
    values = {}
    for key, raw in _edge_values(text, FlowFormatError, 'point').items():
        edge = _edge_from_key(instance, key, FlowFormatError)
        if not isinstance(raw, str):
            raise FlowFormatError(f"value of {key!r} must be a 'num/den' string", key=key)
        try:
            values[edge] = Fraction(raw)
        except (ValueError, ZeroDivisionError) as e:
            raise FlowFormatError(f"value of {key!r} is not a rational number: {raw!r}", key=key) from e
    return RationalPoint(values)


def point_to_document(instance: Instance, point: RationalPoint) -> Dict[str, Any]:
    return {'edges': {e.key(): _format_fraction(point[e]) for e in instance.edges}}


def serialize_point(instance: Instance, point: RationalPoint) -> str:
    return _dumps(point_to_document(instance, point))
# endregion


# region reports
def verdict_to_document(verdict: Verdict) -> Dict[str, Any]:
    return {
        'valid': verdict.valid,
        'violations': [{'kind': v.kind, 'vertex': v.vertex, 'detail': v.detail} for v in verdict.violations],
        'warnings': list(verdict.warnings),
    }


def witness_bundle(instance: Instance, point: RationalPoint) -> str:
    """Instance plus rational point in one document."""
    return _dumps({'instance': instance_to_document(instance), 'point': point_to_document(instance, point)})


def parse_witness_bundle(text: str):
    document = _loads(text, FlowFormatError, 'witness')
    for key in ('instance', 'point'):
        if key not in document:
            raise FlowFormatError(f"missing key {key!r}", key=key)
    instance = instance_from_document(document['instance'])
    point = parse_point(json.dumps(document['point']), instance)
    return instance, point


def analysis_document(instance: Instance, report: DeadEndReport) -> str:
    return _dumps({
        'dead': [v for v in instance.vertices if v in report.dead],
        'desperation': {e.key(): report.desperation[e] for e in instance.edges if e in report.desperation},
        'traversal_bound': {e.key(): report.traversal_bound(e) for e in instance.edges if e in report.desperation},
    })
# endregion


# region ticdat bridge
def instance_to_pan_dat(instance: Instance, parameters: Optional[Dict[str, Any]] = None) -> input_schema.PanDat:
    """Builds the input tables of an instance."""
    def role(v):
        if v == instance.origin:
            return VertexRoles.ORIGIN
        if v == instance.destination:
            return VertexRoles.DESTINATION
        return VertexRoles.INTERNAL

    dat = input_schema.PanDat()
    dat.vertices = pd.DataFrame({'Vertex ID': list(instance.vertices),
                                 'Role': [role(v) for v in instance.vertices]})
    dat.switches = pd.DataFrame({'Vertex ID': list(instance.vertices),
                                 'Even Successor': [instance.even[v] for v in instance.vertices],
                                 'Odd Successor': [instance.odd[v] for v in instance.vertices]})
    dat.parameters = pd.DataFrame({'Name': list((parameters or {}).keys()),
                                   'Value': list((parameters or {}).values())})
    return dat


class DatIn:
    """
    Prepares the data of the input tables (a PanDat object) for the run report engine.

    The instance and the parameters read from the tables are set as attributes, so that the engine works on the
    same objects as the library.
    """

    def __init__(self, dat: input_schema.PanDat) -> None:
        """
        Parameters
        ----------
        dat : input_schema.PanDat
            A PanDat object from ticdat package, created accordingly to schemas.input_schema.

        Raises
        ------
        InstanceFormatError
            If the tables do not describe a valid instance.
        """
        logger.info('Instantiating a DatIn object...')
        self.dat = input_schema.copy_pan_dat(pan_dat=dat)  # copy input "dat" to avoid over-writing
        self.dat_params = input_schema.create_full_parameters_dict(dat)

        self.instance = None  # Instance, populated in _populate_instance()
        self.max_steps = None  # int or None (unlimited)
        self.minimality_cap = None  # int or None (skip)

        self._populate_instance()
        self._populate_parameters()

    def _populate_instance(self) -> None:
        dat = self.dat
        vertices = dat.vertices['Vertex ID'].to_list()
        origins = dat.vertices.loc[dat.vertices['Role'] == VertexRoles.ORIGIN, 'Vertex ID'].to_list()
        destinations = dat.vertices.loc[dat.vertices['Role'] == VertexRoles.DESTINATION, 'Vertex ID'].to_list()
        if len(origins) != 1:
            raise InstanceFormatError(f"expected exactly one '{VertexRoles.ORIGIN}' vertex, got {len(origins)}",
                                      key='origin')
        if len(destinations) != 1:
            raise InstanceFormatError(
                f"expected exactly one '{VertexRoles.DESTINATION}' vertex, got {len(destinations)}", key='destination')
        even = dict(zip(dat.switches['Vertex ID'], dat.switches['Even Successor']))
        odd = dict(zip(dat.switches['Vertex ID'], dat.switches['Odd Successor']))
        self.instance = Instance(vertices=vertices, even=even, odd=odd, origin=origins[0], destination=destinations[0])

    def _populate_parameters(self) -> None:
        max_steps = int(self.dat_params['Max Steps'])
        cap = int(self.dat_params['Minimality Cap'])
        self.max_steps = max_steps or None
        self.minimality_cap = cap or None


class DatOut:
    """
    Populates the output tables from the decision of the engine.
    """

    def __init__(self, dat_in: DatIn, decision: Decision, report: DeadEndReport,
                 minimality: Optional[MinimalityReport] = None) -> None:
        logger.info('Instantiating a DatOut object...')
        self.dat_in = dat_in
        self.decision = decision
        self.report = report
        self.minimality = minimality

        self.kpis_df = None
        self.profile_df = None
        self.dead_ends_df = None

        self._process_solution()

    def _process_solution(self) -> None:
        instance, decision, report = self.dat_in.instance, self.decision, self.report
        counts = decision.profile if decision.terminates else decision.prefix

        rows = []
        for e in instance.edges:
            hopeful = e in report.desperation
            rows.append({
                'Tail': e.tail,
                'Head': e.head,
                'Slot': instance.slot(e),
                'Traversals': counts[e],
                'Desperation': report.desperation[e] if hopeful else None,
                'Traversal Bound': report.traversal_bound(e) if hopeful else None,
            })
        self.profile_df = pd.DataFrame(
            rows, columns=['Tail', 'Head', 'Slot', 'Traversals', 'Desperation', 'Traversal Bound'])

        self.dead_ends_df = pd.DataFrame({'Vertex ID': [v for v in instance.vertices if v in report.dead]},
                                         columns=['Vertex ID']).astype({'Vertex ID': str})

        kpis = [
            ('Terminates', int(decision.terminates)),
            ('Steps', decision.steps),
            ('Vertices', instance.n),
            ('Edges', len(instance.edges)),
            ('Dead Ends', len(report.dead)),
        ]
        if self.minimality is not None:
            kpis.append(('Minimality Confirmed', int(self.minimality.confirmed)))
            kpis.append(('Switching Flows Checked', self.minimality.flows_checked))
        # object dtype keeps exact Python ints; a counter run can take more than 2^63 steps
        self.kpis_df = pd.DataFrame({'KPI': [name for name, _ in kpis],
                                     'Value': pd.Series([value for _, value in kpis], dtype=object)})

    def build_output(self) -> output_schema.PanDat:
        """
        Returns
        -------
        sln : output_schema.PanDat
            A PanDat object holding the kpis, profile and dead_ends tables.
        """
        logger.info('Building output dat...')
        sln = output_schema.PanDat()
        sln.kpis = self.kpis_df
        sln.profile = self.profile_df
        sln.dead_ends = self.dead_ends_df
        return sln
# endregion
