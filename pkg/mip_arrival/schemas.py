"""
Defines the input and output schemas of the run report engine (see main.py).

The input tables describe a switch graph instance: one row per vertex with its role, one row per switch with its
even and odd successors. The output tables report the decision, the run profile and the dead ends.
"""

import pandas as pd
from ticdat import PanDatFactory
from mip_arrival.constants import VertexRoles, EdgeSlots


# region Aliases for datatypes in ticdat
# Remark: use only aliases that match perfectly your needs, otherwise set datatype explicitly
float_number = {
    "number_allowed": True,
    "strings_allowed": (),
    "must_be_int": False,
    "min": -float("inf"),
    "inclusive_min": False,
    "max": float("inf"),
    "inclusive_max": False,
}

non_negative_integer = {
    "number_allowed": True,
    "strings_allowed": (),
    "must_be_int": True,
    "min": 0,
    "inclusive_min": True,
    "max": float("inf"),
    "inclusive_max": False,
}

positive_integer = {
    "number_allowed": True,
    "strings_allowed": (),
    "must_be_int": True,
    "min": 1,
    "inclusive_min": True,
    "max": float("inf"),
    "inclusive_max": False,
}

text = {"strings_allowed": "*", "number_allowed": False}
# endregion

# region INPUT SCHEMA
input_schema = PanDatFactory(
    parameters=[['Name'], ['Value']],  # Do not change the column names of the parameters table!
    vertices=[['Vertex ID'], ['Role']],
    switches=[['Vertex ID'], ['Even Successor', 'Odd Successor']],
)
# endregion

# region USER PARAMETERS
input_schema.add_parameter('Max Steps', default_value=0, **non_negative_integer)  # 0: unlimited
input_schema.add_parameter('Minimality Cap', default_value=0, **non_negative_integer)  # 0: skip the check
# endregion

# region OUTPUT SCHEMA
output_schema = PanDatFactory(
    kpis=[['KPI'], ['Value']],
    profile=[['Tail', 'Head'], ['Slot', 'Traversals', 'Desperation', 'Traversal Bound']],
    dead_ends=[['Vertex ID'], []],
)
# endregion

# region DATA TYPES AND PREDICATES - INPUT SCHEMA
# region vertices
table = 'vertices'
input_schema.set_data_type(table=table, field='Vertex ID', **text)
input_schema.set_data_type(table=table, field='Role', number_allowed=False, strings_allowed=tuple(VertexRoles))
# endregion

# region switches
table = 'switches'
input_schema.set_data_type(table=table, field='Vertex ID', **text)
input_schema.set_data_type(table=table, field='Even Successor', **text)
input_schema.set_data_type(table=table, field='Odd Successor', **text)
input_schema.add_foreign_key(native_table=table, foreign_table='vertices', mappings=['Vertex ID', 'Vertex ID'])
input_schema.add_foreign_key(native_table=table, foreign_table='vertices', mappings=['Even Successor', 'Vertex ID'])
input_schema.add_foreign_key(native_table=table, foreign_table='vertices', mappings=['Odd Successor', 'Vertex ID'])
# endregion

# endregion

# region DATA TYPES AND PREDICATES - OUTPUT SCHEMA

# region kpis
table = 'kpis'
output_schema.set_data_type(table=table, field='KPI', **text)
output_schema.set_data_type(table=table, field='Value', **float_number)
# endregion

# region profile
table = 'profile'
output_schema.set_data_type(table=table, field='Tail', **text)
output_schema.set_data_type(table=table, field='Head', **text)
output_schema.set_data_type(table=table, field='Slot', number_allowed=False, strings_allowed=tuple(EdgeSlots))
output_schema.set_data_type(table=table, field='Traversals', **non_negative_integer)
output_schema.set_data_type(table=table, field='Desperation', **non_negative_integer, nullable=True)
output_schema.set_data_type(table=table, field='Traversal Bound', **positive_integer, nullable=True)
output_schema.add_data_row_predicate(
    table=table, predicate_name='Traversals <= Traversal Bound',
    predicate=lambda row: pd.isna(row['Traversal Bound']) or row['Traversals'] <= row['Traversal Bound']
)
# endregion

# region dead_ends
table = 'dead_ends'
output_schema.set_data_type(table=table, field='Vertex ID', **text)
# endregion

# endregion
