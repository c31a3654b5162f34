__version__ = "0.1.0"
from mip_arrival.schemas import input_schema, output_schema
from mip_arrival.main import solve
from mip_arrival.switch_graph import Edge, Flow, Instance, analyze, export_dot
from mip_arrival.run_engine import decide, simulate, oracle_decide_staterep
