import logging

from mip_arrival.certificates import check_minimality
from mip_arrival.data_bridge import DatIn, DatOut
from mip_arrival.run_engine import decide
from mip_arrival.schemas import input_schema, output_schema
from mip_arrival.switch_graph import analyze

logger = logging.getLogger(__name__)


def solve(dat: input_schema.PanDat) -> output_schema.PanDat:
    dat_in = DatIn(dat)
    instance = dat_in.instance
    report = analyze(instance)
    decision = decide(instance, max_steps=dat_in.max_steps)
    minimality = None
    if dat_in.minimality_cap is not None:
        if decision.terminates:
            minimality = check_minimality(instance, dat_in.minimality_cap)
        else:
            logger.warning("Minimality check skipped: the run does not terminate")
    dat_out = DatOut(dat_in, decision, report, minimality)
    sln = dat_out.build_output()
    return sln
