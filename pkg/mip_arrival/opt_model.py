"""
Contains the class that builds and solves the switching-flow integer program.

    min   sum_e x_e
    s.t.  (C1) sum_{e in E+(v)} x_e - sum_{e in E-(v)} x_e = +1 (v = o), -1 (v = d), 0 (otherwise)
          (C2) x(v, s1(v)) <= x(v, s0(v)) <= x(v, s1(v)) + 1      for every switch v
          0 <= x_e <= n * 2^n, x_e integer

For a terminating run the unique optimum is the run profile; for a cycling run the program is infeasible. With
relax=True the variables are continuous and the model may be feasible on cycling runs (integrality gap).
"""

import logging
import time

import pulp as plp

from mip_arrival.switch_graph import Flow, Instance
from mip_arrival.utils import BadSolutionError, state_bound

logger = logging.getLogger(__name__)


class SwitchingFlowModel:
    """
    Builds and solves the switching-flow model of an instance.
    """

    def __init__(self, instance: Instance, relax: bool = False, model_name: str = 'Switching_Flow') -> None:
        """
        Parameters
        ----------
        instance : Instance
        relax : bool
            If True, solve the LP relaxation (continuous variables).
        model_name : str
            A name for the optimization model.
        """
        self.instance = instance
        self.relax = relax
        self.model_name = model_name

        # initialize (PuLP) optimization model
        self.mdl = plp.LpProblem(model_name, plp.LpMinimize)

        # initialize placeholders
        self.sol = None
        self.vars = {}
        self.total_traversals = None  # will be created inside _build_objective()

    def build_base_model(self) -> None:
        logger.info('Building switching-flow model...')
        self._add_decision_variables()
        self._add_base_constraints()
        self._build_objective()

    def _add_decision_variables(self) -> None:
        instance = self.instance
        t1 = time.perf_counter()
        category = plp.LpContinuous if self.relax else plp.LpInteger
        x = {e: plp.LpVariable(f'x_{i}', lowBound=0, upBound=state_bound(instance.n), cat=category)
             for i, e in enumerate(instance.edges)}  # traversals per edge
        self.vars['x'] = x
        t2 = time.perf_counter()
        logger.info(f"ADDING DECISION VARS: {t2 - t1:.4f} s")

    def _add_base_constraints(self) -> None:
        mdl, instance = self.mdl, self.instance
        x = self.vars['x']

        t1 = time.perf_counter()
        # C1) Flow conservation:
        for i, v in enumerate(instance.vertices):
            outflow = plp.lpSum(x[e] for e in instance.out_edges(v))
            inflow = plp.lpSum(x[e] for e in instance.edges if e.head == v)
            mdl.addConstraint(outflow - inflow == instance.supply(v), name=f'C1_{i}')

        t2 = time.perf_counter()
        logger.info(f"ADDING C1: {t2 - t1:.4f} s")
        # C2) Balancing condition at the switches:
        for i, v in enumerate(instance.vertices):
            if not instance.is_switch(v):
                continue
            e_even, e_odd = instance.out_edges(v)
            mdl.addConstraint(x[e_odd] <= x[e_even], name=f'C2a_{i}')
            mdl.addConstraint(x[e_even] <= x[e_odd] + 1, name=f'C2b_{i}')

        t3 = time.perf_counter()
        logger.info(f"ADDING C2: {t3 - t2:.4f} s")

    def _build_objective(self) -> None:
        x = self.vars['x']
        self.total_traversals = plp.lpSum(x.values())
        self.mdl.setObjective(self.total_traversals)

    def optimize(self) -> None:
        """
        Calls the optimizer, and populates the solution data (if any).
        """
        logger.info('Solving the optimization model...')
        mdl = self.mdl

        mdl.solve(plp.PULP_CBC_CMD(msg=False))

        status = plp.LpStatus[mdl.status]
        logger.info(f"Model status: {status}")

        if mdl.status in [plp.LpStatusOptimal]:
            x = self.vars['x']
            x_sol = {e: var.varValue for e, var in x.items() if var.varValue is not None and var.varValue > 1e-6}
            self.sol = {
                'status': mdl.status,
                'obj_val': plp.value(mdl.objective),
                'vars': {'x': x_sol},
            }
        else:
            self.sol = {'status': mdl.status}

    @property
    def status(self) -> str:
        return plp.LpStatus[self.mdl.status]

    @property
    def is_optimal(self) -> bool:
        return self.sol is not None and self.sol['status'] == plp.LpStatusOptimal

    def solution_values(self) -> dict:
        """{edge: value} of the optimal solution (floats, as returned by the solver)."""
        if not self.is_optimal:
            raise BadSolutionError(f"Cannot read solution because it's not optimal. Solution status: {self.status}")
        return dict(self.sol['vars']['x'])

    def solution_flow(self) -> Flow:
        """The optimal solution of the integer program, rounded to a Flow."""
        if self.relax:
            raise BadSolutionError("The relaxed model has no integral solution to read")
        return Flow({e: int(round(value)) for e, value in self.solution_values().items()})


def solve_switching_flow(instance: Instance, relax: bool = False) -> SwitchingFlowModel:
    model = SwitchingFlowModel(instance, relax=relax)
    model.build_base_model()
    model.optimize()
    return model
