import logging
from typing import Any, Dict, Optional

import pandas as pd
from ticdat import PanDatFactory

logger = logging.getLogger(__name__)


def set_input_parameter(schema, dat, name: str, value: Any):
    """
    Returns a copy of `dat` whose parameters table holds `value` for the parameter `name`.
    """
    assert isinstance(schema, PanDatFactory)
    assert isinstance(dat, schema.PanDat)
    assert isinstance(name, str)

    if not (name in schema.parameters):
        raise ValueError(f"Parameter {repr(name)} not found in schema.")

    params_df: pd.DataFrame = dat.parameters.copy()
    _dat = schema.copy_pan_dat(dat)

    if name in params_df["Name"].values:
        logger.info(f"Overwriting parameter {repr(name)} with new value {repr(value)}")
        params_df.loc[params_df["Name"] == name, "Value"] = value
    else:
        logger.info(f"Adding new parameter {repr(name)} with value {repr(value)}")
        new_row = pd.DataFrame({"Name": [name], "Value": [value]})
        params_df = pd.concat([params_df, new_row], ignore_index=True, axis=0)

    _dat.parameters = params_df

    return _dat


def set_multiple_input_parameters(schema, dat, parameters: Dict[str, Any]):
    _dat = schema.copy_pan_dat(dat)

    for param_name, param_value in parameters.items():
        _dat = set_input_parameter(schema, _dat, param_name, param_value)

    return _dat


def state_bound(num_vertices: int) -> int:
    """Number of distinct run states, n * 2^n."""
    return num_vertices * 2 ** num_vertices


class ArrivalError(Exception):
    """
    Base class of the errors raised by mip_arrival.
    """


class DocumentError(ArrivalError, ValueError):
    """
    Raised when a document (instance, flow, point) is malformed.

    The offending key, if any, is kept in the `key` attribute.
    """

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        super().__init__(message)
        self.key = key


class InstanceFormatError(DocumentError):
    """
    Raised when an instance document violates the switch graph invariants.
    """


class FlowFormatError(DocumentError):
    """
    Raised when a flow or rational point document cannot be read.
    """


class NonEdgeError(ArrivalError, ValueError):
    """
    Raised when a flow or a point puts a value on a pair that is not an edge of the instance.
    """

    def __init__(self, edge) -> None:
        super().__init__(f"{edge[0]}->{edge[1]} is not an edge of the instance")
        self.edge = edge


class DimensionMismatchError(ArrivalError, ValueError):
    """
    Raised when a rational point does not live in the space of a constraint system.
    """


class BudgetExhaustedError(ArrivalError):
    """
    Raised when a run exceeds its step budget before reaching a decision.
    """

    def __init__(self, steps: int, message: Optional[str] = None) -> None:
        super().__init__(message or f"budget exhausted after {steps} steps")
        self.steps = steps


class EnumerationBudgetError(BudgetExhaustedError):
    """
    Raised when the switching-flow enumeration examines more partial assignments than its budget.
    """

    def __init__(self, examined: int, budget: int) -> None:
        super().__init__(examined, f"enumeration budget exceeded: {examined} partial assignments examined > {budget}")
        self.budget = budget


class StateSpaceTooLargeError(ArrivalError):
    """
    Raised when the state-repetition oracle is asked to handle more states than its cap.
    """


class EliminationTooLargeError(ArrivalError):
    """
    Raised when Fourier-Motzkin elimination grows beyond its variable or row cap.
    """


class BadSolutionError(ArrivalError):
    """
    Raised when a solution is read from an optimization model that was not solved to optimality.
    """
