from collections import namedtuple


# Constants for the outcome of a run
_Outcomes = namedtuple(
    'Outcomes', ['TERMINATES', 'CYCLES']
)
Outcomes = _Outcomes(
    TERMINATES='TERMINATES',
    CYCLES='CYCLES'
)

# Constants for the violated switching-flow condition
_ViolationKinds = namedtuple(
    'ViolationKinds', ['CONSERVATION', 'BALANCE']
)
ViolationKinds = _ViolationKinds(
    CONSERVATION='CONSERVATION',
    BALANCE='BALANCE'
)

# Constants for the 'Role' column of the vertices table
_VertexRoles = namedtuple(
    'VertexRoles', ['ORIGIN', 'DESTINATION', 'INTERNAL']
)
VertexRoles = _VertexRoles(
    ORIGIN='Origin',
    DESTINATION='Destination',
    INTERNAL='Internal'
)

# Constants for the switch slot an edge is taken from
_EdgeSlots = namedtuple(
    'EdgeSlots', ['EVEN', 'ODD', 'UNIQUE']
)
EdgeSlots = _EdgeSlots(
    EVEN='Even',
    ODD='Odd',
    UNIQUE='Unique'
)

# Constants for the instance families of the generators
_Families = namedtuple(
    'Families', ['COUNTER', 'ZIGZAG', 'TRAP', 'DIRECT', 'GAP', 'RANDOM']
)
Families = _Families(
    COUNTER='counter',
    ZIGZAG='zigzag',
    TRAP='trap',
    DIRECT='direct',
    GAP='gap',
    RANDOM='random'
)

# Constants for the gap search modes
_SearchModes = namedtuple(
    'SearchModes', ['EXHAUSTIVE', 'SEEDED_RANDOM']
)
SearchModes = _SearchModes(
    EXHAUSTIVE='exhaustive',
    SEEDED_RANDOM='seeded-random'
)

# Constants for the deciders reachable from the command line
_Oracles = namedtuple(
    'Oracles', ['DEAD_END', 'STATEREP']
)
Oracles = _Oracles(
    DEAD_END='deadend',
    STATEREP='staterep'
)

# Process exit codes of the command line
_ExitCodes = namedtuple(
    'ExitCodes', ['OK', 'USAGE', 'BAD_DOCUMENT', 'BUDGET_EXHAUSTED', 'TOO_LARGE']
)
ExitCodes = _ExitCodes(
    OK=0,
    USAGE=2,
    BAD_DOCUMENT=3,
    BUDGET_EXHAUSTED=4,
    TOO_LARGE=5
)

# Library defaults
_Defaults = namedtuple(
    'Defaults', ['STATE_CAP', 'ENUMERATION_BUDGET', 'MAX_ELIMINATION_VARIABLES', 'MAX_ELIMINATION_ROWS',
                 'GAP_SEARCH_BUDGET', 'LCG_MULTIPLIER', 'LCG_INCREMENT']
)
Defaults = _Defaults(
    STATE_CAP=25 * 2 ** 25,
    ENUMERATION_BUDGET=10 ** 7,
    MAX_ELIMINATION_VARIABLES=14,
    MAX_ELIMINATION_ROWS=20_000,
    GAP_SEARCH_BUDGET=10 ** 6,
    LCG_MULTIPLIER=6364136223846793005,
    LCG_INCREMENT=1442695040888963407
)
