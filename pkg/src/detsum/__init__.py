"""Deterministic all-targets subset sum and all-capacities 0-1 knapsack."""

from .bitmap import SumsetBitmap, ValueWindow, bool_convolve, union_into, witness_search
from .counters import WorkCounters, counting
from .discrepancy import Partition, SetSystem, discrepancy_bound, two_color
from .errors import (
    ContractViolation,
    DetsumError,
    DiscrepancyBoundError,
    ElementRangeError,
    MalformedInputError,
    NotAMemberError,
    NotInAnswerError,
    NoWitnessError,
    SizeLimitError,
    WindowMismatchError,
    WindowOverflowError,
    WitnessModeOffError,
)
from .halver import CanonicalCollection, Halver, build_halver, generate_canonicals
from .knapsack import (
    KnapsackItem,
    MaxPlusAlgebra,
    knapsack_all_capacities,
    knapsack_dnc,
    knapsack_layered,
    maxplus_convolve,
    pmax,
)
from .kx import layer_union, layered_sums, report_subset
from .oracle import Witness, bellman_dp, bellman_witness, dp_knapsack, exhaustive_sums
from .profile import NEG, ParetoProfile
from .solver import Instance, SolveReport, SolverConfig, all_targets, decide, dnc_sums, reconstruct

__version__ = "0.1.0"
