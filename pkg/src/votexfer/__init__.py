"""Vote transfer electoral systems: allocation, analytics, and simulation."""

from .core import (
    DistrictOutcome,
    DistrictTally,
    Election,
    ElectionError,
    FORMULAS,
    ListVoteBreakdown,
    Party,
    SeatShares,
    TieBreakPolicy,
    TieError,
    TierWeights,
    TransferFormula,
    ValidatedElection,
    ValidationError,
    ZeroTotalVotesError,
    district_outcome,
    list_vote_breakdown,
    list_vote_shares,
    parse_election,
    seat_shares,
    validate_election,
)
from .analytic import (
    DomainError,
    ExtremeScenario,
    Moments,
    UniformVoteModel,
    curve,
    expected_list_share,
    expected_preference_order,
    expected_seat_share,
    extreme_list_share,
    extreme_preference_order,
    moments,
)
from .montecarlo import (
    MajorityCategory,
    RunOutcome,
    SimConfig,
    SweepRow,
    Tally,
    classify,
    derive_seed,
    draw_districts,
    net_advantage,
    run_once,
    simulate,
    sweep,
)

__version__ = "0.1.0"
