"""Seat allocation engine for mixed-member vote transfer elections.

A vote transfer election has two tiers: single-seat districts (SSDs) won by
plurality, and a proportional list tier fed by the district votes plus an
optional compensation pool.  Three transfer formulas are supported:

* DVT (direct): the list pool is just the raw district votes.
* PVT (positive): losing candidates' votes are added to the pool.
* NVT (negative): winners' surplus over the runner-up is added as well.

Seat shares are real-valued throughout; no integer apportionment is applied,
so the list tier is exactly proportional to the pool.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass


class TransferFormula(enum.Enum):
    """The three list-pool compensation rules."""

    DVT = "dvt"
    PVT = "pvt"
    NVT = "nvt"


#: All formulas in canonical order (DVT, PVT, NVT).
FORMULAS: tuple[TransferFormula, ...] = (
    TransferFormula.DVT,
    TransferFormula.PVT,
    TransferFormula.NVT,
)


class TieBreakPolicy(enum.Enum):
    """How to resolve a shared top vote count in a district.

    REJECT raises :class:`TieError`; LOWEST_INDEX awards the seat to the
    tied party with the smallest roster index and flags the outcome.
    """

    REJECT = "reject"
    LOWEST_INDEX = "lowest-index"


class ElectionError(Exception):
    """Base class for errors raised by the allocation engine."""


class TieError(ElectionError):
    """A district's top vote count is shared and the policy is REJECT."""

    def __init__(self, parties: tuple[int, ...], district: int | None = None):
        self.district = district
        self.parties = parties
        where = "" if district is None else f"district {district}: "
        super().__init__(
            f"{where}top vote count shared by parties {list(parties)}"
        )


class ZeroTotalVotesError(ElectionError):
    """Every party's list pool is empty; shares are undefined."""


# Violation codes reported by validate_election.
EMPTY_ELECTION = "empty-election"
EMPTY_ROSTER = "empty-roster"
RAGGED_DISTRICT = "ragged-district"
ALL_ZERO_DISTRICT = "all-zero-district"
NEGATIVE_VOTES = "negative-votes"
DUPLICATE_PARTY = "duplicate-party"


@dataclass(frozen=True)
class Violation:
    """One defect found while validating an election."""

    code: str
    district: int | None = None

    def __str__(self) -> str:
        if self.district is None:
            return self.code
        return f"{self.code} (district {self.district})"


class ValidationError(ElectionError):
    """The election is malformed; carries the full list of violations."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class UnequalDistrictSizeWarning(UserWarning):
    """Districts differ in total votes; list pools still use raw counts."""


@dataclass(frozen=True)
class Party:
    index: int
    name: str


@dataclass(frozen=True)
class DistrictTally:
    """Vote counts for one district, one entry per roster party."""

    votes: tuple[int, ...]

    def total(self) -> int:
        return sum(self.votes)


@dataclass(frozen=True)
class Election:
    parties: tuple[Party, ...]
    districts: tuple[DistrictTally, ...]

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    @property
    def n_districts(self) -> int:
        return len(self.districts)

    @classmethod
    def from_votes(
        cls, names: list[str], rows: list[list[int]]
    ) -> "Election":
        """Build an election from party names and per-district vote rows."""
        parties = tuple(Party(i, name) for i, name in enumerate(names))
        districts = tuple(DistrictTally(tuple(row)) for row in rows)
        return cls(parties, districts)


@dataclass(frozen=True)
class ValidatedElection:
    """An election that passed :func:`validate_election`."""

    election: Election

    @property
    def parties(self) -> tuple[Party, ...]:
        return self.election.parties

    @property
    def districts(self) -> tuple[DistrictTally, ...]:
        return self.election.districts

    @property
    def n_parties(self) -> int:
        return self.election.n_parties

    @property
    def n_districts(self) -> int:
        return self.election.n_districts


@dataclass(frozen=True)
class TierWeights:
    """Weight of the SSD tier: combined = alpha*ssd + (1-alpha)*list."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_seats(cls, n_ssd: int, m: int) -> "TierWeights":
        """Derive alpha = n_ssd / (n_ssd + m) from seat counts.

        The division is a single correctly-rounded float operation on exact
        integers, so e.g. (100, 100) yields alpha == 0.5 exactly.
        """
        if n_ssd < 1:
            raise ValueError(f"n_ssd must be positive, got {n_ssd}")
        if m < 0:
            raise ValueError(f"list seat count must be non-negative, got {m}")
        return cls(n_ssd / (n_ssd + m))


@dataclass(frozen=True)
class DistrictOutcome:
    """Winner, runner-up, and winning margin for one district."""

    winner: int
    runner_up: int
    margin: int
    tie_broken: bool = False


@dataclass(frozen=True)
class ListVoteBreakdown:
    """Per-party list pool components under one transfer formula.

    ``direct`` is each party's raw vote total; ``losing`` its votes in
    districts it did not win; ``wasted`` the sum of its winning margins.
    Components not used by the formula are exposed as zeros, so ``total``
    always equals ``direct + losing + wasted``.
    """

    formula: TransferFormula
    direct: tuple[int, ...]
    losing: tuple[int, ...]
    wasted: tuple[int, ...]
    total: tuple[int, ...]


@dataclass(frozen=True)
class SeatShares:
    """SSD, list, and combined seat shares, one entry per party."""

    alpha: float
    ssd_share: tuple[float, ...]
    list_share: tuple[float, ...]
    combined: tuple[float, ...]


def validate_election(election: Election) -> ValidatedElection:
    """Check an election's structural invariants.

    Raises :class:`ValidationError` collecting every violation found:
    an empty district list or roster, district rows that do not cover the
    roster, all-zero districts, negative votes, duplicate party names.
    Districts of unequal total size are legal but trigger an
    :class:`UnequalDistrictSizeWarning`, since the analytic results assume
    equal-sized districts.
    """
    violations: list[Violation] = []
    if not election.parties:
        violations.append(Violation(EMPTY_ROSTER))
    if not election.districts:
        violations.append(Violation(EMPTY_ELECTION))
    names = [p.name for p in election.parties]
    if len(set(names)) != len(names):
        violations.append(Violation(DUPLICATE_PARTY))
    n = election.n_parties
    for d, tally in enumerate(election.districts):
        if len(tally.votes) != n:
            violations.append(Violation(RAGGED_DISTRICT, d))
            continue
        if any(v < 0 for v in tally.votes):
            violations.append(Violation(NEGATIVE_VOTES, d))
        elif all(v == 0 for v in tally.votes):
            violations.append(Violation(ALL_ZERO_DISTRICT, d))
    if violations:
        raise ValidationError(violations)

    sizes = {tally.total() for tally in election.districts}
    if len(sizes) > 1:
        warnings.warn(
            f"districts have unequal sizes {sorted(sizes)}",
            UnequalDistrictSizeWarning,
            stacklevel=2,
        )
    return ValidatedElection(election)


def district_outcome(
    tally: DistrictTally,
    policy: TieBreakPolicy = TieBreakPolicy.REJECT,
) -> DistrictOutcome:
    """Determine a district's winner, runner-up, and margin.

    The winner is the party with the most votes.  A shared top count raises
    :class:`TieError` under REJECT and goes to the lowest roster index under
    LOWEST_INDEX.  The runner-up holds the second-highest count; ties among
    runners-up are always broken by lowest index (the margin is the same for
    every choice).  ``tie_broken`` is set whenever either selection needed a
    tie break.
    """
    votes = tally.votes
    if len(votes) < 2:
        raise ValueError("a district needs at least two parties")
    top = max(votes)
    leaders = tuple(i for i, v in enumerate(votes) if v == top)
    tie_broken = len(leaders) > 1
    if tie_broken and policy is TieBreakPolicy.REJECT:
        raise TieError(leaders)
    winner = leaders[0]
    second = max(v for i, v in enumerate(votes) if i != winner)
    runners = tuple(i for i, v in enumerate(votes) if v == second and i != winner)
    tie_broken = tie_broken or len(runners) > 1
    runner_up = runners[0]
    return DistrictOutcome(
        winner=winner,
        runner_up=runner_up,
        margin=votes[winner] - votes[runner_up],
        tie_broken=tie_broken,
    )


def district_outcomes(
    election: ValidatedElection,
    policy: TieBreakPolicy = TieBreakPolicy.REJECT,
) -> list[DistrictOutcome]:
    """Outcomes for every district, with district indices in tie errors."""
    outcomes = []
    for d, tally in enumerate(election.districts):
        try:
            outcomes.append(district_outcome(tally, policy))
        except TieError as exc:
            raise TieError(exc.parties, district=d) from None
    return outcomes


def list_vote_breakdown(
    election: ValidatedElection,
    formula: TransferFormula,
    policy: TieBreakPolicy = TieBreakPolicy.REJECT,
) -> ListVoteBreakdown:
    """Aggregate each party's list pool under the given formula.

    All totals are exact integers.  Under DVT the losing and wasted
    components are zero; PVT adds losing votes; NVT adds winners' margins
    on top of that.
    """
    n = election.n_parties
    outcomes = district_outcomes(election, policy)
    direct = [0] * n
    losing = [0] * n
    wasted = [0] * n
    for tally, outcome in zip(election.districts, outcomes):
        for p, v in enumerate(tally.votes):
            direct[p] += v
            if p != outcome.winner:
                losing[p] += v
        wasted[outcome.winner] += outcome.margin
    if formula is TransferFormula.DVT:
        losing = [0] * n
        wasted = [0] * n
    elif formula is TransferFormula.PVT:
        wasted = [0] * n
    total = [d + l + w for d, l, w in zip(direct, losing, wasted)]
    return ListVoteBreakdown(
        formula=formula,
        direct=tuple(direct),
        losing=tuple(losing),
        wasted=tuple(wasted),
        total=tuple(total),
    )


def list_vote_shares(breakdown: ListVoteBreakdown) -> tuple[float, ...]:
    """Normalize pool totals to shares summing to one."""
    grand = sum(breakdown.total)
    if grand == 0:
        raise ZeroTotalVotesError("all list pool totals are zero")
    return tuple(t / grand for t in breakdown.total)


def seat_shares(
    election: ValidatedElection,
    formula: TransferFormula,
    weights: TierWeights,
    policy: TieBreakPolicy = TieBreakPolicy.REJECT,
) -> SeatShares:
    """Combine SSD and list tiers into per-party seat shares.

    combined(p) = alpha * ssd_share(p) + (1 - alpha) * list_share(p).
    """
    n_districts = election.n_districts
    outcomes = district_outcomes(election, policy)
    won = [0] * election.n_parties
    for outcome in outcomes:
        won[outcome.winner] += 1
    ssd = tuple(w / n_districts for w in won)
    lst = list_vote_shares(list_vote_breakdown(election, formula, policy))
    a = weights.alpha
    combined = tuple(a * s + (1.0 - a) * l for s, l in zip(ssd, lst))
    return SeatShares(alpha=a, ssd_share=ssd, list_share=lst, combined=combined)


def parse_election(source: str | dict) -> Election:
    """Parse the election JSON schema.

    Expected shape: ``{"parties": ["A", ...], "districts": [[65, 35], ...]}``
    with integer vote counts.  Structural invariants (coverage, emptiness)
    are left to :func:`validate_election`; this only checks the JSON shape.
    """
    data = json.loads(source) if isinstance(source, str) else source
    if not isinstance(data, dict):
        raise ValueError("election input must be a JSON object")
    try:
        names = data["parties"]
        rows = data["districts"]
    except (KeyError, TypeError):
        raise ValueError('election input needs "parties" and "districts" keys')
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise ValueError('"parties" must be a list of strings')
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValueError('"districts" must be a list of vote-count lists')
    for row in rows:
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"vote counts must be integers, got {v!r}")
    return Election.from_votes(names, rows)
