"""Tests for the seat allocation engine."""

import random
import warnings

import pytest

from votexfer import core
from votexfer.core import (
    ALL_ZERO_DISTRICT,
    EMPTY_ELECTION,
    EMPTY_ROSTER,
    FORMULAS,
    NEGATIVE_VOTES,
    RAGGED_DISTRICT,
    DistrictTally,
    Election,
    TieBreakPolicy,
    TieError,
    TierWeights,
    TransferFormula,
    UnequalDistrictSizeWarning,
    ValidationError,
    ZeroTotalVotesError,
    district_outcome,
    list_vote_breakdown,
    list_vote_shares,
    parse_election,
    seat_shares,
    validate_election,
)

DVT, PVT, NVT = TransferFormula.DVT, TransferFormula.PVT, TransferFormula.NVT


@pytest.fixture
def example1():
    """Two parties, two districts: {A:65, B:35} and {A:45, B:55}."""
    return validate_election(Election.from_votes(["A", "B"], [[65, 35], [45, 55]]))


def _random_election(rng, n_parties=None, n_districts=None):
    n_parties = n_parties or rng.randint(2, 5)
    n_districts = n_districts or rng.randint(1, 8)
    size = rng.randint(50, 500)
    rows = []
    for _ in range(n_districts):
        cuts = sorted(rng.randint(0, size) for _ in range(n_parties - 1))
        row = [b - a for a, b in zip([0] + cuts, cuts + [size])]
        rows.append(row)
    names = [f"P{i}" for i in range(n_parties)]
    return validate_election(Election.from_votes(names, rows))


class TestValidation:
    def test_example1_is_valid(self, example1):
        assert example1.n_parties == 2
        assert example1.n_districts == 2

    def test_empty_election(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(Election.from_votes(["A", "B"], []))
        assert [v.code for v in exc.value.violations] == [EMPTY_ELECTION]

    def test_empty_roster(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(Election.from_votes([], [[1]]))
        codes = [v.code for v in exc.value.violations]
        assert EMPTY_ROSTER in codes

    def test_ragged_district(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(Election.from_votes(["A", "B"], [[65, 35], [45]]))
        violations = exc.value.violations
        assert violations[0].code == RAGGED_DISTRICT
        assert violations[0].district == 1

    def test_all_zero_district(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(Election.from_votes(["A", "B"], [[0, 0]]))
        assert exc.value.violations[0].code == ALL_ZERO_DISTRICT

    def test_negative_votes(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(Election.from_votes(["A", "B"], [[5, -1]]))
        assert exc.value.violations[0].code == NEGATIVE_VOTES

    def test_collects_multiple_violations(self):
        with pytest.raises(ValidationError) as exc:
            validate_election(
                Election.from_votes(["A", "B"], [[0, 0], [1], [2, 3]])
            )
        codes = {v.code for v in exc.value.violations}
        assert codes == {ALL_ZERO_DISTRICT, RAGGED_DISTRICT}

    def test_unequal_sizes_warn(self):
        with pytest.warns(UnequalDistrictSizeWarning):
            validate_election(
                Election.from_votes(["A", "B"], [[65, 35], [4, 5]])
            )

    def test_equal_sizes_do_not_warn(self, recwarn):
        validate_election(Election.from_votes(["A", "B"], [[65, 35], [45, 55]]))
        assert not [
            w for w in recwarn if issubclass(w.category, UnequalDistrictSizeWarning)
        ]


class TestDistrictOutcome:
    def test_example1_district1(self):
        out = district_outcome(DistrictTally((65, 35)))
        assert out.winner == 0
        assert out.runner_up == 1
        assert out.margin == 30
        assert not out.tie_broken

    def test_two_party_tie_lowest_index(self):
        out = district_outcome(DistrictTally((50, 50)), TieBreakPolicy.LOWEST_INDEX)
        assert out.winner == 0
        assert out.margin == 0
        assert out.tie_broken

    def test_two_party_tie_reject(self):
        with pytest.raises(TieError):
            district_outcome(DistrictTally((50, 50)), TieBreakPolicy.REJECT)

    def test_three_parties(self):
        out = district_outcome(DistrictTally((10, 30, 20)))
        assert out.winner == 1
        assert out.runner_up == 2
        assert out.margin == 10

    def test_runner_up_tie_is_flagged_not_rejected(self):
        out = district_outcome(DistrictTally((30, 20, 20)), TieBreakPolicy.REJECT)
        assert out.winner == 0
        assert out.runner_up == 1
        assert out.margin == 10
        assert out.tie_broken

    def test_tie_error_carries_district_index(self, example1):
        tied = validate_election(
            Election.from_votes(["A", "B"], [[65, 35], [50, 50]])
        )
        with pytest.raises(TieError) as exc:
            core.district_outcomes(tied)
        assert exc.value.district == 1


class TestBreakdown:
    def test_example1_dvt(self, example1):
        b = list_vote_breakdown(example1, DVT)
        assert b.total == (110, 90)
        assert b.losing == (0, 0)
        assert b.wasted == (0, 0)

    def test_example1_pvt(self, example1):
        b = list_vote_breakdown(example1, PVT)
        assert b.direct == (110, 90)
        assert b.losing == (45, 35)
        assert b.total == (155, 125)

    def test_example1_nvt(self, example1):
        b = list_vote_breakdown(example1, NVT)
        assert b.losing == (45, 35)
        assert b.wasted == (30, 10)
        assert b.total == (185, 135)

    def test_single_district_dvt_identity(self):
        e = validate_election(Election.from_votes(["A", "B"], [[65, 35]]))
        b = list_vote_breakdown(e, DVT)
        assert b.total == (65, 35)

    def test_totals_are_exact_integers(self, example1):
        for f in FORMULAS:
            b = list_vote_breakdown(example1, f)
            assert all(type(t) is int for t in b.total)

    def test_pool_monotonicity(self):
        rng = random.Random(73)
        for _ in range(50):
            e = _random_election(rng)
            policy = TieBreakPolicy.LOWEST_INDEX
            dvt = list_vote_breakdown(e, DVT, policy).total
            pvt = list_vote_breakdown(e, PVT, policy).total
            nvt = list_vote_breakdown(e, NVT, policy).total
            assert all(a <= b <= c for a, b, c in zip(dvt, pvt, nvt))

    def test_dvt_locality(self):
        # Moving a party's fixed national total between districts never
        # changes its DVT list share, even when winners flip.  The moved
        # elections have unequal district sizes by construction.
        rng = random.Random(21)
        for _ in range(25):
            e = _random_election(rng, n_districts=rng.randint(2, 6))
            base = list_vote_shares(
                list_vote_breakdown(e, DVT, TieBreakPolicy.LOWEST_INDEX)
            )
            rows = [list(t.votes) for t in e.districts]
            total0 = sum(r[0] for r in rows)
            cuts = sorted(rng.randint(0, total0) for _ in range(len(rows) - 1))
            redistributed = [b - a for a, b in zip([0] + cuts, cuts + [total0])]
            for row, v in zip(rows, redistributed):
                row[0] = v
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UnequalDistrictSizeWarning)
                moved = validate_election(
                    Election.from_votes([p.name for p in e.parties], rows)
                )
            shifted = list_vote_shares(
                list_vote_breakdown(moved, DVT, TieBreakPolicy.LOWEST_INDEX)
            )
            assert shifted == base

    def test_two_party_wasted_identity(self):
        # Winner takes all districts: its wasted total is direct(w) - direct(l).
        rng = random.Random(99)
        for _ in range(25):
            n_districts = rng.randint(1, 6)
            rows = []
            for _ in range(n_districts):
                loser = rng.randint(0, 49)
                rows.append([100 - loser, loser])
            e = validate_election(Election.from_votes(["A", "B"], rows))
            b = list_vote_breakdown(e, NVT)
            assert b.wasted[0] == b.direct[0] - b.direct[1]
            assert b.wasted[1] == 0


class TestShares:
    def test_example1_nvt_shares(self, example1):
        shares = list_vote_shares(list_vote_breakdown(example1, NVT))
        assert shares[0] == pytest.approx(185 / 320, abs=1e-15)
        assert shares[0] == pytest.approx(0.578125, abs=1e-12)

    def test_example1_pvt_shares(self, example1):
        shares = list_vote_shares(list_vote_breakdown(example1, PVT))
        assert shares[0] == pytest.approx(155 / 280, abs=1e-15)
        assert shares[0] == pytest.approx(0.553571, abs=1e-6)

    def test_equal_totals(self):
        e = validate_election(Election.from_votes(["A", "B"], [[40, 40]]))
        shares = list_vote_shares(list_vote_breakdown(e, DVT, TieBreakPolicy.LOWEST_INDEX))
        assert shares == (0.5, 0.5)

    def test_zero_total_raises(self):
        broken = core.ListVoteBreakdown(
            formula=DVT, direct=(0, 0), losing=(0, 0), wasted=(0, 0), total=(0, 0)
        )
        with pytest.raises(ZeroTotalVotesError):
            list_vote_shares(broken)


class TestSeatShares:
    def test_example1_dvt(self, example1):
        s = seat_shares(example1, DVT, TierWeights(0.6))
        assert s.combined[0] == pytest.approx(0.52, abs=1e-12)
        assert s.combined[1] == pytest.approx(0.48, abs=1e-12)

    def test_example1_pvt(self, example1):
        s = seat_shares(example1, PVT, TierWeights(0.6))
        assert s.combined[0] == pytest.approx(0.6 * 0.5 + 0.4 * 155 / 280, abs=1e-12)
        assert s.combined[0] == pytest.approx(0.5214, abs=5e-5)

    def test_example1_nvt(self, example1):
        s = seat_shares(example1, NVT, TierWeights(0.6))
        assert s.combined[0] == pytest.approx(0.53125, abs=1e-12)
        assert s.combined[1] == pytest.approx(0.46875, abs=1e-12)

    def test_alpha_one_is_pure_ssd(self, example1):
        for f in FORMULAS:
            s = seat_shares(example1, f, TierWeights(1.0))
            assert s.combined == s.ssd_share

    def test_alpha_zero_is_pure_list(self, example1):
        for f in FORMULAS:
            s = seat_shares(example1, f, TierWeights(0.0))
            assert s.combined == s.list_share

    def test_columns_sum_to_one(self):
        rng = random.Random(5)
        for _ in range(50):
            e = _random_election(rng)
            alpha = rng.random()
            for f in FORMULAS:
                s = seat_shares(e, f, TierWeights(alpha), TieBreakPolicy.LOWEST_INDEX)
                for column in (s.ssd_share, s.list_share, s.combined):
                    assert sum(column) == pytest.approx(1.0, abs=1e-12)

    def test_alpha_linearity(self, example1):
        for f in FORMULAS:
            at0 = seat_shares(example1, f, TierWeights(0.0)).combined
            at1 = seat_shares(example1, f, TierWeights(1.0)).combined
            for alpha in (0.2, 0.35, 0.6452, 0.98):
                got = seat_shares(example1, f, TierWeights(alpha)).combined
                for g, lo, hi in zip(got, at0, at1):
                    assert g == pytest.approx(alpha * hi + (1 - alpha) * lo, abs=1e-12)


class TestTierWeights:
    def test_from_seats_is_exact(self):
        assert TierWeights.from_seats(100, 100).alpha == 0.5
        assert TierWeights.from_seats(100, 55).alpha == 100 / 155
        assert TierWeights.from_seats(1, 0).alpha == 1.0

    @pytest.mark.parametrize("alpha", [-0.1, 1.0001, 2.0])
    def test_alpha_bounds(self, alpha):
        with pytest.raises(ValueError):
            TierWeights(alpha)

    def test_from_seats_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            TierWeights.from_seats(0, 10)
        with pytest.raises(ValueError):
            TierWeights.from_seats(100, -1)


class TestParse:
    def test_round_trip(self):
        text = '{"parties": ["A", "B"], "districts": [[65, 35], [45, 55]]}'
        e = parse_election(text)
        assert [p.name for p in e.parties] == ["A", "B"]
        assert e.districts[1].votes == (45, 55)

    def test_accepts_dict(self):
        e = parse_election({"parties": ["A", "B"], "districts": [[1, 2]]})
        assert e.n_districts == 1

    @pytest.mark.parametrize(
        "payload",
        [
            "[1, 2]",
            '{"parties": ["A"]}',
            '{"parties": "A", "districts": []}',
            '{"parties": ["A"], "districts": [[1.5]]}',
            '{"parties": ["A"], "districts": [[true]]}',
        ],
    )
    def test_rejects_malformed(self, payload):
        with pytest.raises(ValueError):
            parse_election(payload)
