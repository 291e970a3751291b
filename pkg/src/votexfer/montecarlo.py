"""Reproducible Monte Carlo experiments for two-party vote transfer systems.

Each run draws one vote share per district for the majority party,
independently and uniformly from [k-h, k+h], then allocates seats under all
three transfer formulas at once and records which of them deliver a seat
majority (strictly more than half the seats).

Reproducibility contract: run ``i`` reads a fixed window of the Philox-4x64
counter stream keyed by the seed, so its draws depend only on
(seed, run index, district count) and never on chunking, thread count, or
execution order.  Tallies accumulate per-chunk partial sums over a fixed
chunk grid and reduce them in chunk order, which makes ``simulate`` return
bit-identical results for any worker count.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.random import Philox, SeedSequence

from .analytic import DomainError, UniformVoteModel
from .core import TransferFormula

#: Runs per work unit.  Fixed: changing it would regroup the floating-point
#: partial sums and perturb tallies in the last bits.
CHUNK_RUNS = 4096

_GENERATOR_ID = "philox-4x64"
_WORDS_PER_BLOCK = 4  # Philox-4x64 emits four 64-bit words per counter step
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2**-53


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation cell.

    Exactly one of ``m`` (list seat count) and ``alpha`` must be given;
    with ``m`` the SSD tier weight is derived as
    ``alpha = n_districts / (n_districts + m)``.
    """

    n_districts: int
    k: float
    h: float
    runs: int
    seed: int
    m: Optional[int] = None
    alpha: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.m is None) == (self.alpha is None):
            raise DomainError("exactly one of m and alpha must be set")
        if self.m is not None:
            if self.m < 0:
                raise DomainError(f"m must be non-negative, got {self.m}")
            object.__setattr__(
                self, "alpha", self.n_districts / (self.n_districts + self.m)
            )

    def validated(self) -> "SimConfig":
        """Raise DomainError unless every field is usable for simulation."""
        if self.n_districts < 1:
            raise DomainError(f"n_districts must be positive, got {self.n_districts}")
        if self.runs < 1:
            raise DomainError(f"runs must be positive, got {self.runs}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        UniformVoteModel(k=self.k, h=self.h)
        return self


class MajorityCategory(enum.Enum):
    """Which transfer formulas hand the majority party a seat majority."""

    ALL_THREE = "all_three"
    PVT_NVT = "pvt_nvt"
    DVT_NVT = "dvt_nvt"
    DVT_PVT = "dvt_pvt"
    DVT_ONLY = "dvt_only"
    PVT_ONLY = "pvt_only"
    NVT_ONLY = "nvt_only"
    MINORITY = "minority"


# Category by (dvt, pvt, nvt) majority flags encoded as 4*dvt + 2*pvt + nvt.
_CATEGORY_BY_CODE = (
    MajorityCategory.MINORITY,   # 000
    MajorityCategory.NVT_ONLY,   # 001
    MajorityCategory.PVT_ONLY,   # 010
    MajorityCategory.PVT_NVT,    # 011
    MajorityCategory.DVT_ONLY,   # 100
    MajorityCategory.DVT_NVT,    # 101
    MajorityCategory.DVT_PVT,    # 110
    MajorityCategory.ALL_THREE,  # 111
)


@dataclass(frozen=True)
class RunOutcome:
    """Seat shares and majority flags of one simulated election."""

    vote_share: float
    seat_share: dict[TransferFormula, float]
    majority: dict[TransferFormula, bool]
    districts_won: int
    ties: int = 0  # districts at exactly 0.5, awarded to the majority party


@dataclass(frozen=True)
class Tally:
    """Aggregate of a full simulation cell."""

    config: SimConfig
    rng_metadata: dict
    runs: int
    mean_vote_share: float
    mean_seat_share: dict
    counts: dict

    def majority_runs(self, formula: TransferFormula) -> int:
        """Total runs in which ``formula`` produced a seat majority."""
        c = self.counts
        if formula is TransferFormula.DVT:
            cats = (
                MajorityCategory.ALL_THREE,
                MajorityCategory.DVT_NVT,
                MajorityCategory.DVT_PVT,
                MajorityCategory.DVT_ONLY,
            )
        elif formula is TransferFormula.PVT:
            cats = (
                MajorityCategory.ALL_THREE,
                MajorityCategory.PVT_NVT,
                MajorityCategory.DVT_PVT,
                MajorityCategory.PVT_ONLY,
            )
        else:
            cats = (
                MajorityCategory.ALL_THREE,
                MajorityCategory.PVT_NVT,
                MajorityCategory.DVT_NVT,
                MajorityCategory.NVT_ONLY,
            )
        return sum(c[cat] for cat in cats)

    def to_json_dict(self) -> dict:
        """Serializable form with a fixed key order."""
        cfg = self.config
        return {
            "config": {
                "n_districts": cfg.n_districts,
                "m": cfg.m,
                "alpha": cfg.alpha,
                "k": cfg.k,
                "h": cfg.h,
                "runs": cfg.runs,
                "seed": cfg.seed,
            },
            "rng_metadata": dict(self.rng_metadata),
            "runs": self.runs,
            "mean_vote_share": self.mean_vote_share,
            "mean_seat_share": {
                f.value: self.mean_seat_share[f] for f in TransferFormula
            },
            "counts": {
                cat.value: self.counts[cat] for cat in MajorityCategory
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Tally":
        cfg = data["config"]
        config = SimConfig(
            n_districts=cfg["n_districts"],
            k=cfg["k"],
            h=cfg["h"],
            runs=cfg["runs"],
            seed=cfg["seed"],
            m=cfg["m"],
            alpha=None if cfg["m"] is not None else cfg["alpha"],
        )
        return cls(
            config=config,
            rng_metadata=dict(data["rng_metadata"]),
            runs=data["runs"],
            mean_vote_share=data["mean_vote_share"],
            mean_seat_share={
                f: data["mean_seat_share"][f.value] for f in TransferFormula
            },
            counts={
                cat: data["counts"][cat.value] for cat in MajorityCategory
            },
        )


def _rng_metadata(config: SimConfig) -> dict:
    return {
        "generator": _GENERATOR_ID,
        "seed": config.seed,
        "scheme": "per-run counter window",
    }


def _blocks_per_run(n_districts: int) -> int:
    return -(-n_districts // _WORDS_PER_BLOCK)


def _draw_block(config: SimConfig, start: int, stop: int) -> np.ndarray:
    """District shares for runs [start, stop) as a (stop-start, n) matrix.

    Run ``i`` maps to Philox counter blocks [i*B, (i+1)*B) where B is the
    per-run block count; trailing words of a run's last block are discarded.
    Raw 64-bit words become doubles in [0, 1) via the top 53 bits.
    """
    n = config.n_districts
    blocks = _blocks_per_run(n)
    count = stop - start
    bg = Philox(key=[config.seed, 0], counter=[start * blocks, 0, 0, 0])
    raw = bg.random_raw(count * blocks * _WORDS_PER_BLOCK)
    raw = raw.reshape(count, blocks * _WORDS_PER_BLOCK)[:, :n]
    unit = (raw >> np.uint64(11)) * _DOUBLE_SCALE
    return (config.k - config.h) + 2.0 * config.h * unit


def draw_districts(config: SimConfig, run_index: int) -> np.ndarray:
    """The district share vector of one run.

    Deterministic in (seed, run_index): repeated calls return identical
    values, and ``simulate`` consumes exactly these vectors.
    """
    config.validated()
    if not 0 <= run_index < config.runs:
        raise DomainError(f"run_index {run_index} outside [0, {config.runs})")
    return _draw_block(config, run_index, run_index + 1)[0]


def _chunk_stats(shares: np.ndarray, alpha: float) -> dict:
    """Per-run seat shares and majority codes for a block of runs.

    ``shares`` has one row per run.  All quantities are computed row-wise,
    so a run's outputs do not depend on which rows accompany it.
    """
    n = shares.shape[1]
    won = shares >= 0.5  # exact 0.5 is a flagged win for the majority party
    won_count = won.sum(axis=1)
    vote_share = shares.sum(axis=1) / n

    lost = ~won
    losing_majority = np.where(lost, shares, 0.0).sum(axis=1) / n
    losing_minority = np.where(won, 1.0 - shares, 0.0).sum(axis=1) / n
    wasted_majority = np.where(won, 2.0 * shares - 1.0, 0.0).sum(axis=1) / n
    wasted_minority = np.where(lost, 1.0 - 2.0 * shares, 0.0).sum(axis=1) / n

    ssd_share = won_count / n
    list_dvt = vote_share
    pvt_num = vote_share + losing_majority
    pvt_den = 1.0 + losing_majority + losing_minority
    list_pvt = pvt_num / pvt_den
    nvt_num = pvt_num + wasted_majority
    nvt_den = pvt_den + wasted_majority + wasted_minority
    list_nvt = nvt_num / nvt_den

    beta = 1.0 - alpha
    seat_dvt = alpha * ssd_share + beta * list_dvt
    seat_pvt = alpha * ssd_share + beta * list_pvt
    seat_nvt = alpha * ssd_share + beta * list_nvt

    maj_dvt = seat_dvt > 0.5
    maj_pvt = seat_pvt > 0.5
    maj_nvt = seat_nvt > 0.5
    codes = 4 * maj_dvt.astype(np.int64) + 2 * maj_pvt + maj_nvt

    return {
        "vote_share": vote_share,
        "seat_dvt": seat_dvt,
        "seat_pvt": seat_pvt,
        "seat_nvt": seat_nvt,
        "codes": codes,
        "won_count": won_count,
        "ties": (shares == 0.5).sum(axis=1),
    }


def run_once(shares: Sequence[float] | np.ndarray, config: SimConfig) -> RunOutcome:
    """Allocate one simulated election under all three formulas.

    ``shares`` are the majority party's district vote shares.  A district
    is won when its share exceeds 0.5; exactly 0.5 counts as a win for the
    majority party (lowest roster index) and is reported in ``ties``.
    """
    config.validated()
    arr = np.asarray(shares, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != config.n_districts:
        raise DomainError(
            f"expected {config.n_districts} district shares, got shape {arr.shape}"
        )
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise DomainError("district shares must lie in [0, 1]")
    stats = _chunk_stats(arr[np.newaxis, :], config.alpha)
    seat = {
        TransferFormula.DVT: float(stats["seat_dvt"][0]),
        TransferFormula.PVT: float(stats["seat_pvt"][0]),
        TransferFormula.NVT: float(stats["seat_nvt"][0]),
    }
    return RunOutcome(
        vote_share=float(stats["vote_share"][0]),
        seat_share=seat,
        majority={f: s > 0.5 for f, s in seat.items()},
        districts_won=int(stats["won_count"][0]),
        ties=int(stats["ties"][0]),
    )


def classify(outcome: RunOutcome) -> MajorityCategory:
    """Map a run's majority flags to its category."""
    code = (
        4 * outcome.majority[TransferFormula.DVT]
        + 2 * outcome.majority[TransferFormula.PVT]
        + outcome.majority[TransferFormula.NVT]
    )
    return _CATEGORY_BY_CODE[code]


def _chunk_partial(config: SimConfig, start: int, stop: int) -> tuple:
    shares = _draw_block(config, start, stop)
    stats = _chunk_stats(shares, config.alpha)
    return (
        float(np.sum(stats["vote_share"])),
        float(np.sum(stats["seat_dvt"])),
        float(np.sum(stats["seat_pvt"])),
        float(np.sum(stats["seat_nvt"])),
        np.bincount(stats["codes"], minlength=8),
    )


def simulate(config: SimConfig, threads: int = 1) -> Tally:
    """Run a full simulation cell and tally the outcomes.

    Results are bit-identical for a fixed config regardless of ``threads``:
    chunk boundaries are fixed and partial sums are reduced in chunk order.
    """
    config.validated()
    bounds = [
        (start, min(start + CHUNK_RUNS, config.runs))
        for start in range(0, config.runs, CHUNK_RUNS)
    ]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(
                pool.map(lambda b: _chunk_partial(config, *b), bounds)
            )
    else:
        partials = [_chunk_partial(config, *b) for b in bounds]

    sum_vote = 0.0
    sum_seat = [0.0, 0.0, 0.0]
    counts = np.zeros(8, dtype=np.int64)
    for vote, dvt, pvt, nvt, chunk_counts in partials:
        sum_vote += vote
        sum_seat[0] += dvt
        sum_seat[1] += pvt
        sum_seat[2] += nvt
        counts += chunk_counts

    runs = config.runs
    return Tally(
        config=config,
        rng_metadata=_rng_metadata(config),
        runs=runs,
        mean_vote_share=sum_vote / runs,
        mean_seat_share={
            TransferFormula.DVT: sum_seat[0] / runs,
            TransferFormula.PVT: sum_seat[1] / runs,
            TransferFormula.NVT: sum_seat[2] / runs,
        },
        counts={
            _CATEGORY_BY_CODE[code]: int(counts[code]) for code in range(8)
        },
    )


def net_advantage(tally: Tally, formula: TransferFormula) -> int:
    """Runs where ``formula`` won a majority but DVT did not, minus the reverse."""
    c = tally.counts
    if formula is TransferFormula.PVT:
        gain = c[MajorityCategory.PVT_NVT] + c[MajorityCategory.PVT_ONLY]
        loss = c[MajorityCategory.DVT_NVT] + c[MajorityCategory.DVT_ONLY]
    elif formula is TransferFormula.NVT:
        gain = c[MajorityCategory.PVT_NVT] + c[MajorityCategory.NVT_ONLY]
        loss = c[MajorityCategory.DVT_PVT] + c[MajorityCategory.DVT_ONLY]
    else:
        raise ValueError("net advantage is measured against DVT itself")
    return gain - loss


def derive_seed(master_seed: int, index: int) -> int:
    """Independent per-row seed for sweeps, stable in (master_seed, index)."""
    return int(SeedSequence((master_seed, index)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepRow:
    """One sweep cell: the config it ran with, and a tally or an error."""

    config: SimConfig
    tally: Optional[Tally] = None
    error: Optional[str] = None


def sweep(
    configs: Iterable[SimConfig],
    master_seed: Optional[int] = None,
    threads: int = 1,
) -> list[SweepRow]:
    """Simulate a list of cells, one row per config, in input order.

    With ``master_seed`` set, row ``i`` runs under an independent seed
    derived from (master_seed, i) in place of its config's own.  A row
    whose config is invalid yields an error entry without aborting the
    remaining rows.
    """
    rows: list[SweepRow] = []
    for index, config in enumerate(configs):
        if master_seed is not None:
            config = SimConfig(
                n_districts=config.n_districts,
                k=config.k,
                h=config.h,
                runs=config.runs,
                seed=derive_seed(master_seed, index),
                m=config.m,
                alpha=None if config.m is not None else config.alpha,
            )
        try:
            rows.append(SweepRow(config=config, tally=simulate(config, threads)))
        except DomainError as exc:
            rows.append(SweepRow(config=config, error=str(exc)))
    return rows
