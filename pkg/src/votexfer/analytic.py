"""Closed-form two-party results for vote transfer systems.

Two settings are covered.  In the extreme scenarios the majority party
(national vote share ``x`` above one half) either wins every district or
loses as many as its share allows; the resulting list shares have simple
rational closed forms.  In the stochastic setting the party's district vote
share is uniform on ``[k-h, k+h]`` with ``0.5 < k < 0.5+h``; the expected
list and seat shares follow from the distribution's win probability and
conditional moments.  Expected list shares here are ratios of expected
pools, which is what the large-district-count limit of the simulation
converges to.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import TierWeights, TransferFormula


class DomainError(ValueError):
    """Parameter outside the region where the closed forms are valid."""


class ExtremeScenario(enum.Enum):
    """District splits with closed-form list shares."""

    ALL_DISTRICTS_WON = "all-districts-won"
    MAX_DISTRICTS_LOST = "max-districts-lost"


def _check_majority_share(x: float) -> None:
    if not 0.5 < x < 1.0:
        raise DomainError(f"majority vote share must lie in (0.5, 1), got {x}")


def extreme_list_share(
    scenario: ExtremeScenario, formula: TransferFormula, x: float
) -> float:
    """List vote share of the majority party in an extreme district split.

    With the majority party on national share ``x``:

    ==================  =======  ===========  =============
    scenario            DVT      PVT          NVT
    ==================  =======  ===========  =============
    ALL_DISTRICTS_WON   x        x/(2-x)      (3x-1)/(1+x)
    MAX_DISTRICTS_LOST  x        1/(2-x)      2x/(1+x)
    ==================  =======  ===========  =============
    """
    _check_majority_share(x)
    if scenario is ExtremeScenario.ALL_DISTRICTS_WON:
        if formula is TransferFormula.DVT:
            return x
        if formula is TransferFormula.PVT:
            return x / (2.0 - x)
        return (3.0 * x - 1.0) / (1.0 + x)
    if formula is TransferFormula.DVT:
        return x
    if formula is TransferFormula.PVT:
        return 1.0 / (2.0 - x)
    return 2.0 * x / (1.0 + x)


def extreme_preference_order(
    scenario: ExtremeScenario,
) -> tuple[TransferFormula, ...]:
    """Majority party's formula preference, best first.

    Winning every district favours no compensation; losing as many as
    possible reverses the order and puts the margin-refunding rule first.
    """
    if scenario is ExtremeScenario.ALL_DISTRICTS_WON:
        return (TransferFormula.DVT, TransferFormula.NVT, TransferFormula.PVT)
    return (TransferFormula.NVT, TransferFormula.PVT, TransferFormula.DVT)


@dataclass(frozen=True)
class UniformVoteModel:
    """Per-district majority vote share uniform on [k-h, k+h].

    Requires ``0.5 < k < 0.5 + h`` (the party leads in expectation but can
    lose a district) and support within [0, 1].
    """

    k: float
    h: float

    def __post_init__(self) -> None:
        if self.h <= 0.0:
            raise DomainError(f"h must be positive, got h={self.h}")
        if not 0.5 < self.k < 0.5 + self.h:
            raise DomainError(
                f"k={self.k} outside (0.5, {0.5 + self.h}) for h={self.h}"
            )
        if self.k - self.h < 0.0 or self.k + self.h > 1.0:
            raise DomainError(
                f"support [{self.k - self.h}, {self.k + self.h}] exceeds [0, 1]"
            )


@dataclass(frozen=True)
class Moments:
    """Win probability and conditional moments of the district share.

    pi:    probability the majority party wins an SSD
    beta:  its expected vote share in an SSD won
    gamma: its expected vote share in an SSD lost
    delta: expected winning margin in an SSD won
    nabla: expected losing margin in an SSD lost
    """

    pi: float
    beta: float
    gamma: float
    delta: float
    nabla: float


def moments(model: UniformVoteModel) -> Moments:
    """Conditional moments of the uniform district-share distribution."""
    k, h = model.k, model.h
    return Moments(
        pi=0.5 + (k - 0.5) / (2.0 * h),
        beta=(0.5 + k + h) / 2.0,
        gamma=(0.5 + k - h) / 2.0,
        delta=k + h - 0.5,
        nabla=0.5 - k + h,
    )


def expected_list_share(
    model: UniformVoteModel, formula: TransferFormula
) -> float:
    """Expected list vote share of the majority party.

    DVT depends only on the expected national share; the compensating
    formulas divide the expected majority pool by the expected total pool:

        DVT: k
        PVT: (k + (1-pi)*gamma) / (1 + (1-pi)*gamma + pi*(1-beta))
        NVT: (k + (1-pi)*gamma + pi*delta)
             / (1 + (1-pi)*gamma + pi*(1-beta) + pi*delta + (1-pi)*nabla)
    """
    if formula is TransferFormula.DVT:
        _ = moments(model)  # still validates the model
        return model.k
    mo = moments(model)
    losing_majority = (1.0 - mo.pi) * mo.gamma
    losing_minority = mo.pi * (1.0 - mo.beta)
    if formula is TransferFormula.PVT:
        num = model.k + losing_majority
        den = 1.0 + losing_majority + losing_minority
        return num / den
    wasted_majority = mo.pi * mo.delta
    wasted_minority = (1.0 - mo.pi) * mo.nabla
    num = model.k + losing_majority + wasted_majority
    den = 1.0 + losing_majority + losing_minority + wasted_majority + wasted_minority
    return num / den


def expected_seat_share(
    model: UniformVoteModel,
    formula: TransferFormula,
    weights: TierWeights,
) -> float:
    """Expected combined seat share: alpha*pi + (1-alpha)*list share."""
    mo = moments(model)
    ell = expected_list_share(model, formula)
    return weights.alpha * mo.pi + (1.0 - weights.alpha) * ell


def expected_preference_order(
    model: UniformVoteModel,
) -> tuple[TransferFormula, ...]:
    """Formula preference by expected seat share, best first.

    For h below 1 - 1/sqrt(2) (about 0.2929) this is always
    (DVT, NVT, PVT).  For wider distributions the NVT share can exceed k
    near the lower edge of the valid strip, so the order is computed from
    the shares themselves and agrees with :func:`expected_list_share`
    pointwise by construction.
    """
    shares = {f: expected_list_share(model, f) for f in TransferFormula}
    return tuple(sorted(shares, key=shares.__getitem__, reverse=True))


def curve(
    formula: TransferFormula,
    h: float,
    k_grid: Iterable[float],
    weights: Optional[TierWeights] = None,
) -> list[tuple[float, float]]:
    """Evaluate a formula's expected share along a grid of k values.

    Returns (k, expected list share) pairs, or expected seat shares when
    ``weights`` is given.  Grid order is preserved.  A k outside the valid
    strip raises :class:`DomainError` naming the offending value.
    """
    series: list[tuple[float, float]] = []
    for k in k_grid:
        model = UniformVoteModel(k=k, h=h)
        if weights is None:
            value = expected_list_share(model, formula)
        else:
            value = expected_seat_share(model, formula, weights)
        series.append((k, value))
    return series


def k_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid with endpoints snapped to step multiples.

    Values are start + i*step for i = 0 .. round((stop-start)/step), which
    avoids the accumulation drift of repeated float addition.
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    count = round((stop - start) / step)
    if count < 0:
        raise ValueError(f"empty grid: start={start} stop={stop} step={step}")
    return [start + i * step for i in range(count + 1)]
