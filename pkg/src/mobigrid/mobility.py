"""Normal-walk mobility over hexagonal cells.

Each step rotates the previous move by a drift angle drawn from
N(0, sigma^2) on the open interval (-270, 270) degrees. The drift angle is
banded by confining angles into one of six relative directions (back,
right, front-right, front, front-left, left); positive angles are
anticlockwise, i.e. left-hand turns.

The six direction probabilities use the zero-to-z area of the standard
normal, A(z) = Phi(z) - 1/2. The back probability is the residual
1 - (sum of the other five), which absorbs the sub-0.3% of normal mass
falling outside (-270, 270) so the table sums to exactly one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import IntEnum

from mobigrid.hexgrid import HexCoord, neighbor

SIGMA_MIN_DEG = 5.0
SIGMA_MAX_DEG = 90.0
THETA_LIMIT_DEG = 270.0

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_SQRT3 = math.sqrt(3.0)


class RelativeDirection(IntEnum):
    """Relative handoff direction index k."""

    B = 0
    R = 1
    FR = 2
    F = 3
    FL = 4
    L = 5


@dataclass(frozen=True)
class MobilityParams:
    """Drift-angle distribution parameters (mean is fixed at zero)."""

    sigma_deg: float
    mean_deg: float = 0.0

    def __post_init__(self) -> None:
        if not (SIGMA_MIN_DEG <= self.sigma_deg <= SIGMA_MAX_DEG):
            raise ValueError(
                f"sigma_deg must be in [{SIGMA_MIN_DEG}, {SIGMA_MAX_DEG}], "
                f"got {self.sigma_deg}"
            )
        if self.mean_deg != 0.0:
            raise ValueError("mean_deg is fixed at 0")


@dataclass(frozen=True)
class CellGeometry:
    """Inner and outer radii of the hexagonal cell."""

    ri: float
    ro: float

    def __post_init__(self) -> None:
        if not (self.ro > self.ri > 0):
            raise ValueError(f"need ro > ri > 0, got ri={self.ri}, ro={self.ro}")

    @classmethod
    def regular(cls, ri: float = 1.0) -> "CellGeometry":
        return cls(ri=ri, ro=2.0 * ri / _SQRT3)


@dataclass(frozen=True)
class ConfiningAngles:
    """Band boundaries (degrees) separating the six relative directions."""

    ang_f: float
    ang_fl: float
    ang_l: float

    def __post_init__(self) -> None:
        if not (0 < self.ang_f < self.ang_fl < self.ang_l):
            raise ValueError("need 0 < ang_f < ang_fl < ang_l")
        if self.ang_l != 90.0:
            raise ValueError("ang_l must be exactly 90 degrees")


@dataclass(frozen=True)
class DirectionProbabilities:
    """The six normal-walk direction probabilities for one sigma."""

    b: float
    r: float
    fr: float
    f: float
    fl: float
    l: float

    def p(self, k: RelativeDirection) -> float:
        return (self.b, self.r, self.fr, self.f, self.fl, self.l)[k]

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.b, self.r, self.fr, self.f, self.fl, self.l)


@dataclass(frozen=True)
class WalkerState:
    """A walker's cell plus the absolute lattice direction of its last move."""

    cell: HexCoord
    heading: int

    def __post_init__(self) -> None:
        if self.heading not in range(6):
            raise ValueError(f"heading must be in 0..5, got {self.heading}")


def std_normal_cdf(z: float) -> float:
    """Cumulative distribution of the standard normal."""
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    return 0.5 * math.erfc(-z / _SQRT2)


def drift_density(theta_deg: float, params: MobilityParams) -> float:
    """Drift-angle density per degree on the open interval (-270, 270)."""
    if not (-THETA_LIMIT_DEG < theta_deg < THETA_LIMIT_DEG):
        raise ValueError(f"theta_deg must lie in (-270, 270), got {theta_deg}")
    s = params.sigma_deg
    return math.exp(-0.5 * (theta_deg / s) ** 2) / (_SQRT2PI * s)


def confining_angles(geom: CellGeometry) -> ConfiningAngles:
    """Band boundaries from the cell radii; the last band always ends at 90."""
    return ConfiningAngles(
        ang_f=math.degrees(math.atan(geom.ro / (4.0 * geom.ri))),
        ang_fl=math.degrees(math.atan(geom.ro / geom.ri)),
        ang_l=90.0,
    )


def _zero_to_z_area(z: float) -> float:
    # A(z) = Phi(z) - 1/2, the Z-table area from 0 to z.
    return std_normal_cdf(z) - 0.5


def direction_probabilities(
    params: MobilityParams, angles: ConfiningAngles
) -> DirectionProbabilities:
    """Six direction probabilities for the given sigma and band boundaries.

    Mirror pairs share one computed value, so fr == fl and r == l exactly;
    b is the residual making the table sum to one.
    """
    s = params.sigma_deg
    a_f = _zero_to_z_area(angles.ang_f / s)
    a_fl = _zero_to_z_area(angles.ang_fl / s)
    a_l = _zero_to_z_area(angles.ang_l / s)
    f = 2.0 * a_f
    fl = a_fl - a_f
    l = a_l - a_fl
    # Differences of near-saturated areas can round to tiny negatives.
    fl = max(fl, 0.0)
    l = max(l, 0.0)
    b = max(1.0 - f - 2.0 * fl - 2.0 * l, 0.0)
    return DirectionProbabilities(b=b, r=l, fr=fl, f=f, fl=fl, l=l)


def sample_drift_angle(rng: random.Random, params: MobilityParams) -> float:
    """Draw from N(0, sigma^2) restricted to (-270, 270) by rejection."""
    s = params.sigma_deg
    while True:
        theta = rng.gauss(0.0, s)
        if -THETA_LIMIT_DEG < theta < THETA_LIMIT_DEG:
            return theta


def classify_angle(theta_deg: float, angles: ConfiningAngles) -> RelativeDirection:
    """Map a drift angle to its relative direction band.

    Bands are lower-inclusive; positive angles are anticlockwise and map
    to the left-hand directions.
    """
    if not (-THETA_LIMIT_DEG < theta_deg < THETA_LIMIT_DEG):
        raise ValueError(f"theta_deg must lie in (-270, 270), got {theta_deg}")
    mag = abs(theta_deg)
    if mag < angles.ang_f:
        return RelativeDirection.F
    if mag < angles.ang_fl:
        return RelativeDirection.FL if theta_deg > 0 else RelativeDirection.FR
    if mag < angles.ang_l:
        return RelativeDirection.L if theta_deg > 0 else RelativeDirection.R
    return RelativeDirection.B


def sample_direction(
    rng: random.Random, probs: DirectionProbabilities
) -> RelativeDirection:
    """Draw a relative direction from the probability table."""
    u = rng.random()
    acc = 0.0
    for k in RelativeDirection:
        acc += probs.p(k)
        if u < acc:
            return k
    return RelativeDirection.L


def advance(state: WalkerState, k: RelativeDirection) -> WalkerState:
    """One walk step: rotate the heading by k - 3 sixths and move one cell.

    F keeps the heading, B reverses it, Fl/L turn one/two sixths left,
    Fr/R one/two sixths right.
    """
    new_heading = (state.heading + int(k) - 3) % 6
    return WalkerState(cell=neighbor(state.cell, new_heading), heading=new_heading)
