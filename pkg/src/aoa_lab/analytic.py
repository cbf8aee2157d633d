"""Closed-form evaluators for the three average ages.

The average AoI is 1/lambda1.  The average AoA and average AoAI are rational
functions of (lambda1, lambda2): quartic over quartic and quintic over
quintic respectively.  Each rational function is implemented twice, once in
the factored form grouped by powers of lambda1 (evaluated by Horner's rule)
and once from expanded integer monomial coefficient tables; a module-import
self-test asserts the two forms agree, guarding against transcription slips
in the long expressions.

Both rational functions are continuous on (0, 1]^2 except that the factored
and expanded forms alike reduce to 0/0 at the exact double corner
(lambda1, lambda2) = (1, 1); the corner value is the limit 1 (every slot
actuates a fresh packet) and is returned directly there.

Supported parameter floor: lambda >= 0.01.  The denominators there are of
order 1e-10, far above double-precision underflow; NumericalError is raised
defensively if a denominator ever evaluates to exactly zero away from the
handled corner.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Params
from .errors import DomainError, NumericalError

__all__ = [
    "MetricAverages",
    "AoaSeedProbs",
    "AoaiSeedProbs",
    "avg_aoi",
    "avg_aoa",
    "avg_aoai",
    "averages",
    "aoa_seed_probs",
    "aoai_seed_probs",
    "limiting_averages",
]


@dataclass(frozen=True)
class MetricAverages:
    """Stationary averages of the three ages, each >= 1.

    aoai_bar >= max(aoi_bar, aoa_bar) always.  aoi_bar <= aoa_bar holds over
    most of the parameter square but fails where data is scarce and energy
    plentiful (for example lambda1=0.1, lambda2=0.3 gives aoa_bar ~ 9.82
    against aoi_bar = 10); it is therefore not enforced here.
    """

    aoi_bar: float
    aoa_bar: float
    aoai_bar: float


@dataclass(frozen=True)
class AoaSeedProbs:
    """Stationary mass of the two age-1 states of the actuation-age chain.

    v100 is the mass of (age=1, cache empty, battery empty), v101 of
    (age=1, cache empty, battery full).  Their sum is the per-slot actuation
    probability.
    """

    params: Params
    v100: float
    v101: float

    @property
    def actuation_probability(self) -> float:
        return self.v100 + self.v101


@dataclass(frozen=True)
class AoaiSeedProbs:
    """Stationary mass of the two age-1 states of the actuated-information chain.

    v110 is the mass of (aoai=1, aoi=1, battery empty), v111 of
    (aoai=1, aoi=1, battery full).
    """

    params: Params
    v110: float
    v111: float

    @property
    def b1(self) -> float:
        """Stationary probability that the battery is full at a slot end."""
        return self.v111 / (self.params.lambda1 * self.params.lambda2)

    @property
    def b0(self) -> float:
        return 1.0 - self.b1

    @property
    def i1(self) -> float:
        """Stationary probability that aoi = 1; equals lambda1 identically."""
        return self.params.lambda1

    @property
    def ai1(self) -> float:
        """Stationary probability that aoai = 1."""
        l1, l2 = self.params.lambda1, self.params.lambda2
        return l1 * l2 + l1 * (1.0 - l2) * self.b1


def avg_aoi(p: Params) -> float:
    """Average age of information: 1 / lambda1."""
    return 1.0 / p.lambda1


# Expanded integer monomial coefficients, row index = power of lambda1,
# column index = power of lambda2.  Used only as a transcription cross-check
# against the factored forms below.
_AOA_NUM = (
    (0, 0, 0, 0, -1),
    (0, 0, 0, -2, 3),
    (0, 0, -1, 3, -2),
    (0, -2, 4, -2, 0),
    (-1, 3, -3, 1, 0),
)
_AOA_DEN = (
    (0, 0, 0, 0, 0),
    (0, 0, 0, 0, -1),
    (0, 0, 0, -2, 3),
    (0, 0, -2, 5, -3),
    (0, -1, 3, -3, 1),
)
_AOAI_NUM = (
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 3, -4),
    (0, 0, 0, 4, -10, 6),
    (0, 0, 4, -12, 12, -4),
    (0, 4, -13, 15, -7, 1),
    (1, -5, 9, -7, 2, 0),
)
_AOAI_DEN = (
    (0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 3, -4),
    (0, 0, 0, 4, -10, 6),
    (0, 0, 3, -10, 11, -4),
    (0, 1, -4, 6, -4, 1),
)


def _poly2(coeffs, l1: float, l2: float) -> float:
    """Evaluate a bivariate polynomial given per-power-of-l1 rows of l2 coefficients."""
    total = 0.0
    for row in reversed(coeffs):
        inner = 0.0
        for c in reversed(row):
            inner = inner * l2 + c
        total = total * l1 + inner
    return total


def _aoa_factored(l1: float, l2: float) -> tuple[float, float]:
    m = l2 - 1.0
    num = ((((m * m * m) * l1
             + (-2.0 * l2 * m * m)) * l1
            + (-(l2 * l2) * (2.0 * l2 * l2 - 3.0 * l2 + 1.0))) * l1
           + (l2 * l2 * l2 * (3.0 * l2 - 2.0))) * l1 - l2 ** 4
    quad = (m * m * l1 + (l2 - 2.0 * l2 * l2)) * l1 + l2 * l2
    den = l1 * l2 * (l1 * m - l2) * quad
    return num, den


def _aoai_factored(l1: float, l2: float) -> tuple[float, float]:
    m = l2 - 1.0
    m3 = m * m * m
    num = (((((m3 * (2.0 * l2 - 1.0)) * l1
              + ((l2 - 4.0) * m3 * l2)) * l1
             + (-4.0 * m3 * l2 * l2)) * l1
            + (2.0 * l2 ** 3 * (3.0 * l2 * l2 - 5.0 * l2 + 2.0))) * l1
           + (l2 ** 4 * (3.0 - 4.0 * l2))) * l1 + l2 ** 5
    quad = (m * m * l1 + (l2 - 2.0 * l2 * l2)) * l1 + l2 * l2
    reach = l1 + l2 - l1 * l2
    den = l1 * l2 * reach * reach * quad
    return num, den


def _ratio(num: float, den: float, what: str) -> float:
    if den == 0.0:
        raise NumericalError(f"{what}: denominator underflowed to zero")
    return num / den


def avg_aoa(p: Params) -> float:
    """Average age of actuation.

    Evaluates the closed-form rational function of (lambda1, lambda2).
    At the double corner (1, 1) the rational form is 0/0 and the limit
    value 1 is returned.
    """
    l1, l2 = p.lambda1, p.lambda2
    if l1 == 1.0 and l2 == 1.0:
        return 1.0
    return _ratio(*_aoa_factored(l1, l2), "avg_aoa")


def avg_aoai(p: Params) -> float:
    """Average age of actuated information.

    Evaluates the closed-form rational function of (lambda1, lambda2); the
    double corner (1, 1) returns the limit value 1.
    """
    l1, l2 = p.lambda1, p.lambda2
    if l1 == 1.0 and l2 == 1.0:
        return 1.0
    return _ratio(*_aoai_factored(l1, l2), "avg_aoai")


def averages(p: Params) -> MetricAverages:
    """All three closed-form averages for one scenario."""
    return MetricAverages(avg_aoi(p), avg_aoa(p), avg_aoai(p))


def aoa_seed_probs(p: Params) -> AoaSeedProbs:
    """Closed-form stationary mass of the actuation-age chain's level-1 states.

    At lambda2 = 1 the formulas evaluate to v100 = 0 and v101 = lambda1 by
    direct substitution (every harvested slot actuates, so age-1 mass sits in
    the battery-full state); the double corner (1, 1) is 0/0 and returns the
    limit (1, 0).
    """
    l1, l2 = p.lambda1, p.lambda2
    if l1 == 1.0 and l2 == 1.0:
        return AoaSeedProbs(p, 1.0, 0.0)
    q1, q2 = 1.0 - l1, 1.0 - l2
    den = q1 * l2 ** 3 + l1 * l2 * q2 + q1 * q2 * l2 * l2 + l1 * l1 * q2 * q2
    if den == 0.0:
        raise NumericalError("aoa_seed_probs: denominator underflowed to zero")
    v100 = l1 * (1.0 - q1 * q2) * q2 * l2 / den
    v101 = l1 * q1 * l2 ** 3 / den
    return AoaSeedProbs(p, v100, v101)


def aoai_seed_probs(p: Params) -> AoaiSeedProbs:
    """Closed-form stationary mass of the actuated-information chain's level-1 states.

    The double corner (1, 1) is 0/0 in the printed form and returns the
    limit (1, 0).
    """
    l1, l2 = p.lambda1, p.lambda2
    if l1 == 1.0 and l2 == 1.0:
        return AoaiSeedProbs(p, 1.0, 0.0)
    q1, q2 = 1.0 - l1, 1.0 - l2
    den = l1 * l1 * q2 * q2 + l2 * l2 + l1 * l2 * (1.0 - 2.0 * l2)
    if den == 0.0:
        raise NumericalError("aoai_seed_probs: denominator underflowed to zero")
    v110 = l1 * (l1 * l1 * q2 + l2) * q2 * l2 / den
    v111 = q1 * l1 * l2 ** 3 / den
    return AoaiSeedProbs(p, v110, v111)


def limiting_averages(p: Params) -> MetricAverages:
    """Known limit values on the lambda = 1 edges, for reference lines.

    lambda1 = 1: aoa_bar and aoai_bar tend to 1/lambda2 while aoi_bar is 1.
    lambda2 = 1: all three tend to 1/lambda1.  Both = 1: everything is 1.
    Raises DomainError off the edges.
    """
    l1, l2 = p.lambda1, p.lambda2
    if l1 == 1.0 and l2 == 1.0:
        return MetricAverages(1.0, 1.0, 1.0)
    if l1 == 1.0:
        return MetricAverages(1.0, 1.0 / l2, 1.0 / l2)
    if l2 == 1.0:
        return MetricAverages(1.0 / l1, 1.0 / l1, 1.0 / l1)
    raise DomainError("limiting averages are defined only when lambda1 = 1 or lambda2 = 1")


def _self_test() -> None:
    # Factored and expanded forms must agree; a disagreement means one of the
    # two transcriptions is corrupt.
    pts = [(0.5, 0.5), (0.2, 0.1), (0.9, 0.3), (0.37, 0.81), (1.0, 0.6), (0.6, 1.0), (0.01, 0.99)]
    for l1, l2 in pts:
        for fact, num_t, den_t, name in (
            (_aoa_factored, _AOA_NUM, _AOA_DEN, "avg_aoa"),
            (_aoai_factored, _AOAI_NUM, _AOAI_DEN, "avg_aoai"),
        ):
            num, den = fact(l1, l2)
            ref = _poly2(num_t, l1, l2) / _poly2(den_t, l1, l2)
            got = num / den
            if abs(got - ref) > 1e-9 * abs(ref):
                raise AssertionError(
                    f"{name} transcription mismatch at ({l1}, {l2}): {got} vs {ref}")


_self_test()
