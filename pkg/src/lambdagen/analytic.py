"""Generating functions, dominant singularities and the Boltzmann tuner.

Two term families are tuned:

* plain terms, ``L(z) = 1/(1-z) + z L(z) + z^2 L(z)^2``;
* normal forms, through the pair ``N(z) = M(z) + z N(z)`` and
  ``M(z) = z^2 M(z) N(z) + 1/(1-z)``, which gives ``M = (1-z) N`` and
  ``z^2 N^2 - N + 1/(1-z)^2 = 0``.

``z`` marks unit size (``s`` and ``l`` weigh 1, application 2, the leaf 0).
Expected sizes are reported in *natural* size, i.e. one more than the unit
size, which is the convention the published sampler constants were tuned to.

Both generating functions are evaluated in a rationalised form that has no
``0/0`` at the origin, and derivatives come from implicit differentiation of
the defining quadratic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Union

__all__ = [
    "GenFunValue", "TuningResult", "AsymptoticParams", "PlainThresholds", "NFThresholds",
    "DomainError", "NoSolutionError", "PLAIN", "NF",
    "eval_L", "eval_NF", "dominant_singularity", "expected_size", "std_dev_size",
    "solve_for_target", "branching_thresholds", "asymptotic_count", "ASYMPTOTIC",
    "series_coefficients", "PUBLISHED_CONSTANTS",
]

PLAIN = "plain"
NF = "nf"
ClassName = Literal["plain", "nf"]

# Published sampler constants, kept for golden comparisons.
PUBLISHED_CONSTANTS = {
    "x_plain": 0.29558095907,
    "boltzmann_index": 0.35700035696434995,
    "boltzmann_lambda": 0.6525813160382378,
    "boltzmann_leaf": 0.7044190409261122,
    "boltzmann_nf_lambda": 0.3333158264186935,
    "boltzmann_nf_index": 0.5062759837493023,
    "boltzmann_nf_leaf": 0.6666841735813065,
}


class DomainError(ValueError):
    pass


class NoSolutionError(ValueError):
    pass


@dataclass(frozen=True)
class GenFunValue:
    z: float
    value: float
    derivative: float
    second: float = math.nan


@dataclass(frozen=True)
class AsymptoticParams:
    rho: float
    C: float


@dataclass(frozen=True)
class PlainThresholds:
    """Cumulative guards for one uniform draw ``R``.

    ``R < index`` picks a de Bruijn index, ``R < abstraction`` a lambda,
    otherwise an application.  Inside an index ``R < leaf`` stops at ``0``.
    """
    index: float
    abstraction: float
    leaf: float

    def as_tuple(self):
        return (self.index, self.abstraction, self.leaf)


@dataclass(frozen=True)
class NFThresholds:
    """Guards for the normal-form sampler.

    ``abstraction``: in the normal-form state, ``R < abstraction`` emits a
    lambda (probability ``x``).  ``neutral_index``: in the neutral state,
    ``R < neutral_index`` emits an index (probability ``D/M``), otherwise an
    application.  ``leaf``: stop probability inside an index.
    """
    abstraction: float
    neutral_index: float
    leaf: float

    @property
    def flat_index(self) -> float:
        """Cumulative index bound of the single-draw variant (lambda first, then index).

        The published single-state code compares the same ``R`` against ``x``
        and then against ``D/M``, so the bound is ``D/M`` itself.
        """
        return self.neutral_index

    def as_tuple(self):
        return (self.abstraction, self.neutral_index, self.leaf)


@dataclass(frozen=True)
class TuningResult:
    cls: str
    x: float
    rho: float
    target: float
    expected_size: float
    std_dev: float
    thresholds: Union[PlainThresholds, NFThresholds]


# ---------------------------------------------------------------- generating functions

def _D(z):
    return 1.0 / (1.0 - z)


def _plain_radicand(z):
    return 1.0 - 3.0 * z - z * z - z ** 3


def _nf_radicand(z):
    # discriminant of z^2 N^2 - N + (1-z)^-2 times (1-z)^2
    return (1.0 - 3.0 * z) * (1.0 + z)


def L_closed_form(z, sqrt: Callable = math.sqrt):
    """``L(z)`` with the small root chosen, written without cancellation.

    ``(1 - z - sqrt(q)) / (2 z^2)`` with ``q = (1-3z-z^2-z^3)/(1-z)`` equals
    ``2 / ((1-z)(1-z+sqrt(q)))`` because ``(1-z)^2 - q = 4 z^2 / (1-z)``.
    """
    q = (1 - 3 * z - z * z - z * z * z) / (1 - z)
    return 2 / ((1 - z) * (1 - z + sqrt(q)))


def N_closed_form(z, sqrt: Callable = math.sqrt):
    """``N(z) = (1 - sqrt(d)) / (2 z^2) = 2 / ((1-z)^2 (1 + sqrt(d)))``,
    ``d = (1-3z)(1+z)/(1-z)^2``."""
    d = (1 - 3 * z) * (1 + z) / ((1 - z) * (1 - z))
    return 2 / ((1 - z) * (1 - z) * (1 + sqrt(d)))


def _check_domain(z, rho):
    if not (0.0 <= z < rho):
        raise DomainError(f"z={z!r} outside [0, {rho!r})")


def eval_L(z: float) -> GenFunValue:
    _check_domain(z, dominant_singularity(PLAIN))
    L = L_closed_form(z)
    # F(L, z) = z^2 L^2 + (z - 1) L + 1/(1-z) = 0
    FL = 2 * z * z * L + z - 1
    Fz = 2 * z * L * L + L + _D(z) ** 2
    L1 = -Fz / FL
    FLL = 2 * z * z
    FLz = 4 * z * L + 1
    Fzz = 2 * L * L + 2 * _D(z) ** 3
    L2 = -(FLL * L1 * L1 + 2 * FLz * L1 + Fzz) / FL
    return GenFunValue(z, L, L1, L2)


def eval_NF(z: float) -> tuple[GenFunValue, GenFunValue]:
    """Values and derivatives of the normal-form and neutral-form series."""
    _check_domain(z, dominant_singularity(NF))
    N = N_closed_form(z)
    # F(N, z) = z^2 N^2 - N + (1-z)^-2 = 0
    FN = 2 * z * z * N - 1
    Fz = 2 * z * N * N + 2 * _D(z) ** 3
    N1 = -Fz / FN
    FNN = 2 * z * z
    FNz = 4 * z * N
    Fzz = 2 * N * N + 6 * _D(z) ** 4
    N2 = -(FNN * N1 * N1 + 2 * FNz * N1 + Fzz) / FN
    # M = (1 - z) N
    M = (1 - z) * N
    M1 = (1 - z) * N1 - N
    M2 = (1 - z) * N2 - 2 * N1
    return GenFunValue(z, N, N1, N2), GenFunValue(z, M, M1, M2)


def _gf(cls: str, z: float) -> GenFunValue:
    if cls == PLAIN:
        return eval_L(z)
    if cls == NF:
        return eval_NF(z)[0]
    raise ValueError(f"unknown class {cls!r}; expected 'plain' or 'nf'")


def _bisect_root(f, lo, hi, iterations=200):
    """Root of ``f`` on ``[lo, hi]`` with ``f(lo) > 0 >= f(hi)``; returns the bracket."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


_RHO_CACHE: dict[str, float] = {}


def dominant_singularity(cls: ClassName) -> float:
    """Smallest positive zero of the radicand, by bisection."""
    rho = _RHO_CACHE.get(cls)
    if rho is None:
        if cls == PLAIN:
            radicand = _plain_radicand
        elif cls == NF:
            radicand = _nf_radicand
        else:
            raise ValueError(f"unknown class {cls!r}; expected 'plain' or 'nf'")
        # radicand(0) = 1 and radicand(1/2) < 0 for both families
        lo, _ = _bisect_root(radicand, 0.0, 0.5)
        rho = _RHO_CACHE[cls] = lo
    return rho


def _check_open(cls, x):
    rho = dominant_singularity(cls)
    if not (0.0 < x < rho):
        raise DomainError(f"x={x!r} outside (0, {rho!r})")


def expected_size(cls: ClassName, x: float) -> float:
    """Expected natural size ``1 + x A'(x)/A(x)`` of a Boltzmann sample."""
    _check_open(cls, x)
    g = _gf(cls, x)
    return 1.0 + x * g.derivative / g.value


def std_dev_size(cls: ClassName, x: float) -> float:
    """Standard deviation of the Boltzmann size; unaffected by the +1 shift."""
    _check_open(cls, x)
    g = _gf(cls, x)
    mean = x * g.derivative / g.value
    var = (x * x * g.second + x * g.derivative) / g.value - mean * mean
    return math.sqrt(max(var, 0.0))


def branching_thresholds(cls: ClassName, x: float):
    _check_open(cls, x)
    if cls == PLAIN:
        L = L_closed_form(x)
        index = _D(x) / L
        return PlainThresholds(index=index, abstraction=index + x, leaf=1.0 - x)
    N, M = eval_NF(x)
    return NFThresholds(abstraction=x, neutral_index=_D(x) / M.value, leaf=1.0 - x)


def solve_for_target(cls: ClassName, target: float, tolerance: float = 1e-6) -> TuningResult:
    """Find ``x`` whose expected natural size is ``target``.

    The expected size increases strictly on ``(0, rho)`` from 1 and diverges at
    ``rho``, so plain bisection on the whole interval is safe.  Bisection runs
    to the limit of double precision; ``tolerance`` is the acceptance check on
    the residual.
    """
    rho = dominant_singularity(cls)
    if not target > 1.0:
        raise NoSolutionError(f"target {target!r} must exceed 1 (the size of the term 0)")
    lo, hi = 0.0, rho
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if expected_size(cls, mid) < target:
            lo = mid
        else:
            hi = mid
    x = lo if abs(expected_size(cls, lo) - target) <= abs(expected_size(cls, hi) - target) else hi
    mean = expected_size(cls, x)
    if abs(mean - target) >= tolerance:
        raise NoSolutionError(
            f"closest x={x!r} gives expected size {mean!r}, not within {tolerance} of {target}"
        )
    return TuningResult(
        cls=cls, x=x, rho=rho, target=target, expected_size=mean,
        std_dev=std_dev_size(cls, x), thresholds=branching_thresholds(cls, x),
    )


# Sub-exponential constant for plain terms; quoted, not derived here.
ASYMPTOTIC = AsymptoticParams(rho=0.29560, C=0.60676)


def asymptotic_count(n: int) -> float:
    """Approximate number of plain terms of natural size ``n``.

    ``(1/rho)^n C / n^(3/2)``.  With the quoted ``C`` this tracks the count at
    natural size ``n`` (unit size ``n - 1``); the ratio tends to 1 from above.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rho = dominant_singularity(PLAIN)
    return math.exp(-n * math.log(rho)) * ASYMPTOTIC.C / n ** 1.5


def series_coefficients(cls: ClassName, order: int, dps: int = 60) -> list[int]:
    """Taylor coefficients ``[z^0..z^order]`` of the closed form, rounded.

    Computed by high-precision numerical differentiation at the origin, so it
    is independent of any counting recurrence.
    """
    import mpmath

    f = L_closed_form if cls == PLAIN else N_closed_form
    with mpmath.workdps(dps):
        coeffs = mpmath.taylor(lambda z: f(z, mpmath.sqrt), mpmath.mpf(0), order)
        return [int(mpmath.nint(c)) for c in coeffs]
