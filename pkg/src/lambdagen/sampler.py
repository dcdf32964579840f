"""Boltzmann samplers with anticipated rejection for closed simply-typed terms.

An attempt builds a term top-down from uniform draws and types it on the
fly; it is abandoned as soon as the size budget is exceeded, an index has no
binder, or a unification fails.  Attempts are repeated until one completes
within the size window.  Conditioned on its size, an accepted term is
uniform among the closed typable terms of that size.

Size bounds are unit sizes; reported sizes are natural sizes (units + 1).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from . import _backend, _kernels_py
from ._rng import SplitMix64
from .analytic import NF, PLAIN, solve_for_target
from .simple_types import Arrow, SimpleType, TVar, TypeStore, display_type
from .terms import Index, Term, decode_prefix

__all__ = [
    "SampleClass", "NFMode", "SamplerConfig", "SampleResult", "SamplerExhausted",
    "default_thresholds", "load_thresholds", "sample", "attempt_typed",
    "attempt_typed_nf", "pick_index", "type_from_code", "DEFAULTS", "sample_stream",
]

CALIBRATION_TARGET = 120.0
# attempts per kernel call; bounds cancellation latency and progress granularity
CHUNK = 1 << 16


class SampleClass(enum.Enum):
    TYPED = "typed"
    TYPED_NF = "typed-nf"


class NFMode(enum.Enum):
    FAITHFUL = "faithful"
    # single-state variant with a final normal-form check
    FLATTENED = "paper"


# (min units, max units, max attempts)
DEFAULTS = {
    SampleClass.TYPED: (120, 150, 10_000_000),
    SampleClass.TYPED_NF: (60, 80, 10_000_000),
}


class SamplerExhausted(RuntimeError):
    def __init__(self, steps: int):
        super().__init__(f"no term found within {steps} attempts")
        self.steps = steps


@lru_cache(maxsize=None)
def default_thresholds(cls: SampleClass) -> tuple[float, float, float]:
    """Thresholds tuned for expected natural size 120.

    Typed: ``(index, index + lambda, leaf)``.  Normal forms:
    ``(lambda, neutral index, leaf)``.
    """
    if cls is SampleClass.TYPED:
        return solve_for_target(PLAIN, CALIBRATION_TARGET).thresholds.as_tuple()
    return solve_for_target(NF, CALIBRATION_TARGET).thresholds.as_tuple()


_CONFIG_KEYS = {
    SampleClass.TYPED: ("boltzmann_index", "boltzmann_lambda", "boltzmann_leaf"),
    SampleClass.TYPED_NF: ("boltzmann_nf_lambda", "boltzmann_nf_index", "boltzmann_nf_leaf"),
}


def load_thresholds(text: str, cls: SampleClass) -> tuple[float, float, float]:
    """Read thresholds from ``key=value`` lines as written by ``tune --emit config``."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {value.strip()!r} is not a number") from None
    keys = _CONFIG_KEYS[cls]
    missing = [k for k in keys if k not in values]
    if missing:
        raise ValueError(f"config lacks {', '.join(missing)}")
    return tuple(values[k] for k in keys)


@dataclass(frozen=True)
class SamplerConfig:
    cls: SampleClass = SampleClass.TYPED
    min_units: Optional[int] = None
    max_units: Optional[int] = None
    max_steps: Optional[int] = None
    seed: int = 0
    nf_mode: NFMode = NFMode.FAITHFUL
    thresholds: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        lo, hi, steps = DEFAULTS[self.cls]
        if self.min_units is None:
            object.__setattr__(self, "min_units", lo)
        if self.max_units is None:
            object.__setattr__(self, "max_units", hi)
        if self.max_steps is None:
            object.__setattr__(self, "max_steps", steps)
        if self.thresholds is None:
            object.__setattr__(self, "thresholds", default_thresholds(self.cls))
        if not 0 <= self.min_units <= self.max_units:
            raise ValueError(f"need 0 <= min_units <= max_units, got {self.min_units}, {self.max_units}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        t = self.thresholds
        if len(t) != 3 or not all(0.0 < v < 1.0 for v in t):
            raise ValueError(f"thresholds must be three numbers in (0, 1), got {t!r}")
        if self.cls is SampleClass.TYPED and not t[0] < t[1]:
            raise ValueError("index threshold must be below the lambda threshold")

    @property
    def kernel_mode(self) -> int:
        if self.cls is SampleClass.TYPED:
            return _kernels_py.MODE_TYPED
        return _kernels_py.MODE_NF if self.nf_mode is NFMode.FAITHFUL else _kernels_py.MODE_NF_FLAT


@dataclass(frozen=True)
class SampleResult:
    term: Term
    type: str
    natural_size: int
    steps: int
    seed: int
    simple_type: Optional[SimpleType] = field(default=None, compare=False, repr=False)


def type_from_code(code: Sequence[int]) -> SimpleType:
    """Rebuild a type from prefix code: ``-1`` is an arrow, other values are variables."""
    out: list[SimpleType] = []
    for c in reversed(code):
        if c < 0:
            if len(out) < 2:
                raise ValueError("malformed type code")
            lhs = out.pop()
            rhs = out.pop()
            out.append(Arrow(lhs, rhs))
        else:
            out.append(TVar(c))
    if len(out) != 1:
        raise ValueError("malformed type code")
    return out[0]


def _to_result(raw, steps: int, seed: int) -> SampleResult:
    code, tcode, units = raw
    ty = type_from_code(tcode)
    return SampleResult(decode_prefix(code), display_type(ty), units + 1, steps, seed, ty)


def _run_attempt(config: SamplerConfig, mode: int, rng):
    t0, t1, t2 = config.thresholds
    raw = _kernels_py.attempt(mode, t0, t1, t2, config.min_units, config.max_units, rng)
    if raw is None:
        return None
    ty = type_from_code(raw[1])
    return decode_prefix(raw[0]), ty


def attempt_typed(config: SamplerConfig, rng) -> Optional[tuple[Term, SimpleType]]:
    """One typed attempt using ``rng.random()`` for every draw; None on abort."""
    return _run_attempt(config, _kernels_py.MODE_TYPED, rng)


def attempt_typed_nf(config: SamplerConfig, rng) -> Optional[tuple[Term, SimpleType]]:
    """One normal-form attempt in the configured mode; None on abort."""
    mode = _kernels_py.MODE_NF if config.nf_mode is NFMode.FAITHFUL else _kernels_py.MODE_NF_FLAT
    return _run_attempt(config, mode, rng)


def pick_index(env: Sequence[SimpleType], demanded: SimpleType, store: TypeStore, rng,
               units: int, max_units: int, leaf: float) -> Optional[tuple[Index, int]]:
    """Walk the binders innermost first, stopping with probability ``leaf`` at each.

    ``env[0]`` is the innermost binder.  Each step past a binder consumes one
    unit.  Returns ``(index, units)`` after unifying ``demanded`` with the
    chosen binder's type, or None when the walk runs out of binders or budget
    or the types clash.
    """
    r = rng.random()
    k = 0
    while True:
        if k >= len(env):
            return None
        if r < leaf:
            if not store.unify(demanded, env[k]):
                return None
            return Index(k), units
        if units >= max_units:
            return None
        units += 1
        r = rng.random()
        k += 1


def sample(config: SamplerConfig, cancel=None, progress=None) -> SampleResult:
    """Repeat attempts until one is accepted.

    ``cancel`` is a kernel ``CancelToken`` checked between attempts;
    ``progress`` is called with the running attempt count after each chunk.
    Raises ``SamplerExhausted`` when ``max_steps`` attempts all fail, or when
    cancelled before success.
    """
    k = _backend.kernels()
    t0, t1, t2 = config.thresholds
    state = SplitMix64(config.seed).state
    done = 0
    while done < config.max_steps:
        if cancel is not None and cancel.is_set():
            break
        chunk = min(CHUNK, config.max_steps - done)
        attempts, state, raw = k.run_sampler(
            config.kernel_mode, t0, t1, t2, config.min_units, config.max_units, chunk, state, cancel,
        )
        done += attempts
        if progress is not None:
            progress(done)
        if raw is not None:
            return _to_result(raw, done, config.seed)
        if attempts < chunk:
            break
    raise SamplerExhausted(done)


def sample_stream(config: SamplerConfig) -> Iterator[SampleResult]:
    """Successive accepted terms from one random stream seeded by ``config.seed``.

    The first item equals ``sample(config)``.  ``steps`` counts the attempts
    since the previous success; the stream ends, raising ``SamplerExhausted``,
    once a single search spends ``max_steps`` attempts.
    """
    k = _backend.kernels()
    t0, t1, t2 = config.thresholds
    state = SplitMix64(config.seed).state
    while True:
        done = 0
        raw = None
        while raw is None and done < config.max_steps:
            chunk = min(CHUNK, config.max_steps - done)
            attempts, state, raw = k.run_sampler(
                config.kernel_mode, t0, t1, t2, config.min_units, config.max_units, chunk, state,
            )
            done += attempts
        if raw is None:
            raise SamplerExhausted(done)
        yield _to_result(raw, done, config.seed)
