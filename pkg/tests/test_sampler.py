import itertools
from collections import Counter

import pytest
from scipy.stats import chisquare

from lambdagen.enumerator import TermClass, enumerate_typed
from lambdagen.sampler import (NFMode, SampleClass, SamplerConfig, SamplerExhausted, attempt_typed,
                               attempt_typed_nf, load_thresholds, pick_index, sample, sample_stream,
                               type_from_code)
from lambdagen.simple_types import Arrow, TypeStore, display_type, infer_type
from lambdagen.terms import Abs, App, Index, is_closed, is_normal_form, natural_size, print_term

T = SampleClass.TYPED
NF = SampleClass.TYPED_NF


class Scripted:
    """Replays fixed draws; fails loudly if the sampler asks for more."""

    def __init__(self, draws):
        self.draws = list(draws)
        self.used = 0

    def random(self):
        v = self.draws[self.used]
        self.used += 1
        return v


def valid(res, cfg):
    t = res.term
    ty = infer_type(t)
    ok = is_closed(t) and ty is not None and display_type(ty) == res.type
    ok = ok and natural_size(t) == res.natural_size
    ok = ok and cfg.min_units + 1 <= res.natural_size <= cfg.max_units + 1
    if cfg.cls is NF:
        ok = ok and is_normal_form(t)
    return ok


def test_defaults():
    c = SamplerConfig()
    assert (c.min_units, c.max_units, c.max_steps, c.seed) == (120, 150, 10_000_000, 0)
    c = SamplerConfig(NF)
    assert (c.min_units, c.max_units, c.max_steps, c.nf_mode) == (60, 80, 10_000_000, NFMode.FAITHFUL)


@pytest.mark.parametrize("kw", [dict(min_units=5, max_units=4), dict(max_steps=0),
                                dict(thresholds=(0.5, 0.4, 0.7)), dict(thresholds=(0.1, 1.2, 0.5))])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SamplerConfig(T, **kw)


def test_scripted_identity():
    cfg = SamplerConfig(T, 0, 10)
    # lambda, then an index stopping at the first binder
    rng = Scripted([0.5, 0.1, 0.1])
    t, ty = attempt_typed(cfg, rng)
    assert t == Abs(Index(0)) and display_type(ty) == "(A->A)"
    assert rng.used == 3


def test_scripted_open_leaf_aborts():
    cfg = SamplerConfig(T, 0, 10)
    assert attempt_typed(cfg, Scripted([0.1, 0.0])) is None


def test_scripted_self_application_aborts():
    cfg = SamplerConfig(T, 0, 10)
    # l(a(0,0)): the argument's unification fails the occurs check
    rng = Scripted([0.5, 0.9, 0.1, 0.1, 0.1, 0.1])
    assert attempt_typed(cfg, rng) is None
    assert rng.used == 6


def test_scripted_budget_and_minimum():
    # l(0) has one unit
    assert attempt_typed(SamplerConfig(T, 2, 10), Scripted([0.5, 0.1, 0.1])) is None
    assert attempt_typed(SamplerConfig(T, 0, 0), Scripted([0.5])) is None


def test_scripted_second_binder():
    cfg = SamplerConfig(T, 0, 10)
    t, ty = attempt_typed(cfg, Scripted([0.5, 0.5, 0.1, 0.9, 0.1]))
    assert t == Abs(Abs(Index(1))) and display_type(ty) == "(A->B->A)"


def test_scripted_nf_faithful():
    cfg = SamplerConfig(NF, 0, 10)
    # N: lambda; N: not lambda, then M: index stopping at once
    t, ty = attempt_typed_nf(cfg, Scripted([0.1, 0.9, 0.1, 0.1]))
    assert t == Abs(Index(0)) and display_type(ty) == "(A->A)"
    # l(l(a(0,l(0)))): the application's function is drawn in the neutral state
    rng = Scripted([0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.1, 0.9, 0.1, 0.1])
    t, ty = attempt_typed_nf(cfg, rng)
    assert t == Abs(Abs(App(Index(0), Abs(Index(0)))))
    assert display_type(ty) == "(A->((B->B)->C)->C)"
    assert rng.used == 10


def test_scripted_nf_flattened_rejects_redex():
    cfg = SamplerConfig(NF, 0, 10, nf_mode=NFMode.FLATTENED)
    # l(a(l(0), 0)) is typable but has a redex
    draws = [0.1, 0.9, 0.1, 0.4, 0.1, 0.4, 0.1]
    assert attempt_typed_nf(cfg, Scripted(draws)) is None
    faithful = SamplerConfig(NF, 0, 10)
    assert attempt_typed_nf(faithful, Scripted([0.1, 0.9, 0.1, 0.1])) is not None


def test_pick_index():
    s = TypeStore()
    a, b, want = s.fresh_var(), s.fresh_var(), s.fresh_var()
    idx, units = pick_index([a], want, s, Scripted([0.1]), 0, 10, 0.7)
    assert idx == Index(0) and units == 0 and s.resolve(want) == s.resolve(a)
    s2 = TypeStore()
    a, b, want = s2.fresh_var(), s2.fresh_var(), s2.fresh_var()
    idx, units = pick_index([a, b], want, s2, Scripted([0.9, 0.1]), 3, 10, 0.7)
    assert idx == Index(1) and units == 4
    assert pick_index([], want, s2, Scripted([0.0]), 0, 10, 0.7) is None
    assert pick_index([a], want, s2, Scripted([0.9, 0.1]), 0, 10, 0.7) is None
    assert pick_index([a, b], want, s2, Scripted([0.9, 0.1]), 10, 10, 0.7) is None
    s3 = TypeStore()
    a = s3.fresh_var()
    assert pick_index([a], Arrow(a, a), s3, Scripted([0.1]), 0, 10, 0.7) is None


def test_type_from_code():
    assert display_type(type_from_code([-1, 4, -1, 9, 4])) == "(A->B->A)"
    with pytest.raises(ValueError):
        type_from_code([-1, 3])


def test_fixed_seed_reproducible():
    cfg = SamplerConfig(T, 20, 40, seed=123)
    assert sample(cfg) == sample(cfg)
    r = sample(cfg)
    assert r.seed == 123 and valid(r, cfg)


def test_budget_monotone():
    cfg = SamplerConfig(T, 40, 60, seed=9)
    r = sample(cfg)
    bigger = sample(SamplerConfig(T, 40, 60, max_steps=r.steps + 100000, seed=9))
    assert bigger == r
    exact = sample(SamplerConfig(T, 40, 60, max_steps=r.steps, seed=9))
    assert exact == r
    with pytest.raises(SamplerExhausted) as info:
        sample(SamplerConfig(T, 40, 60, max_steps=r.steps - 1, seed=9))
    assert info.value.steps == r.steps - 1


def test_stream_starts_with_sample():
    cfg = SamplerConfig(NF, 10, 20, seed=4)
    first = next(sample_stream(cfg))
    assert first == sample(cfg)


@pytest.mark.parametrize("cls, mode", [(T, NFMode.FAITHFUL), (NF, NFMode.FAITHFUL), (NF, NFMode.FLATTENED)])
def test_outputs_validate(cls, mode):
    cfg = SamplerConfig(cls, 10, 30, seed=1, nf_mode=mode)
    for r in itertools.islice(sample_stream(cfg), 300):
        assert valid(r, cfg), print_term(r.term)


def _uniformity(cls, units, per_term, nf_mode=NFMode.FAITHFUL, seed=2024):
    tclass = TermClass.CLOSED_TYPABLE if cls is T else TermClass.CLOSED_TYPABLE_NF
    support = {print_term(t): display_type(ty) for t, ty in enumerate_typed(tclass, units)}
    cfg = SamplerConfig(cls, units, units, seed=seed, nf_mode=nf_mode)
    n = per_term * len(support)
    hits = Counter()
    for r in itertools.islice(sample_stream(cfg), n):
        key = print_term(r.term)
        assert support[key] == r.type
        hits[key] += 1
    stat, p = chisquare([hits[k] for k in support])
    return len(support), p


def test_uniform_small_typed():
    size, p = _uniformity(T, 4, 1000)
    assert size == 5 and p > 0.001


def test_uniform_small_nf_faithful():
    size, p = _uniformity(NF, 4, 1000)
    assert size == 3 and p > 0.001
    size, p = _uniformity(NF, 5, 300)
    assert size == 7 and p > 0.001


def test_flattened_mode_is_not_uniform():
    # The single-state variant weighs a term by x^(u - 2a) * (p_index (1-x) p_app)^a for
    # a applications; that product is about 0.057 against x^2 = 0.111, so terms with
    # more applications are under-sampled and post-hoc filtering cannot fix it.
    size, p = _uniformity(NF, 5, 500, nf_mode=NFMode.FLATTENED)
    assert size == 7 and p < 1e-6


def test_load_thresholds():
    text = "# comment\nboltzmann_index=0.3\nboltzmann_lambda = 0.6\nboltzmann_leaf=0.7\n"
    assert load_thresholds(text, T) == (0.3, 0.6, 0.7)
    with pytest.raises(ValueError):
        load_thresholds("boltzmann_index=0.3\n", T)
    with pytest.raises(ValueError):
        load_thresholds("boltzmann_nf_lambda=abc\n", NF)
