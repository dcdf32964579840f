"""Both kernel backends must agree exactly: counts, draws, and sampled terms."""
import pytest

from lambdagen import _backend, _kernels_py
from lambdagen._rng import GOLDEN_GAMMA, MASK64, SplitMix64, derive_seed, mix64
from lambdagen.sampler import default_thresholds, SampleClass

HAVE_COMPILED = "compiled" in _backend.available_backends()
needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")


def test_splitmix_reference_values():
    # first outputs for seed 0 of the reference SplitMix64
    g = SplitMix64(0)
    assert [g.next_u64() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_random_is_53_bit_scaled():
    a, b = SplitMix64(99), SplitMix64(99)
    for _ in range(100):
        assert a.random() == (b.next_u64() >> 11) * 2.0 ** -53


def test_derived_seeds_distinct():
    seeds = {derive_seed(7, i) for i in range(10000)}
    assert len(seeds) == 10000
    assert derive_seed(7, 0) == mix64((7 + GOLDEN_GAMMA) & MASK64)


@pytest.mark.parametrize("typed, closed, nf", [(t, c, n) for t in (0, 1) for c in (0, 1) for n in (0, 1)])
def test_count_search_backends_agree(kernels, typed, closed, nf):
    ref = [_kernels_py.count_search(typed, closed, nf, u) for u in range(9)]
    assert [kernels.count_search(typed, closed, nf, u) for u in range(9)] == ref


@needs_compiled
@pytest.mark.parametrize("mode", [0, 1, 2])
def test_sampler_parity(mode):
    comp = _backend.load_backend("compiled")
    cls = SampleClass.TYPED if mode == 0 else SampleClass.TYPED_NF
    t = default_thresholds(cls)
    for seed in range(12):
        for lo, hi in ((0, 3), (5, 5), (10, 30)):
            a = _kernels_py.run_sampler(mode, *t, lo, hi, 5000, seed)
            b = comp.run_sampler(mode, *t, lo, hi, 5000, seed)
            assert a == b


def test_cancel_token_stops_before_first_attempt(kernels):
    tok = kernels.CancelToken()
    assert not tok.is_set()
    tok.set()
    attempts, state, res = kernels.run_sampler(0, *default_thresholds(SampleClass.TYPED), 0, 10, 100, 5, tok)
    assert (attempts, state, res) == (0, 5, None)


def test_state_advances_identically(kernels):
    t = default_thresholds(SampleClass.TYPED)
    # budget exhausted without success: attempts and final state are reported
    attempts, state, res = kernels.run_sampler(0, *t, 150, 150, 50, 1)
    assert res is None and attempts == 50
    assert (attempts, state, res) == _kernels_py.run_sampler(0, *t, 150, 150, 50, 1)


def test_env_var_forces_python_backend():
    import os
    import subprocess
    import sys
    code = "from lambdagen import _backend; print(_backend.backend_name())"
    env = dict(os.environ, LAMBDAGEN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env["LAMBDAGEN_PURE_PYTHON"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == _backend.available_backends()[0]
