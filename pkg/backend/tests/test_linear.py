"""
Tests for the linear-network zero-forcing scheme.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from app.config import settings
from app.galois import dot
from app.models.content import FileCatalog
from app.models.network import LinearNetwork
from app.models.schemas import ScenarioConfig
from app.services.bounds import linear_delay
from app.services.linear import LinearPlanParams, LinearScheme, MiniFreshLedger, design_precoders
from app.services.single_server import SingleServerScheme
from app.utils.exceptions import LedgerOverflow, PrecoderNotFound, SingularDecodeMatrix
from app.utils.helpers import binom


def make_scheme(gf, K, L, t, seed=7, multiple=1):
    rng = np.random.default_rng(seed)
    network = LinearNetwork.sample(gf, K, L, rng, active_servers=min(L, K - t) or L)
    spf = LinearPlanParams.build(K, L, t).leaf_count * multiple
    return LinearScheme(gf, K, K, t, spf, network,
                        precoder_rng=np.random.default_rng([seed, 2]),
                        coefficient_rng=np.random.default_rng([seed, 3]))


def decode_all(scheme, catalog, demands):
    caches = scheme.place(catalog)
    block, files = scheme.run_delivery(catalog, caches, demands)
    ok = all(np.array_equal(files[u], catalog.file(demands[u - 1])) for u in files)
    return block, ok


class TestPlanParams:
    """t, active servers, mini-files and combinations."""

    def test_two_servers(self):
        """K=4, L=2, t=1: two minis per sub-file, two combinations per subset."""
        params = LinearPlanParams.build(4, 2, 1)
        assert (params.active_servers, params.minifiles, params.omega_max, params.subset_size) == (2, 2, 2, 3)

    def test_fewer_active_servers(self):
        """K=4, L=3, t=2 only activates two servers."""
        params = LinearPlanParams.build(4, 3, 2)
        assert (params.active_servers, params.minifiles, params.omega_max, params.subset_size) == (2, 1, 3, 4)

    def test_everything_cached(self):
        """t = K needs no delivery."""
        params = LinearPlanParams.build(4, 2, 4)
        assert not params.delivers and params.leaf_count == 1


class TestPrecoders:
    """Zero-forcing vectors."""

    def test_constraints_hold(self, gf16, rng):
        """u_S^T is orthogonal to h_j outside T and not orthogonal inside T."""
        network = LinearNetwork.sample(gf16, 6, 3, rng)
        params = LinearPlanParams.build(6, 3, 1)
        precoders = design_precoders(gf16, network, params, rng)
        assert len(precoders) > 0
        for (S, T), u in precoders.vectors.items():
            for j in S:
                value = dot(gf16, network.row(j, 3), u)
                assert (value != 0) == (j in T)

    def test_impossible_channel(self, gf16, rng):
        """Parallel channel rows make some precoder impossible."""
        H = np.array([[1, 2], [gf16.mul(3, 1), gf16.mul(3, 2)], [5, 9]], dtype=np.int64)
        network = LinearNetwork(gf16, H)
        with pytest.raises(PrecoderNotFound):
            design_precoders(gf16, network, LinearPlanParams.build(3, 2, 1), rng, max_retries=4)


class TestLedger:
    """Fresh mini-file indices."""

    def test_overflow(self):
        """Peeking past the last mini-file fails."""
        ledger = MiniFreshLedger(1)
        ledger.advance([(1, (2,))])
        with pytest.raises(LedgerOverflow):
            ledger.peek(1, (2,))

    def test_completion(self, gf16, make_catalog):
        """Every (r, tau) with r outside tau ends one past the mini-file count."""
        scheme = make_scheme(gf16, 5, 2, 1)
        catalog = make_catalog(gf16, 5, scheme.plan.symbols_per_file)
        ledger = MiniFreshLedger(scheme.params.minifiles)
        scheme.deliver(catalog, (1, 2, 3, 4, 5), ledger)
        assert ledger.is_complete(5, 1)


class TestLinearScheme:
    """Placement, delivery and decoding through r = H s."""

    def test_three_users_two_servers(self, gf16, make_catalog):
        """K=3, L=2, M=1: two thirds of a file, everyone decodes."""
        scheme = make_scheme(gf16, 3, 2, 1)
        spf = scheme.plan.symbols_per_file
        block, ok = decode_all(scheme, make_catalog(gf16, 3, spf), (1, 2, 3))
        assert ok
        assert Fraction(block.slot_count, spf) == Fraction(2, 3)

    @pytest.mark.parametrize("L,t", [(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 1), (3, 2), (3, 3), (1, 1), (4, 0)])
    def test_delay_matches_formula(self, gf16, make_catalog, L, t):
        """Measured slots equal (K - t) / min(K, L + t) at K = N = 4."""
        scheme = make_scheme(gf16, 4, L, t)
        spf = scheme.plan.symbols_per_file
        block, ok = decode_all(scheme, make_catalog(gf16, 4, spf), (4, 3, 2, 1))
        assert ok
        assert Fraction(block.slot_count, spf) == linear_delay(4, L, t, 4)

    def test_memory(self, gf16, make_catalog):
        """Each user stores exactly M F bits."""
        config = ScenarioConfig(K=4, L=2, N=4, M=1, F=16 * 8, m=16, seed=3)
        scheme = LinearScheme.from_config(config)
        caches = scheme.place(make_catalog(gf16, 4, config.symbols_per_file))
        assert all(c.memory_used() == config.F for c in caches)

    def test_zero_forcing_columns(self, gf16, make_catalog):
        """A user outside T receives nothing of G(T) in any block."""
        scheme = make_scheme(gf16, 4, 2, 1)
        catalog = make_catalog(gf16, 4, scheme.plan.symbols_per_file)
        block = scheme.deliver(catalog, (1, 2, 3, 4))
        for group in block.groups:
            record = group.record
            for T in record.subsets:
                for j in record.subset:
                    if j not in T:
                        assert scheme.channel_gain(j, record.subset, T) == 0
                    else:
                        assert scheme.channel_gain(j, record.subset, T) != 0

    def test_receive_row(self, gf16, make_catalog):
        """The per-user receive is row k of H X."""
        scheme = make_scheme(gf16, 3, 2, 1)
        block = scheme.deliver(make_catalog(gf16, 3, scheme.plan.symbols_per_file), (1, 2, 3))
        assert np.array_equal(scheme.receive(block, 2), scheme.network.receive(block)[1])

    def test_exhaustive_demands(self, gf16, make_catalog):
        """All 4^4 demand vectors at K=4, L=2, M=1."""
        scheme = make_scheme(gf16, 4, 2, 1)
        catalog = make_catalog(gf16, 4, scheme.plan.symbols_per_file)
        caches = scheme.place(catalog)
        for demands in itertools.product(range(1, 5), repeat=4):
            _, files = scheme.run_delivery(catalog, caches, demands)
            assert all(np.array_equal(files[u], catalog.file(demands[u - 1])) for u in files)

    @pytest.mark.parametrize("L,t", [(2, 1), (3, 1), (3, 2)])
    def test_sampled_demands_six_users(self, gf16, make_catalog, rng, L, t):
        """Random demand vectors at K = 6."""
        scheme = make_scheme(gf16, 6, L, t)
        catalog = make_catalog(gf16, 6, scheme.plan.symbols_per_file)
        caches = scheme.place(catalog)
        for demands in rng.integers(1, 7, size=(5, 6)):
            demands = tuple(int(d) for d in demands)
            _, files = scheme.run_delivery(catalog, caches, demands)
            assert all(np.array_equal(files[u], catalog.file(demands[u - 1])) for u in files)

    @pytest.mark.parametrize("L,t,active", [(2, 2, 2), (3, 2, 3), (4, 2, 4), (4, 5, 3), (3, 6, 2)])
    def test_sampled_demands_eight_users(self, gf16, make_catalog, rng, L, t, active):
        """Random demand vectors at K = 8, including L' = K - t < L."""
        scheme = make_scheme(gf16, 8, L, t)
        assert scheme.params.active_servers == active == min(L, 8 - t)
        spf = scheme.plan.symbols_per_file
        catalog = make_catalog(gf16, 8, spf)
        caches = scheme.place(catalog)
        for demands in rng.integers(1, 9, size=(3, 8)):
            demands = tuple(int(d) for d in demands)
            block, files = scheme.run_delivery(catalog, caches, demands)
            assert all(np.array_equal(files[u], catalog.file(demands[u - 1])) for u in files)
            assert Fraction(block.slot_count, spf) == linear_delay(8, L, t, 8)


class TestOneServer:
    """With L = 1 the linear scheme is the single-server scheme."""

    @pytest.mark.parametrize("K,t", [(3, 1), (4, 0), (4, 1), (4, 2), (5, 2), (5, 3)])
    def test_matches_single_server(self, gf16, make_catalog, K, t):
        """Same slot count and same decoded files as SingleServerScheme."""
        leaves = LinearPlanParams.build(K, 1, t).leaf_count
        spf = math.lcm(leaves, binom(K, t))
        linear = make_scheme(gf16, K, 1, t, multiple=spf // leaves)
        single = SingleServerScheme(gf16, K, K, t, spf)
        catalog = make_catalog(gf16, K, spf)
        demands = tuple(range(K, 0, -1))

        linear_block, linear_files = linear.run_delivery(catalog, linear.place(catalog), demands)
        single_block, single_files = single.run_delivery(catalog, single.place(catalog), demands)

        assert linear.params.active_servers == 1
        assert linear_block.slot_count == single_block.slot_count
        assert Fraction(single_block.slot_count, spf) == Fraction(K - t, t + 1)
        assert linear_files.keys() == single_files.keys()
        for user in single_files:
            assert np.array_equal(linear_files[user], single_files[user])
            assert np.array_equal(single_files[user], catalog.file(demands[user - 1]))


class TestSingularBlocks:
    """Re-randomization of dependent combinations."""

    def test_persistent_singularity(self, gf16, make_catalog, monkeypatch):
        """Identical combinations for every omega can never be inverted."""
        scheme = make_scheme(gf16, 3, 2, 1)
        catalog = make_catalog(gf16, 3, scheme.plan.symbols_per_file)
        monkeypatch.setattr(
            scheme, "_draw_coefficients",
            lambda count: np.ones((scheme.params.omega_max, count, scheme.params.t + 1), dtype=np.int64),
        )
        with pytest.raises(SingularDecodeMatrix):
            scheme.deliver(catalog, (1, 2, 3))
        assert scheme.singular_retries >= settings.singular_max_attempts - 1

    def test_small_field_reports_retries(self, gf4):
        """Over GF(16) dependent draws show up and are counted, never silent."""
        events = 0
        for seed in range(10):
            try:
                scheme = make_scheme(gf4, 4, 2, 1, seed=seed)
            except PrecoderNotFound:
                events += 1
                continue
            catalog = FileCatalog.generate(gf4, 4, scheme.plan.symbols_per_file, np.random.default_rng(seed))
            try:
                scheme.deliver(catalog, (1, 2, 3, 4))
            except SingularDecodeMatrix:
                events += 1
            events += scheme.singular_retries + scheme.precoders.retries + scheme.network.resamples
        assert events > 0
