import numpy as np
import pytest

from doflab.errors import InputError
from doflab.linalg import Tolerance
from doflab.network import (ChannelSet, NetworkConfig, PowerPolicy,
                            channel_set_from_dict, channel_set_to_dict,
                            desired_channels, generate_channels,
                            interference_channels)


def make_set(L=2, K=2, M=3, N=2, seed=1, **kw):
    return generate_channels(NetworkConfig(L=L, K=K, M=M, N=N, seed=seed, **kw))


def test_generate_channels_count_shape_rank():
    cs = make_set()
    assert len(cs.channels) == 8
    for h in cs.channels.values():
        assert h.shape == (2, 3)
        assert np.linalg.matrix_rank(h) == 2  # independent rank oracle


def test_three_cell_topology_count():
    cs = make_set(L=3, K=2, M=2, N=2)
    assert len(cs.channels) == 18


@pytest.mark.parametrize("L,K", [(1, 1), (2, 3), (3, 2)])
def test_channel_count_is_l_squared_k(L, K):
    cs = make_set(L=L, K=K, M=2, N=2)
    assert len(cs.channels) == L * L * K


def test_generation_deterministic():
    a = make_set(seed=11)
    b = make_set(seed=11)
    for key in a.channels:
        np.testing.assert_array_equal(a.channels[key], b.channels[key])


def test_different_seeds_differ():
    a = make_set(seed=1)
    b = make_set(seed=2)
    assert not np.array_equal(a.channel(1, 1, 1), b.channel(1, 1, 1))


def test_per_link_streams_are_isolated():
    # every matrix draws from its own (seed, m, l, k) stream, so changing
    # the network size leaves the shared links bit-identical
    small = make_set(K=1, seed=6)
    large = make_set(K=2, seed=6)
    for m in (1, 2):
        for l in (1, 2):
            np.testing.assert_array_equal(small.channel(m, l, 1),
                                          large.channel(m, l, 1))


def test_uniform_square_channels_are_bounded():
    cs = make_set(dist="uniform-square")
    for h in cs.channels.values():
        assert np.max(np.abs(h.real)) <= 1.0 and np.max(np.abs(h.imag)) <= 1.0


def test_desired_channels_order():
    cs = make_set()
    wanted = desired_channels(cs, 1)
    assert len(wanted) == 2
    np.testing.assert_array_equal(wanted[0], cs.channel(1, 1, 1))
    np.testing.assert_array_equal(wanted[1], cs.channel(1, 1, 2))


def test_desired_channels_single_user():
    cs = make_set(K=1)
    wanted = desired_channels(cs, 2)
    assert len(wanted) == 1
    np.testing.assert_array_equal(wanted[0], cs.channel(2, 2, 1))


def test_desired_channels_index_out_of_range():
    cs = make_set()
    with pytest.raises(IndexError):
        desired_channels(cs, 3)


def test_interference_channels_two_cells():
    cs = make_set()
    crossing = interference_channels(cs, 1)
    assert len(crossing) == 2
    np.testing.assert_array_equal(crossing[0], cs.channel(1, 2, 1))
    np.testing.assert_array_equal(crossing[1], cs.channel(1, 2, 2))


def test_interference_channels_three_cells_ordered():
    cs = make_set(L=3, K=2, M=2, N=2)
    crossing = interference_channels(cs, 2)
    assert len(crossing) == 4
    np.testing.assert_array_equal(crossing[0], cs.channel(2, 1, 1))
    np.testing.assert_array_equal(crossing[3], cs.channel(2, 3, 2))


def test_interference_channels_single_cell_empty():
    cs = make_set(L=1, K=2)
    assert interference_channels(cs, 1) == []


def test_channels_are_read_only():
    cs = make_set()
    with pytest.raises(ValueError):
        cs.channel(1, 1, 1)[0, 0] = 0.0


def test_entry_independence_proxy_across_seeds():
    # sample correlation between two links' (0, 0) entries over many seeds
    xs, ys = [], []
    for seed in range(1000):
        cfg = NetworkConfig(L=2, K=1, M=2, N=2, seed=seed)
        cs = generate_channels(cfg)
        xs.append(cs.channel(1, 1, 1)[0, 0])
        ys.append(cs.channel(2, 2, 1)[0, 0])
    xs, ys = np.asarray(xs), np.asarray(ys)
    for a, b in ((xs.real, ys.real), (xs.imag, ys.imag), (xs.real, xs.imag)):
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_config_validation():
    with pytest.raises(InputError):
        NetworkConfig(L=0, K=1, M=1, N=1)
    with pytest.raises(InputError):
        NetworkConfig(L=1, K=1, M=1, N=1, seed=-3)
    with pytest.raises(InputError):
        NetworkConfig(L=1, K=1, M=1, N=1, dist="rayleigh")


def test_config_round_trip():
    cfg = NetworkConfig(L=2, K=3, M=4, N=3, beta=1, seed=5,
                        dist="uniform-square", tol=Tolerance(1e-9))
    assert NetworkConfig.from_dict(cfg.to_dict()) == cfg


def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(InputError):
        NetworkConfig.from_dict({"L": 2, "K": 1, "M": 1, "N": 1, "cells": 2})


def test_config_from_dict_rejects_missing_keys():
    with pytest.raises(InputError):
        NetworkConfig.from_dict({"L": 2, "K": 1, "M": 1})


def test_power_policy_meets_trace_constraint():
    policy = PowerPolicy(rho=10.0, beta=4)
    assert policy.per_stream_power == pytest.approx(2.5)
    assert policy.beta * policy.per_stream_power == pytest.approx(policy.rho)


def test_power_policy_rejects_non_positive_power():
    with pytest.raises(InputError):
        PowerPolicy(rho=0.0)


def test_channel_serialization_round_trip():
    cs = make_set(seed=9)
    doc = channel_set_to_dict(cs)
    assert set(doc) == {"config", "channels"}
    assert all(set(e) == {"m", "l", "k", "re", "im"} for e in doc["channels"])
    back = channel_set_from_dict(doc)
    assert back.config == cs.config
    for key in cs.channels:
        np.testing.assert_array_equal(back.channels[key], cs.channels[key])


def test_channel_deserialization_rejects_bad_docs():
    doc = channel_set_to_dict(make_set(seed=9))
    with pytest.raises(InputError):
        channel_set_from_dict({"config": doc["config"]})
    missing = {"config": doc["config"], "channels": doc["channels"][1:]}
    with pytest.raises(InputError):
        channel_set_from_dict(missing)
    wrong_shape = {"config": doc["config"],
                   "channels": [{**e, "re": [[0.0]], "im": [[0.0]]}
                                for e in doc["channels"]]}
    with pytest.raises(InputError):
        channel_set_from_dict(wrong_shape)


def test_channel_accessor_validates_indices():
    cs = make_set()
    with pytest.raises(IndexError):
        cs.channel(1, 1, 3)
    with pytest.raises(IndexError):
        cs.channel(0, 1, 1)
