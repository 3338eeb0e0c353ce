import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ia_swipt.capacity import (
    CHUNK_TRIALS,
    capacity_destination,
    capacity_primary,
    destination_prelog,
    ergodic_capacity,
    estimate_from_samples,
    primary_weights,
    resolve_workers,
    single_trial,
)
from ia_swipt.channel import CsiScenario, Topology
from ia_swipt.harvesting import PowerConfig, ProtocolParams

TOPO = Topology.uniform()
PERFECT = CsiScenario.perfect()


def test_capacity_destination_examples():
    params = ProtocolParams.tsr(0.19)
    # prelog (1-0.19)/2 = 0.405, bottleneck min(3, 8) = 3, log2(4) = 2
    assert float(capacity_destination(params, 3.0, 8.0)) == pytest.approx(0.81, rel=1e-12)
    assert float(capacity_destination(ProtocolParams.psr(0.3), 3.0, 5.0)) == pytest.approx(
        1.0, rel=1e-12
    )
    assert float(capacity_destination(params, 0.0, 7.0)) == 0.0


def test_destination_prelog():
    assert destination_prelog(ProtocolParams.tsr(0.19)) == pytest.approx(0.405)
    assert destination_prelog(ProtocolParams.psr(0.9)) == 0.5


def test_primary_weights_examples():
    w = primary_weights("tsr", 0.19)
    assert w == (pytest.approx(0.595), pytest.approx(0.405))
    assert primary_weights("tsr", 0.0) == (0.5, 0.5)
    assert primary_weights("psr") == (0.5, 0.5)
    with pytest.raises(ValueError):
        primary_weights("tsr", None)
    with pytest.raises(ValueError):
        primary_weights("tsr", 1.2)
    with pytest.raises(ValueError):
        primary_weights("dual", 0.5)


def test_capacity_primary_examples():
    # TSR with alpha = 0 weighs both periods equally: 0.5*log2(4) + 0.5*log2(2)
    w1, w2 = primary_weights("tsr", 0.0)
    assert w1 * math.log2(4.0) + w2 * math.log2(2.0) == pytest.approx(1.5)
    params = ProtocolParams.psr(0.4)
    assert float(capacity_primary(params, 3.0, 1.0)) == pytest.approx(1.5, rel=1e-12)
    params_t = ProtocolParams.tsr(0.19)
    expect = 0.595 * math.log2(1 + 3.0) + 0.405 * math.log2(1 + 1.0)
    assert float(capacity_primary(params_t, 3.0, 1.0)) == pytest.approx(expect, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_primary_weights_sum_to_one(alpha):
    w1, w2 = primary_weights("tsr", alpha)
    assert w1 + w2 == pytest.approx(1.0, rel=1e-12)
    assert w1 >= 0.5 >= w2


@settings(max_examples=40, deadline=None)
@given(
    g1=st.floats(min_value=0.0, max_value=1e6),
    g2=st.floats(min_value=0.0, max_value=1e6),
    alpha=st.floats(min_value=1e-6, max_value=1 - 1e-6),
)
def test_capacity_destination_bottleneck_property(g1, g2, alpha):
    params = ProtocolParams.tsr(alpha)
    c = float(capacity_destination(params, g1, g2))
    assert c <= destination_prelog(params) * math.log2(1 + min(g1, g2)) + 1e-12
    assert c >= 0.0


def test_estimate_from_samples():
    est = estimate_from_samples(np.full(5, 0.81))
    assert est.mean == pytest.approx(0.81, rel=1e-14)
    assert est.stderr == pytest.approx(0.0, abs=1e-12)
    assert est.trials == 5
    est2 = estimate_from_samples(np.array([1.0, 2.0, 3.0, 4.0]))
    assert est2.mean == pytest.approx(2.5)
    assert est2.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2.0)
    single = estimate_from_samples(np.array([2.0]))
    assert single.stderr == 0.0
    with pytest.raises(ValueError):
        estimate_from_samples(np.array([]))


def test_resolve_workers(monkeypatch):
    assert resolve_workers(4) == 4
    assert resolve_workers(0) == 1
    monkeypatch.setenv("IA_SWIPT_THREADS", "3")
    assert resolve_workers() == 3
    monkeypatch.setenv("IA_SWIPT_THREADS", "zebra")
    with pytest.raises(ValueError):
        resolve_workers()
    monkeypatch.delenv("IA_SWIPT_THREADS")
    assert resolve_workers() >= 1


def test_ergodic_validation():
    pw = PowerConfig.from_snr_db(10.0)
    with pytest.raises(ValueError):
        ergodic_capacity(TOPO, pw, PERFECT, ProtocolParams.tsr(0.3), 0, 1)
    with pytest.raises(ValueError):
        ergodic_capacity(TOPO, pw, PERFECT, ProtocolParams.tsr(0.3), 10, -1)


def test_ergodic_deterministic_and_seed_sensitive():
    pw = PowerConfig.from_snr_db(15.0)
    params = ProtocolParams.psr(0.6)
    a = ergodic_capacity(TOPO, pw, PERFECT, params, 600, 11)
    b = ergodic_capacity(TOPO, pw, PERFECT, params, 600, 11)
    c = ergodic_capacity(TOPO, pw, PERFECT, params, 600, 12)
    assert a == b
    assert a.destination.mean != c.destination.mean


def test_ergodic_worker_invariance():
    pw = PowerConfig.from_snr_db(20.0)
    params = ProtocolParams.tsr(0.35)
    trials = CHUNK_TRIALS * 2 + 100  # force several chunks
    runs = [
        ergodic_capacity(TOPO, pw, PERFECT, params, trials, 5, max_workers=w)
        for w in (1, 2, 8)
    ]
    assert runs[0] == runs[1] == runs[2]


def test_ergodic_matches_single_trial_path():
    pw = PowerConfig.from_snr_db(20.0)
    params = ProtocolParams.tsr(0.3)
    scenario = CsiScenario.mismatch(1.0, 10.0)
    n = 5
    res = ergodic_capacity(TOPO, pw, scenario, params, n, 33)
    samples = [single_trial(TOPO, pw, scenario, params, 33, t)[0] for t in range(n)]
    assert res.destination.mean == pytest.approx(
        np.mean([s.destination for s in samples]), rel=1e-12, abs=1e-15
    )
    assert res.primary[0].mean == pytest.approx(
        np.mean([s.primary[0] for s in samples]), rel=1e-12, abs=1e-15
    )
    assert res.primary[1].mean == pytest.approx(
        np.mean([s.primary[1] for s in samples]), rel=1e-12, abs=1e-15
    )


def test_ergodic_capacity_increases_with_snr():
    params = ProtocolParams.psr(0.6)
    means = []
    for snr in (0.0, 10.0, 20.0, 30.0):
        res = ergodic_capacity(TOPO, PowerConfig.from_snr_db(snr), PERFECT, params, 2000, 3)
        means.append(res.destination.mean)
    assert all(b > a for a, b in zip(means, means[1:]))


def test_ergodic_mismatch_costs_capacity():
    params = ProtocolParams.tsr(0.35)
    pw = PowerConfig.from_snr_db(20.0)
    perfect = ergodic_capacity(TOPO, pw, PERFECT, params, 3000, 4)
    bad_csi = ergodic_capacity(TOPO, pw, CsiScenario.mismatch(1.0, 10.0), params, 3000, 4)
    gap = perfect.destination.mean - bad_csi.destination.mean
    noise = math.hypot(perfect.destination.stderr, bad_csi.destination.stderr)
    assert gap > 2.0 * noise


def test_primary_pair_symmetry():
    # both pairs play the same role on average
    params = ProtocolParams.psr(0.5)
    res = ergodic_capacity(TOPO, PowerConfig.from_snr_db(20.0), PERFECT, params, 4000, 9)
    p1, p2 = res.primary
    assert p1.mean == pytest.approx(p2.mean, abs=4 * math.hypot(p1.stderr, p2.stderr))
