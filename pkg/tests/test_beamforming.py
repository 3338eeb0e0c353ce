import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ia_swipt.beamforming import (
    INVERTED_LINKS,
    design_beamformers,
    design_tp1,
    design_tp2,
    direct_gain,
    leakage,
    null_space_basis,
)
from ia_swipt.channel import (
    ALL_LINKS,
    Topology,
    draw_channel_set,
    draw_mismatched_batch,
    trial_rng,
)

I2 = np.eye(2, dtype=complex)


def _random_channels(seed, trials=None, antennas=2):
    topo = Topology.uniform(antennas=antennas, streams=antennas // 2)
    if trials is None:
        return draw_channel_set(topo, trial_rng(seed, 0)).matrices
    ch, _, _ = draw_mismatched_batch(topo, 0.0, seed, range(trials))
    return ch.matrices


# ---------------------------------------------------------------- null space


def test_null_space_single_row_axis():
    basis = null_space_basis(np.array([[1.0, 0.0]], dtype=complex))
    assert np.allclose(basis, np.array([[0.0], [1.0]]))


def test_null_space_diagonal_direction():
    m = np.array([[1.0, 1.0]], dtype=complex) / np.sqrt(2.0)
    basis = null_space_basis(m)
    expect = np.array([[1.0], [-1.0]]) / np.sqrt(2.0)
    assert np.allclose(basis, expect)
    # phase convention: leading entry real positive
    assert basis[0, 0].imag == 0.0 and basis[0, 0].real > 0


def test_null_space_rejects_bad_shapes_and_rank():
    with pytest.raises(ValueError):
        null_space_basis(np.zeros((2, 2), dtype=complex))
    with pytest.raises(ValueError):
        null_space_basis(np.zeros((1, 2), dtype=complex))


@settings(max_examples=40, deadline=None)
@given(
    arrays(
        np.float64,
        (2, 4),
        elements=st.floats(min_value=-5, max_value=5, allow_nan=False, width=64),
    )
)
def test_null_space_property(parts):
    m = (parts[0] + 1j * parts[1]).reshape(1, 4)
    if np.linalg.norm(m) < 1e-6:
        return
    basis = null_space_basis(m)
    assert basis.shape == (4, 3)
    assert np.max(np.abs(m @ basis)) < 1e-10 * max(1.0, np.linalg.norm(m))
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10


# ------------------------------------------------------------------- designs


def test_design_tp1_diagonal_example():
    ch = {
        ("R", "1"): np.diag([1.0, 2.0]).astype(complex),
        ("R", "2"): np.diag([2.0, 1.0]).astype(complex),
        ("1", "2", 1): I2.copy(),
        ("2", "1", 1): np.diag([3.0, 1.0]).astype(complex),
        ("1", "S"): I2.copy(),
        ("2", "S"): I2.copy(),
    }
    bf = design_tp1(ch, 1)
    e1 = np.array([[1.0], [0.0]])
    e2 = np.array([[0.0], [1.0]])
    assert np.allclose(bf.precoders["1"], e1)
    assert np.allclose(bf.precoders["2"], e1)
    assert np.allclose(bf.precoders["S"], e1)
    assert np.allclose(bf.combiners["R"], e2)
    assert np.allclose(bf.combiners["1"], e2)
    assert np.allclose(bf.combiners["2"], e2)


def test_design_tp2_diagonal_example():
    ch = {
        ("D", "R"): np.diag([3.0, 1.0]).astype(complex),
        ("1", "R"): I2.copy(),
        ("2", "R"): I2.copy(),
        ("1", "2", 2): I2.copy(),
        ("2", "1", 2): I2.copy(),
    }
    bf = design_tp2(ch, 1)
    assert np.allclose(bf.precoders["R"], np.array([[1.0], [0.0]]))


def test_design_unit_power_and_orthonormal_combiners():
    ch = _random_channels(31, trials=20)
    bf = design_beamformers(ch, 1)
    for period in (bf.tp1, bf.tp2):
        for v in period.precoders.values():
            power = np.sum(np.abs(v) ** 2, axis=(-2, -1))
            assert np.max(np.abs(power - 1.0)) < 1e-12
        for u in period.combiners.values():
            gram = np.conj(np.swapaxes(u, -1, -2)) @ u
            assert np.max(np.abs(gram - np.eye(u.shape[-1]))) < 1e-12


def test_design_eigenvector_equation():
    ch = _random_channels(32)
    inv = np.linalg.inv
    chain = (
        inv(ch[("R", "1")])
        @ ch[("R", "2")]
        @ inv(ch[("1", "2", 1)])
        @ ch[("1", "S")]
        @ inv(ch[("2", "S")])
        @ ch[("2", "1", 1)]
    )
    v1 = design_tp1(ch, 1).precoders["1"]
    image = chain @ v1
    mu = (np.conj(v1.T) @ image)[0, 0]
    assert np.linalg.norm(image - mu * v1) < 1e-9 * abs(mu)


def test_design_is_deterministic():
    ch = _random_channels(33, trials=4)
    a = design_beamformers(ch, 1)
    b = design_beamformers(ch, 1)
    for key in a.tp1.precoders:
        assert np.array_equal(a.tp1.precoders[key], b.tp1.precoders[key])
    for key in a.tp2.combiners:
        assert np.array_equal(a.tp2.combiners[key], b.tp2.combiners[key])


def test_leakage_random_batch():
    ch = _random_channels(34, trials=100)
    bf = design_beamformers(ch, 1)
    rep = leakage(bf, ch)
    assert len(rep.products) == 10
    assert len(rep.alignment) == 5
    assert rep.worst_relative() < 1e-10
    assert rep.worst_alignment() < 1e-9


def test_leakage_four_antennas_two_streams():
    ch = _random_channels(35, trials=25, antennas=4)
    bf = design_beamformers(ch, 2)
    rep = leakage(bf, ch)
    assert rep.worst_relative() < 1e-10
    assert rep.worst_alignment() < 1e-9
    gains = direct_gain(bf, ch)
    assert min(float(np.min(v)) for v in gains.values()) > 1e-9


def test_direct_gains_positive_and_scale_quadratically():
    ch = dict(_random_channels(36))
    bf = design_beamformers(ch, 1)
    gains = direct_gain(bf, ch)
    assert set(gains) == {"tp1:p1", "tp1:p2", "tp1:relay", "tp2:p1", "tp2:p2", "tp2:dest"}
    assert min(float(np.min(v)) for v in gains.values()) > 1e-9

    scaled = dict(ch)
    scaled[("D", "R")] = 3.0 * ch[("D", "R")]
    gains2 = direct_gain(bf, scaled)
    assert gains2["tp2:dest"] == pytest.approx(9.0 * gains["tp2:dest"], rel=1e-12)


def test_contrived_degenerate_direct_channel():
    # point the desired link of pair 1 straight into the aligned interference
    # span; the combiner then kills the signal along with the interference
    ch = dict(_random_channels(37))
    bf = design_beamformers(ch, 1)
    v1 = bf.tp1.precoders["1"]
    interference_dir = ch[("1", "2", 1)] @ bf.tp1.precoders["2"]
    ch[("1", "1", 1)] = interference_dir @ np.conj(v1.T)
    gains = direct_gain(bf, ch)
    assert float(gains["tp1:p1"]) < 1e-20


def test_inverted_links_are_valid():
    assert set(INVERTED_LINKS) <= set(ALL_LINKS)
    assert len(INVERTED_LINKS) == 6
