"""Interference-aligning precoders and zero-forcing combiners.

First transmission period: the two primary transmitters and the secondary
source choose precoders such that at each protected receiver (both primary
receivers and the relay) the two unwanted signals land in one shared
f-dimensional subspace. Writing V1 for the precoder of primary pair 1, the
three alignment conditions

    span(H_R,1 V1)   = span(H_R,2 V2)      at the relay
    span(H_1,2 V2)   = span(H_1,S VS)      at primary receiver 1
    span(H_2,1 V1)   = span(H_2,S VS)      at primary receiver 2

collapse to an invariant-subspace condition on the chained matrix

    A = H_R,1^-1 H_R,2 H_1,2^-1 H_1,S H_2,S^-1 H_2,1 ,

so V1 is built from (dominant) eigenvectors of A and V2, VS follow by solving
the first and third conditions. Each receiver then zero-forces the aligned
span with an orthonormal combiner.

Second period: the relay transmits toward the destination along the dominant
right singular vectors of that link while the primary pairs re-align against
it; the destination applies no combiner.

Everything here broadcasts over leading batch axes and is deterministic,
including eigenvector order and complex phases (see ``_fix_column_phase``).
Designs are computed from whatever channel mapping the caller passes, which in
operation is the *estimated* channel set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "INVERTED_LINKS",
    "BeamformerSet",
    "LeakageReport",
    "PeriodBeamformers",
    "design_beamformers",
    "design_tp1",
    "design_tp2",
    "direct_gain",
    "leakage",
    "null_space_basis",
]

# Links whose (estimated) matrices the designs invert; draws are screened for
# conditioning on exactly these.
INVERTED_LINKS: tuple = (
    ("R", "1"),
    ("R", "2"),
    ("1", "2", 1),
    ("2", "S"),
    ("1", "2", 2),
    ("2", "1", 2),
)


@dataclass
class PeriodBeamformers:
    """Precoders and combiners of one transmission period, keyed by node id.

    Precoders are N x f with unit Frobenius norm (unit total transmit power);
    combiners are N x f with orthonormal columns.
    """

    precoders: dict
    combiners: dict


@dataclass
class BeamformerSet:
    """The full design of one block: both transmission periods."""

    tp1: PeriodBeamformers
    tp2: PeriodBeamformers


@dataclass
class LeakageReport:
    """Interference accounting for a design evaluated on given channels.

    ``products`` maps "<period>:<receiver><-<interferer>" to ||U^H H V||_F^2,
    ``relative`` to the same normalized by ||H||_F^2, and ``alignment`` maps
    each protected receiver to the ratio sigma_(f+1)/sigma_1 of the stacked,
    individually normalized interference blocks (0 when the two spans
    coincide).
    """

    products: dict
    relative: dict
    alignment: dict

    def worst_relative(self) -> float:
        return float(max(np.max(v) for v in self.relative.values()))

    def worst_alignment(self) -> float:
        return float(max(np.max(v) for v in self.alignment.values()))


def _conj_t(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _fro2(m: np.ndarray) -> np.ndarray:
    """Squared Frobenius norm over the last two axes."""
    return np.sum(np.abs(m) ** 2, axis=(-2, -1))


def _fix_column_phase(m: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of magnitude > 1e-9 is real positive.

    Eigen and singular vector routines return columns with arbitrary unit
    phases; pinning the phase makes designs reproducible across LAPACK builds
    and lets tests compare exact bytes.
    """
    lead = np.argmax(np.abs(m) > 1e-9, axis=-2)
    pivot = np.take_along_axis(m, lead[..., None, :], axis=-2)
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1.0), 1.0)
    return m * np.conj(phase)


def _unit_columns(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m, axis=-2, keepdims=True)


def _unit_power(m: np.ndarray) -> np.ndarray:
    """Scale to unit Frobenius norm, i.e. trace(V V^H) = 1."""
    return m / np.sqrt(_fro2(m))[..., None, None]


def null_space_basis(m: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the null space of a full-rank f x N matrix.

    Returns an N x (N - f) matrix with orthonormal columns satisfying
    M @ basis = 0, with the phase convention of ``_fix_column_phase``.
    Broadcasts over leading axes. Raises ValueError when m is (numerically)
    rank deficient, since then the null space is wider than N - f and the
    design that produced m is degenerate.
    """
    m = np.asarray(m)
    rows, cols = m.shape[-2], m.shape[-1]
    if rows >= cols:
        raise ValueError(f"need a wide matrix (f < N), got shape {m.shape[-2:]}")
    _, s, vh = np.linalg.svd(m)
    if np.any(s[..., -1] <= 1e-12 * s[..., 0]):
        raise ValueError("rank-deficient input, null space is not well defined")
    basis = _conj_t(vh[..., rows:, :])
    return _fix_column_phase(basis)


def _leading_eigenvectors(a: np.ndarray, count: int) -> np.ndarray:
    """The ``count`` strongest eigenvectors of a, as unit-power N x count.

    Order: descending |eigenvalue|, ties broken by descending real then
    imaginary part, so the selection is deterministic. Columns are normalized,
    phase-fixed and the matrix scaled to unit Frobenius norm.
    """
    w, vec = np.linalg.eig(a)
    order = np.lexsort((-w.imag, -w.real, -np.abs(w)), axis=-1)
    sel = order[..., :count]
    picked = np.take_along_axis(vec, sel[..., None, :], axis=-1)
    return _fix_column_phase(_unit_columns(picked)) / math.sqrt(count)


def design_tp1(channels: Mapping, streams: int) -> PeriodBeamformers:
    """First-period design from a mapping of (estimated) channel matrices.

    Needs links (R,1), (R,2), (1,2,1), (2,1,1), (1,S), (2,S). Returns
    precoders for nodes "1", "2", "S" and combiners for "1", "2", "R".
    """
    inv = np.linalg.inv
    h_r1 = np.asarray(channels[("R", "1")])
    h_r2 = np.asarray(channels[("R", "2")])
    h_12 = np.asarray(channels[("1", "2", 1)])
    h_21 = np.asarray(channels[("2", "1", 1)])
    h_1s = np.asarray(channels[("1", "S")])
    h_2s = np.asarray(channels[("2", "S")])

    chain = inv(h_r1) @ h_r2 @ inv(h_12) @ h_1s @ inv(h_2s) @ h_21
    v1 = _leading_eigenvectors(chain, streams)
    v2 = _unit_power(inv(h_r2) @ h_r1 @ v1)
    vs = _unit_power(inv(h_2s) @ h_21 @ v1)

    u1 = null_space_basis(_conj_t(h_12 @ v2))
    u2 = null_space_basis(_conj_t(h_21 @ v1))
    ur = null_space_basis(_conj_t(h_r1 @ v1))
    return PeriodBeamformers(
        precoders={"1": v1, "2": v2, "S": vs},
        combiners={"1": u1, "2": u2, "R": ur},
    )


def design_tp2(channels: Mapping, streams: int) -> PeriodBeamformers:
    """Second-period design: relay beams to the destination, primaries re-align.

    Needs links (D,R), (1,R), (2,R), (1,2,2), (2,1,2). Returns precoders for
    nodes "1", "2", "R" and combiners for "1", "2" (the destination decodes
    without a combiner).
    """
    inv = np.linalg.inv
    h_dr = np.asarray(channels[("D", "R")])
    h_1r = np.asarray(channels[("1", "R")])
    h_2r = np.asarray(channels[("2", "R")])
    h_12 = np.asarray(channels[("1", "2", 2)])
    h_21 = np.asarray(channels[("2", "1", 2)])

    _, _, vh = np.linalg.svd(h_dr)
    vr = _fix_column_phase(_conj_t(vh[..., : int(streams), :])) / math.sqrt(streams)
    v2 = _unit_power(inv(h_12) @ h_1r @ vr)
    v1 = _unit_power(inv(h_21) @ h_2r @ vr)

    u1 = null_space_basis(_conj_t(h_1r @ vr))
    u2 = null_space_basis(_conj_t(h_2r @ vr))
    return PeriodBeamformers(
        precoders={"1": v1, "2": v2, "R": vr},
        combiners={"1": u1, "2": u2},
    )


def design_beamformers(channels: Mapping, streams: int) -> BeamformerSet:
    """Both transmission periods from one (estimated) channel mapping."""
    return BeamformerSet(design_tp1(channels, streams), design_tp2(channels, streams))


# (key, channel link, interfering precoder node); the receiving combiner is
# implied by the key prefix. ``None`` as the combiner node means "relay" etc.
_TP1_CROSS = (
    ("tp1:p1<-p2", "1", ("1", "2", 1), "2"),
    ("tp1:p1<-src", "1", ("1", "S"), "S"),
    ("tp1:p2<-p1", "2", ("2", "1", 1), "1"),
    ("tp1:p2<-src", "2", ("2", "S"), "S"),
    ("tp1:relay<-p1", "R", ("R", "1"), "1"),
    ("tp1:relay<-p2", "R", ("R", "2"), "2"),
)
_TP2_CROSS = (
    ("tp2:p1<-p2", "1", ("1", "2", 2), "2"),
    ("tp2:p1<-relay", "1", ("1", "R"), "R"),
    ("tp2:p2<-p1", "2", ("2", "1", 2), "1"),
    ("tp2:p2<-relay", "2", ("2", "R"), "R"),
)
# (key, first (link, precoder node), second (link, precoder node)): the two
# interference blocks that must share one subspace at each protected receiver.
_ALIGNED_PAIRS = (
    ("tp1:relay", (("R", "1"), "1"), (("R", "2"), "2")),
    ("tp1:p1", (("1", "2", 1), "2"), (("1", "S"), "S")),
    ("tp1:p2", (("2", "1", 1), "1"), (("2", "S"), "S")),
    ("tp2:p1", (("1", "2", 2), "2"), (("1", "R"), "R")),
    ("tp2:p2", (("2", "1", 2), "1"), (("2", "R"), "R")),
)


def leakage(beamformers: BeamformerSet, channels: Mapping) -> LeakageReport:
    """Residual interference of a design on the given (typically true) channels."""
    products = {}
    relative = {}
    for period, table in ((beamformers.tp1, _TP1_CROSS), (beamformers.tp2, _TP2_CROSS)):
        for key, rx, link, tx in table:
            h = np.asarray(channels[link])
            u = period.combiners[rx]
            v = period.precoders[tx]
            p = _fro2(_conj_t(u) @ h @ v)
            products[key] = p
            relative[key] = p / _fro2(h)

    alignment = {}
    streams = beamformers.tp1.precoders["1"].shape[-1]
    for key, (link_a, tx_a), (link_b, tx_b) in _ALIGNED_PAIRS:
        period = beamformers.tp1 if key.startswith("tp1") else beamformers.tp2
        block_a = np.asarray(channels[link_a]) @ period.precoders[tx_a]
        block_b = np.asarray(channels[link_b]) @ period.precoders[tx_b]
        stacked = np.concatenate(
            (_unit_power(block_a), _unit_power(block_b)), axis=-1
        )
        s = np.linalg.svd(stacked, compute_uv=False)
        alignment[key] = s[..., streams] / s[..., 0]
    return LeakageReport(products, relative, alignment)


# (key, combiner node or None, channel link, precoder node)
_DIRECT = (
    ("tp1:p1", 1, "1", ("1", "1", 1), "1"),
    ("tp1:p2", 1, "2", ("2", "2", 1), "2"),
    ("tp1:relay", 1, "R", ("R", "S"), "S"),
    ("tp2:p1", 2, "1", ("1", "1", 2), "1"),
    ("tp2:p2", 2, "2", ("2", "2", 2), "2"),
    ("tp2:dest", 2, None, ("D", "R"), "R"),
)


def direct_gain(beamformers: BeamformerSet, channels: Mapping) -> dict:
    """Post-processing desired-signal gains ||U^H H V||_F^2 per receiver.

    The destination has no combiner, so its entry is ||H V||_F^2.
    """
    gains = {}
    for key, period_no, rx, link, tx in _DIRECT:
        period = beamformers.tp1 if period_no == 1 else beamformers.tp2
        h = np.asarray(channels[link])
        v = period.precoders[tx]
        if rx is None:
            gains[key] = _fro2(h @ v)
        else:
            gains[key] = _fro2(_conj_t(period.combiners[rx]) @ h @ v)
    return gains
