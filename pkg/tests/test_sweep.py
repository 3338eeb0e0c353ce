import math
import warnings

import numpy as np
import pytest

from ia_swipt.channel import CsiScenario
from ia_swipt.sweep import (
    COARSE_FRACTIONS,
    SweepSpec,
    golden_section_max,
    is_unimodal,
    optimize_fraction,
    sweep,
)

PERFECT = CsiScenario.perfect()


def test_spec_validation():
    SweepSpec("tsr", (0.0, 10.0), (0.3,), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("fdx", (0.0,), (0.3,), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (), (0.3,), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (0.0,), (), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (0.0,), (0.0,), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (0.0,), (1.0,), PERFECT, 100, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (0.0,), (0.3,), PERFECT, 0, 1)
    with pytest.raises(ValueError):
        SweepSpec("tsr", (0.0,), (0.3,), PERFECT, 100, -1)


def test_sweep_grid_order_and_fields():
    spec = SweepSpec("psr", (0.0, 10.0), (0.4, 0.6), PERFECT, 80, 3)
    rows = sweep(spec)
    assert [(r.snr_db, r.rho) for r in rows] == [
        (0.0, 0.4),
        (0.0, 0.6),
        (10.0, 0.4),
        (10.0, 0.6),
    ]
    for row in rows:
        assert row.protocol == "psr"
        assert row.alpha is None
        assert row.kappa is None and row.psi is None
        assert row.trials == 80 and row.seed == 3
        assert row.c_d_stderr > 0
    single = sweep(SweepSpec("tsr", (20.0,), (0.3,), PERFECT, 50, 3))
    assert len(single) == 1
    assert single[0].alpha == 0.3 and single[0].rho is None


def test_sweep_is_deterministic_and_crn_coherent():
    spec = SweepSpec("tsr", (10.0,), (0.25,), PERFECT, 300, 7)
    a = sweep(spec)
    b = sweep(spec)
    assert a == b
    # the same grid point inside a larger sweep gives identical numbers
    big = sweep(SweepSpec("tsr", (0.0, 10.0), (0.25,), PERFECT, 300, 7))
    assert big[1] == a[0]


def test_sweep_reports_scenario_and_stats():
    scen = CsiScenario.mismatch(1.5, 15.0)
    stats = {}
    rows = sweep(SweepSpec("psr", (10.0,), (0.5,), scen, 60, 1), stats=stats)
    assert rows[0].kappa == 1.5 and rows[0].psi == 15.0
    assert stats["resamples"] >= 0


def test_golden_section_stub_objective():
    calls = []

    def f(x):
        calls.append(x)
        return -((x - 0.3) ** 2)

    x, fx, iterations = golden_section_max(f, 0.01, 0.99, 1e-3)
    assert abs(x - 0.3) <= 1e-3
    assert fx == pytest.approx(0.0, abs=1e-6)
    bound = math.ceil(math.log((0.99 - 0.01) / 1e-3) / math.log((1 + math.sqrt(5)) / 2))
    assert iterations <= bound
    assert len(calls) == iterations + 2  # two seed probes, one new probe per step


def test_golden_section_validation_and_tiny_interval():
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 0.5, 0.4, 1e-3)
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 0.0, 1.0, 0.0)
    x, fx, iterations = golden_section_max(lambda x: -x * x, 0.1, 0.1005, 1e-3)
    assert iterations == 0
    assert abs(x - 0.10025) < 1e-9


def test_is_unimodal():
    assert is_unimodal([0.1, 0.5, 0.9, 0.7, 0.2])
    assert is_unimodal([1.0, 0.8, 0.5])  # peak at the edge is fine
    assert not is_unimodal([0.1, 0.9, 0.2, 0.8, 0.1])
    # noise slack rescues small dips
    assert is_unimodal([0.1, 0.9, 0.2, 0.8, 0.1], stderrs=[0.3] * 5)
    with pytest.raises(ValueError):
        is_unimodal([])


def test_optimize_fraction_with_stub_objective():
    res = optimize_fraction(
        "tsr", 20.0, PERFECT, 10, 0, tolerance=1e-4, objective=lambda x: -((x - 0.3) ** 2)
    )
    assert abs(res.fraction - 0.3) <= 1e-4
    assert res.unimodal
    assert res.capacity == pytest.approx(0.0, abs=1e-7)
    assert res.coarse_fractions == COARSE_FRACTIONS
    assert len(res.coarse_means) == 19
    assert res.protocol == "tsr" and res.snr_db == 20.0


def test_optimize_fraction_warns_on_multimodal_objective():
    def two_peaks(x):
        return max(-((x - 0.2) ** 2), -((x - 0.8) ** 2) + 0.01)

    with pytest.warns(RuntimeWarning, match="not unimodal"):
        res = optimize_fraction(
            "psr", 20.0, PERFECT, 10, 0, tolerance=1e-3, objective=two_peaks
        )
    assert not res.unimodal
    assert abs(res.fraction - 0.8) <= 1e-3  # still refines the global peak


def test_optimize_fraction_boundary_peak_stays_inside():
    res = optimize_fraction(
        "psr", 20.0, PERFECT, 10, 0, tolerance=1e-3, objective=lambda x: x
    )
    assert 0.95 <= res.fraction <= 0.99


def test_optimize_fraction_simulation_smoke():
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)  # profile must be unimodal
        res = optimize_fraction("psr", 20.0, PERFECT, 400, 21, tolerance=5e-3)
    assert 0.0 < res.fraction < 1.0
    assert res.capacity > 0.0
    assert res.capacity >= max(res.coarse_means) - 1e-12
    assert res.trials == 400 and res.seed == 21
    assert len(res.coarse_stderrs) == 19 and all(e > 0 for e in res.coarse_stderrs)


def test_optimize_fraction_validation():
    with pytest.raises(ValueError):
        optimize_fraction("abc", 20.0, PERFECT, 10, 0)
    with pytest.raises(ValueError):
        optimize_fraction("tsr", 20.0, PERFECT, 10, 0, tolerance=-1.0)
