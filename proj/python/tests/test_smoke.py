import json
import math

import pytest

import swfb

LOG2_3 = math.log2(3)


def test_adder_capacity():
    r = swfb.max_joint_mi(swfb.binary_adder())
    assert r.value == pytest.approx(LOG2_3, abs=1e-6)
    assert r.gap_bound <= 1e-6
    assert sum(r.argmax) == pytest.approx(1.0, abs=1e-12)


def test_threshold_and_region():
    ch = swfb.binary_adder()
    assert swfb.theorem1_threshold(ch) == pytest.approx(0.5794, abs=1e-3)
    region, report = swfb.theorem1_region(ch, 0.5)
    assert report.holds
    assert region.sum_rate() == pytest.approx(0.5 * LOG2_3, abs=1e-6)
    outer = swfb.prop1_outer(ch, swfb.FeedforwardProfile.constant(0.5))
    for r1, r2 in region.frontier:
        assert outer.contains(r1, r2)


def test_channel_json_round_trip():
    ch = swfb.example2(2)
    assert swfb.MacChannel.from_json(ch.to_json()) == ch
    doc = json.loads(ch.to_json())
    assert doc["x1_size"] == 8


def test_errors_map_to_python():
    with pytest.raises(swfb.ValidationError):
        swfb.MacChannel(2, 2, 2, [0.5] * 7)
    with pytest.raises(ValueError):
        swfb.MacChannel.from_json("{not json")
    cfg = swfb.SchemeConfig()
    cfg.R1 = 40.0
    cfg.n = 120
    with pytest.raises(swfb.ResourceError):
        swfb.run_block_markov(cfg, 1)


def test_simulation_runs_and_is_deterministic():
    cfg = swfb.SchemeConfig()
    cfg.channel = swfb.first_input_identity()
    cfg.p = 1.0
    cfg.n = 32
    cfg.B = 2
    cfg.R1 = 0.25
    a = swfb.run_block_markov(cfg, 20)
    b = swfb.run_block_markov(cfg, 20)
    assert a.trials == 20
    assert (a.errors, a.stage1_errors) == (b.errors, b.stage1_errors)
    assert 0.0 <= a.ci_low <= a.error_rate <= a.ci_high <= 1.0


def test_clopper_pearson_edges():
    lo, hi = swfb.clopper_pearson(0, 10)
    assert lo == 0.0
    assert hi == pytest.approx(1 - 0.025 ** (1 / 10), abs=1e-9)
