import math

import pytest
from pydantic import ValidationError

from campaign import batch_plan, build_code, channel_snr, run_campaign, simulate_frame, build_decoder
from polar_core import ConstructionTag, eb_to_es_db
from schemas import BlerPoint, CampaignConfig, SnrConvention


def small_config(**overrides):
    data = {
        "code": {"n": 64, "k": 16, "crc_len": 6},
        "decoder": {"kind": "scl", "list_size": 4},
        "channel": {"snr_points_db": [-4.0, -2.0]},
        "stopping": {"min_block_errors": 5, "max_frames": 64, "batch_size": 16},
        "seed": 3,
    }
    for key, value in overrides.items():
        if isinstance(value, dict):
            data.setdefault(key, {}).update(value)
        else:
            data[key] = value
    return CampaignConfig(**data)


def counts(points):
    return [(p.snr_db, p.frames, p.block_errors) for p in points]


def test_batch_plan():
    assert list(batch_plan(10, 4)) == [(0, 4), (4, 4), (8, 2)]


def test_campaign_is_deterministic():
    config = small_config()
    assert counts(run_campaign(config)) == counts(run_campaign(config))


def test_campaign_does_not_depend_on_worker_count():
    serial = run_campaign(small_config(workers=1))
    parallel = run_campaign(small_config(workers=2))
    assert counts(serial) == counts(parallel)


def test_high_error_floor_runs_to_max_frames():
    config = small_config(channel={"snr_points_db": [-6.0]}, stopping={"min_block_errors": 1000, "max_frames": 48})
    (point,) = run_campaign(config)
    assert point.frames == 48
    assert 0 < point.block_errors <= 48


def test_stopping_rule_ends_on_batch_boundary():
    config = small_config(channel={"snr_points_db": [-20.0]},
                          stopping={"min_block_errors": 10, "max_frames": 1000, "batch_size": 4})
    (point,) = run_campaign(config)
    assert point.frames == 12
    assert point.block_errors >= 10
    assert point.bler == point.block_errors / point.frames


def test_noiseless_point_has_no_errors():
    config = small_config(channel={"snr_points_db": [math.inf]}, stopping={"max_frames": 32})
    (point,) = run_campaign(config)
    assert point.frames == 32
    assert point.block_errors == 0
    assert point.bler == 0.0


def test_fsl_campaign_runs():
    config = small_config(decoder={"kind": "fsl", "list_size": 8, "block_len": 8},
                          channel={"snr_points_db": [math.inf]}, stopping={"max_frames": 16})
    (point,) = run_campaign(config)
    assert point.block_errors == 0


def test_hybrid_campaign_uses_the_hybrid_encoder():
    config = small_config(code={"n": 64, "k": 16, "crc_len": 6, "construction": "hybrid"},
                          decoder={"kind": "fsl", "list_size": 8},
                          channel={"snr_points_db": [math.inf]}, stopping={"max_frames": 8})
    assert build_code(config).construction_tag == ConstructionTag.hybrid
    (point,) = run_campaign(config)
    assert point.block_errors == 0


def test_single_frame_is_reproducible():
    config = small_config()
    spec = build_code(config)
    decoder = build_decoder(spec, config)
    first = [simulate_frame(spec, decoder, 0.0, 9, 0, f) for f in range(10)]
    assert first == [simulate_frame(spec, decoder, 0.0, 9, 0, f) for f in range(10)]


def test_eb_convention_converts_to_es():
    config = small_config(channel={"snr_points_db": [2.0], "convention": "eb"})
    spec = build_code(config)
    assert channel_snr(2.0, spec, SnrConvention.eb) == pytest.approx(eb_to_es_db(2.0, 0.25))
    assert channel_snr(2.0, spec, SnrConvention.es) == 2.0
    assert channel_snr(math.inf, spec, SnrConvention.eb) == math.inf


def test_config_validation():
    with pytest.raises(ValidationError):
        small_config(channel={"snr_points_db": [2.0, 1.0]})
    with pytest.raises(ValidationError):
        small_config(channel={"snr_points_db": []})
    with pytest.raises(ValidationError):
        small_config(code={"construction": "adjusted"})
    with pytest.raises(ValidationError):
        small_config(seed=-1)
    with pytest.raises(ValidationError):
        BlerPoint(snr_db=1.0, frames=3, block_errors=4, bler=1.0)


def test_fsl_budgets_follow_block_size_preset():
    params = small_config(decoder={"kind": "fsl", "block_len": 8}).decoder.fsl_params()
    assert (params.flip_budget, params.patterns_per_syndrome) == (2, 4)
    params = small_config(decoder={"kind": "fsl", "flip_budget": 2}).decoder.fsl_params()
    assert (params.flip_budget, params.patterns_per_syndrome) == (2, 8)


def test_bler_decreases_along_the_sweep():
    config = small_config(channel={"snr_points_db": [-4.0, -1.0, 2.0]},
                          stopping={"min_block_errors": 1000, "max_frames": 400, "batch_size": 100})
    blers = [p.bler for p in run_campaign(config)]
    assert blers[0] > 0
    assert blers == sorted(blers, reverse=True)
