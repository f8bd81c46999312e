import math

import numpy as np
import pytest

from pacstack.code import PacCodeSpec, calculate_s_values, chunk_segmentation
from pacstack.decoders import DecodeOptions
from pacstack.simulate import (CSV_HEADER, PointReport, SweepConfig, _stop_index, awgn_transmit,
                               ebn0_to_sigma, run_fer, run_point, write_csv)


@pytest.mark.parametrize("ebn0,rate,sigma", [(0.0, 1.0, 0.70711), (0.0, 0.5, 1.0),
                                             (7.0, 57 / 64, 0.334686)])
def test_ebn0_to_sigma(ebn0, rate, sigma):
    assert ebn0_to_sigma(ebn0, rate) == pytest.approx(sigma, abs=1e-5)


def test_bad_rate():
    with pytest.raises(ValueError):
        ebn0_to_sigma(1.0, 0.0)


class TestAwgn:
    def test_deterministic(self):
        x = np.array([0, 1, 1, 0])
        a = awgn_transmit(x, 0.8, np.random.default_rng([3, 9]))
        b = awgn_transmit(x, 0.8, np.random.default_rng([3, 9]))
        assert np.array_equal(a, b)

    def test_llr_statistics(self):
        sigma, count = 0.9, 200_000
        llr = awgn_transmit(np.zeros(count, dtype=np.uint8), sigma, np.random.default_rng(0))
        mean = 2 / sigma ** 2
        se = 2 / sigma / math.sqrt(count)
        assert abs(llr.mean() - mean) < 3 * se
        assert llr.std() == pytest.approx(2 / sigma, rel=0.01)

    def test_validation(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            awgn_transmit([0, 2], 1.0, rng)
        with pytest.raises(ValueError):
            awgn_transmit([0, 1], 0.0, rng)


def config(**kw):
    base = dict(spec=PacCodeSpec.reed_muller(6, 57), ebn0_db=[3.0], min_errors=5, max_frames=400,
                options=DecodeOptions(16, 256))
    base.update(kw)
    return SweepConfig(**base)


class TestSweep:
    def test_high_snr_is_clean(self):
        spec = PacCodeSpec.reed_muller(6, 57)
        chunks = len(chunk_segmentation(calculate_s_values(spec.rate_profile)))
        (rep,) = run_fer(config(ebn0_db=[14.0], max_frames=200))
        assert rep.frames == 200 and rep.frame_errors == 0 and rep.fer == 0.0
        assert rep.avg_cycles == chunks and rep.avg_stack_used >= 1

    def test_all_frozen(self):
        spec = PacCodeSpec(4, np.zeros(16, dtype=np.uint8))
        (rep,) = run_fer(config(spec=spec, ebn0_db=[0.0], max_frames=50))
        # the descent starts one stage below the root, so two half-length chunks
        assert rep.fer == 0.0 and rep.avg_cycles == 2 and rep.avg_stack_used == 1

    def test_workers_do_not_change_results(self):
        one = run_fer(config(ebn0_db=[2.0, 3.0], max_frames=300, workers=1))
        two = run_fer(config(ebn0_db=[2.0, 3.0], max_frames=300, workers=2))
        assert write_csv(one) == write_csv(two)

    @pytest.mark.parametrize("variant", ["stack", "pstackd_var", "fast"])
    def test_engines_agree(self, variant):
        a = run_fer(config(variant=variant, max_frames=60, engine="compiled"))
        b = run_fer(config(variant=variant, max_frames=60, engine="python"))
        assert a == b

    def test_counters(self):
        rep = run_point(config(ebn0_db=[1.0], min_errors=10, max_frames=2000), 0)
        assert rep.frame_errors == 10 and rep.fer == pytest.approx(10 / rep.frames)
        assert 1 <= rep.avg_stack_used <= 16 and rep.avg_cycles <= 256
        assert rep.avg_total_insertions >= rep.avg_cycles
        assert rep.avg_fg_ops >= rep.avg_cycles

    def test_min_frames_respected(self):
        rep = run_point(config(ebn0_db=[0.0], min_errors=1, min_frames=37), 0)
        assert rep.frames == 37

    def test_all_zero_mode(self):
        (rep,) = run_fer(config(ebn0_db=[14.0], max_frames=20, all_zero=True))
        assert rep.fer == 0.0

    def test_pruning_variant_differs_from_stack(self):
        a = run_fer(config(variant="stack", ebn0_db=[1.0], max_frames=100, min_errors=1000))
        b = run_fer(config(variant="pstackd_var", ebn0_db=[1.0], max_frames=100, min_errors=1000,
                           p_th=0.1))
        assert b[0].avg_total_insertions < a[0].avg_total_insertions


class TestStopRule:
    def test_stop_index(self):
        cfg = config(min_frames=3, min_errors=2, max_frames=10)
        assert _stop_index([1, 2, 2, 2], 0, cfg) == 3
        assert _stop_index([0, 0], 0, cfg) is None
        assert _stop_index([0, 0], 8, cfg) == 10
        assert _stop_index([0, 2], 5, cfg) == 7


class TestValidation:
    @pytest.mark.parametrize("kw", [dict(ebn0_db=[]), dict(variant="viterbi"), dict(engine="gpu"),
                                    dict(min_frames=0), dict(max_frames=0), dict(min_errors=0),
                                    dict(workers=0), dict(ebn0_db=[1, 2, 3], p_th=[1e-2, 1e-3])])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            config(**kw)

    def test_broadcast_pth(self):
        assert config(ebn0_db=[1, 2], p_th=0.01).p_th == [0.01, 0.01]


def test_csv_format():
    rep = PointReport(1.0, 10, 1, 0.1, 5.0, 3.0, 8.0, 6.0)
    text = write_csv([rep])
    assert text.splitlines() == [CSV_HEADER, "1.0000,10,1,1.000000e-01,5.000000,3.000000,8.000000,6.000000"]
