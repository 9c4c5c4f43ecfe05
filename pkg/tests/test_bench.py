import csv
import io
import json

import numpy as np
import pytest

from topomix import Grid
from topomix.bench import FkmSpec, evaluate_recovery, fkm_density, sample_fkm, stats_to_csv, true_ucat
from topomix.errors import InvalidParameterError


class TestFkmSpec:
    def test_single(self):
        s = FkmSpec(1, 1)
        np.testing.assert_allclose(s.means, [0.5])
        assert s.sigma == 1 / 32

    def test_three_six(self):
        s = FkmSpec(3, 6)
        assert s.means.size == 6
        assert s.sigma == pytest.approx(2.0**-5 / 49)

    @pytest.mark.parametrize("k, m", [(0, 1), (4, 1), (1, 0), (1, 11), (1.5, 2)])
    def test_invalid(self, k, m):
        with pytest.raises(InvalidParameterError):
            FkmSpec(k, m)


class TestSampling:
    def test_deterministic(self):
        s = FkmSpec(2, 3)
        assert np.array_equal(sample_fkm(s, 50, 7), sample_fkm(s, 50, 7))
        assert not np.array_equal(sample_fkm(s, 50, 7), sample_fkm(s, 50, 8))

    def test_bad_n(self):
        with pytest.raises(InvalidParameterError):
            sample_fkm(FkmSpec(1, 1), 0, 0)

    def test_density_is_normalized(self):
        f = fkm_density(FkmSpec(2, 4), Grid.from_span(-0.5, 1.5, 2000))
        assert f.mass == pytest.approx(1.0)

    @pytest.mark.parametrize("m", [1, 2, 5, 10])
    def test_true_ucat_k3(self, m):
        assert true_ucat(FkmSpec(3, m)) == m


class TestRecovery:
    def test_small_run(self):
        stats = evaluate_recovery(FkmSpec(3, 2), n=200, trials=3, seed=11)
        assert stats.trials == 3
        assert sum(stats.ucat_distribution.values()) == 3
        assert sum(stats.lmax_distribution.values()) == 3
        assert 0 <= stats.hit_rate <= 1
        d = json.loads(stats.to_json())
        assert d["true_ucat"] == 2

    def test_threads_do_not_change_results(self):
        a = evaluate_recovery(FkmSpec(3, 1), n=100, trials=3, seed=1)
        b = evaluate_recovery(FkmSpec(3, 1), n=100, trials=3, seed=1, threads=3)
        assert a == b

    def test_csv(self):
        stats = evaluate_recovery(FkmSpec(3, 1), n=100, trials=2, seed=0)
        rows = list(csv.DictReader(io.StringIO(stats_to_csv([stats]))))
        assert {r["kind"] for r in rows} == {"ucat", "lmax"}
        assert sum(int(r["count"]) for r in rows if r["kind"] == "ucat") == 2
