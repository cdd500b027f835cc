# Copyright 2026 The ovl Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import ovl


def test_schedule_endpoints():
    s = ovl.linear_schedule(1e-4, 0.02, 1000)
    assert s.steps == 1000
    assert s.betas[0] == pytest.approx(1e-4)
    assert s.betas[-1] == pytest.approx(0.02)
    assert np.all(np.diff(s.alpha_bars) < 0)
    with pytest.raises(ovl.InvalidArgument):
        ovl.linear_schedule(0.0, 0.02, 10)


def test_tau_decay():
    assert ovl.tau_at(2.0, 10.0, 10.0) == pytest.approx(2.0 * math.exp(-1.0))


def test_dataset_and_metrics():
    assert ovl.longtail_counts(10, 5000, 0.01)[-1] == 50
    x, y = ovl.gmm_dataset([[0.0, 0.0], [4.0, 0.0]], [200, 20], seed=3)
    assert x.shape == (220, 2)
    assert (y == 1).sum() == 20
    assert ovl.frechet_distance(x, x) == pytest.approx(0.0, abs=1e-9)
    assert ovl.knn_precision_recall(x, x, 5) == (1.0, 1.0)
    assert ovl.f_beta(0.8, 0.4, 8.0) == pytest.approx(0.4031, abs=1e-4)
    assert ovl.interval_split(list(range(100, 90, -1))).count("med") == 4


def test_oracle_sampler():
    s = ovl.scaled_linear_schedule(100)
    pts = ovl.ancestral_sample_oracle([2.0, 0.0], 1.0, s, 4000, seed=1)
    assert np.allclose(pts.mean(axis=0), [2.0, 0.0], atol=0.08)
    assert np.allclose(pts.var(axis=0, ddof=1), [1.0, 1.0], atol=0.1)


def test_toy_landscape():
    axis, loss, argmin = ovl.toy_landscape("fit")
    assert loss.shape == (81, 81)
    assert argmin == (0.0, 2.0)
    _, _, naive = ovl.toy_landscape("naive", tau=0.5)
    assert naive == (-1.0, 3.0)


def test_cli_roundtrip(tmp_path):
    code, out, _ = ovl.run(["landscape", "--run.out_dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "landscape_summary.csv").exists()
    code, _, err = ovl.run(["train", "-c", str(tmp_path / "missing.ini")])
    assert code == 2
    assert "missing.ini" in err
