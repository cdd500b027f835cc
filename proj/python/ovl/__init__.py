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

"""Python access to the ovl diffusion toolkit."""

from ._ovl import (  # noqa: F401
    ConfigError,
    InvalidArgument,
    NumericError,
    Schedule,
    ancestral_sample_oracle,
    f_beta,
    frechet_distance,
    gmm_dataset,
    interval_split,
    knn_precision_recall,
    linear_probe,
    linear_schedule,
    longtail_counts,
    overlap_rate,
    prd_f_beta,
    q_sample,
    run,
    scaled_linear_schedule,
    tau_at,
    toy_landscape,
)

__version__ = "0.1.0"
