# Copyright 2026 The revcorr Authors.
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

"""Reverse-correlation toolkit for phoneme-in-noise experiments."""

from ._revcorr import (
    Aci,
    NoiseKind,
    PyramidBasis,
    chance_boundary,
    default_config_ini,
    delta_pa,
    fit_aci,
    generate_noise,
    level_db,
    load_aci,
    signal_detection,
    staircase_equilibrium,
    tf_band_centers,
    tf_representation,
)

__all__ = [
    "Aci",
    "NoiseKind",
    "PyramidBasis",
    "chance_boundary",
    "default_config_ini",
    "delta_pa",
    "fit_aci",
    "generate_noise",
    "level_db",
    "load_aci",
    "signal_detection",
    "staircase_equilibrium",
    "tf_band_centers",
    "tf_representation",
]
