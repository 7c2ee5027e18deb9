# SPDX-License-Identifier: Apache-2.0
#
# cfad - grant-free activity detection for cell-free massive MIMO
# Copyright (C) 2026 The cfad authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Activity detection in cell-free massive MIMO."""

from ._core import (
    Config,
    ConfigError,
    calibrate,
    generate,
    quantize,
    roc,
    run,
    select_clusters,
)

__all__ = ["Config", "ConfigError", "calibrate", "generate", "quantize", "roc", "run", "select_clusters"]
