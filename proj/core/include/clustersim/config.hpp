/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Flat `key = value` configuration for the cluster model and trace costs.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clustersim/kernels.hpp"
#include "clustersim/machine.hpp"

namespace clustersim {

struct SimConfig {
  machine::ClusterConfig cluster;
  kernels::TraceCosts costs;

  void validate() const {
    cluster.validate();
    costs.validate();
  }
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Sets one field by name. Cost keys carry a `cost.` prefix. Throws
/// ConfigError for unknown keys and malformed values.
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);

/// Lines of `key = value`; blank lines and `#` comments are ignored.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});

/// Every field with its current value, in a fixed order.
KeyValues materialize(const SimConfig& cfg);

}  // namespace clustersim
