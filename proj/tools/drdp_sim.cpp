// Copyright 2026 The DRDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "drdp/config.hpp"
#include "drdp/execute.hpp"

int main(int argc, char** argv) {
  drdp::ParsedConfig parsed;
  try {
    parsed = drdp::parse_config(argc, argv);
  } catch (const drdp::HelpRequested& help) {
    std::cout << help.what();
    return drdp::kExitOk;
  } catch (const drdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return drdp::kExitConfigError;
  }
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  return drdp::execute(parsed.config, std::cout, std::cerr);
}
