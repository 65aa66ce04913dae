// Copyright 2026 The BeamFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BEAMFUSION_COMMANDS_H_
#define BEAMFUSION_COMMANDS_H_

#include <ostream>

namespace beamfusion {

// Command-line entry point shared by the executable and the tests. Returns
// the process exit code: 0 on success, 1 on a domain or I/O error (after
// removing any partially written output), CLI11's code on a usage error.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beamfusion

#endif  // BEAMFUSION_COMMANDS_H_
