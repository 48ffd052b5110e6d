/* Copyright 2026 The melforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MELFORGE_TOOLS_COMMANDS_H_
#define MELFORGE_TOOLS_COMMANDS_H_

#include <iosfwd>

namespace melforge::cli {

// Entry point for "melforge <synth|extract|preview|train|eval|params>".
// Returns the process exit code; errors are reported on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace melforge::cli

#endif  // MELFORGE_TOOLS_COMMANDS_H_
