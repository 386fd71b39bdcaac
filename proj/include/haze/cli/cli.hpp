//*****************************************************************************
// Copyright 2026 The haze-restore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//*****************************************************************************

#pragma once

#include <string>
#include <vector>

namespace haze::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,      // runtime failure, or a grid with failed cells
    kBadInput = 2,     // unreadable input or invalid usage
    kBadCheckpoint = 3,  // corrupt checkpoint or config mismatch
};

/// Entry point of the `hazerestore` tool; `args` excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace haze::cli
