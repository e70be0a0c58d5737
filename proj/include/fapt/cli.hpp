// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FAPT_CLI_HPP
#define FAPT_CLI_HPP

#include <string>
#include <vector>

namespace fapt
{
    // Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
    int cli_main(int argc, char** argv);

    // In-process variant used by tests; args exclude the program name.
    int cli_run(const std::vector<std::string>& args);

} // namespace fapt

#endif
