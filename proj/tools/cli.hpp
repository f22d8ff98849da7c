/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dial {

/// Runs the dialsim command line.  Returns 0 on success, 1 on a runtime
/// error and 2 on a usage error; errors go to `err` as one JSON line.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dial
