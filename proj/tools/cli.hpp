#pragma once

#include <ostream>

namespace dramforge::cli {

/// Exit codes of the command-line tool.
enum Exit : int { ok = 0, config_error = 2, runtime_error = 3, resume_refused = 4 };

/// Entry point of `dramforge run|postproc`; callable from tests.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dramforge::cli
