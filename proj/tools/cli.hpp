#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "littag/timestamp.hpp"

namespace littag::cli {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2 };

struct Environment {
  // Stamps output filenames and reports. Defaults to LITTAG_FIXED_TIME
  // ("YYYYMMDDTHHMMSSZ") when set, else the system clock.
  Clock clock;
  // Fallback for `serve --bind`.
  std::string bind;
};

Environment environment_from_process();

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env);

}  // namespace littag::cli
