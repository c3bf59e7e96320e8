#pragma once

#include <stdexcept>
#include <string>

#include <subdiff/study.hpp>

namespace subdiff {

// Any malformed, unknown, or inconsistent configuration input. Mapped to
// exit code 2 by the CLI.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveConfig {
  ProblemSpec problem;
  SchemeSpec scheme;
  int N = 0;
  std::string echo;  // canonical JSON echo of the parsed document
};

// Strict JSON parsers: unknown fields are rejected at every nesting level.
SolveConfig parse_solve_config(const std::string& path);
StudySpec parse_study_config(const std::string& path);

}  // namespace subdiff
