#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsepc/linalg.hpp"

namespace sparsepc::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kAlgorithmError = 3,
  kGridFailure = 4,
};

/// Seed used when --seed is not given.
inline constexpr unsigned long long kDefaultSeed = 20200601ULL;

/// Malformed input; `line` and `column` are 1-based (0 when unknown).
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Numeric CSV to matrix. A first line with any non-numeric cell is taken
/// as a header. Blank lines are skipped.
Matrix parse_matrix_csv(const std::string& text);
Matrix read_matrix_csv(const std::string& path);

/// Shortest text that parses back to exactly `x` (at most 17 significant
/// digits). NaN renders as "nan".
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& contents);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsepc::cli
