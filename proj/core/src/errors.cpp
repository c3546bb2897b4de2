#include "clustergen/errors.hpp"

#include <sstream>

namespace clustergen {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "validation failed";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i == 0 ? ": " : "; ") << v[i];
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

NonConvergenceError::NonConvergenceError(double final_loss, std::vector<double> trace)
    : Error("overlap loss did not vanish after " + std::to_string(trace.empty() ? 0 : trace.size() - 1) +
            " epochs (final loss " + std::to_string(final_loss) + ")"),
      final_loss_(final_loss),
      trace_(std::move(trace)) {}

}  // namespace clustergen
