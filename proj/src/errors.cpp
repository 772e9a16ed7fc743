#include "defidx/errors.hpp"

#include <sstream>

namespace defidx {

namespace {
std::string describe(const std::string& what, const std::vector<Index>& vs) {
  std::ostringstream os;
  os << what << " (vertices:";
  const std::size_t shown = std::min<std::size_t>(vs.size(), 16);
  for (std::size_t i = 0; i < shown; ++i) os << ' ' << vs[i];
  if (shown < vs.size()) os << " ... " << vs.size() - shown << " more";
  os << ')';
  return os.str();
}
}  // namespace

TruncationError::TruncationError(const std::string& what, std::vector<Index> vertices)
    : Error(describe(what, vertices)), vertices_(std::move(vertices)) {}

}  // namespace defidx
