#include "sscosamp/types.hpp"

#include <algorithm>
#include <sstream>

namespace sscosamp {

SupportSet::SupportSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.front() < 0)
    throw InvalidInput("SupportSet: negative index");
}

bool SupportSet::contains(Index j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

SupportSet set_union(const SupportSet& a, const SupportSet& b) {
  SupportSet out;
  std::set_union(a.indices_.begin(), a.indices_.end(), b.indices_.begin(),
                 b.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

std::string SupportSet::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) os << ';';
    os << indices_[i];
  }
  return os.str();
}

}  // namespace sscosamp
