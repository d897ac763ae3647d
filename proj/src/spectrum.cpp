#include "homogeig/spectrum.hpp"

#include <sstream>

namespace homogeig {

bool Spectrum::has_flag(int k, const std::string& flag) const {
  if (k < 0 || k >= static_cast<int>(flags.size())) return false;
  std::istringstream in(flags[k]);
  std::string item;
  while (std::getline(in, item, ','))
    if (item == flag) return true;
  return false;
}

void Spectrum::add_flag(int k, const std::string& flag) {
  if (k < 0) return;
  if (static_cast<int>(flags.size()) <= k) flags.resize(k + 1);
  if (has_flag(k, flag)) return;
  if (!flags[k].empty()) flags[k] += ',';
  flags[k] += flag;
}

}  // namespace homogeig
