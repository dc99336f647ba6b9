#include <vector>

#include "mgrel/engine.hpp"

namespace mgrel {

std::string_view to_string(DispatchPolicy policy) noexcept {
  switch (policy) {
    case DispatchPolicy::serve_if_fits: return "serve_if_fits";
    case DispatchPolicy::blocking: return "blocking";
  }
  return "unknown";
}

std::size_t dispatch_levels(double total_res_kw, std::span<const double> levels, DispatchPolicy policy,
                            std::span<std::uint8_t> supplied) noexcept {
  double remaining = total_res_kw;
  std::size_t served = 0;
  std::size_t i = 0;
  for (; i < levels.size(); ++i) {
    if (levels[i] <= remaining) {
      remaining -= levels[i];
      supplied[i] = 1;
      ++served;
    } else {
      supplied[i] = 0;
      if (policy == DispatchPolicy::blocking) {
        ++i;
        break;
      }
    }
  }
  for (; i < levels.size(); ++i) supplied[i] = 0;
  return served;
}

std::vector<std::string> priority_dispatch(double total_res_kw, std::span<const PriorityLoad> loads,
                                           DispatchPolicy policy) {
  std::vector<double> levels;
  levels.reserve(loads.size());
  for (const auto& l : loads) levels.push_back(l.level_kw);
  std::vector<std::uint8_t> supplied(loads.size(), 0);
  dispatch_levels(total_res_kw, levels, policy, supplied);

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (supplied[i]) ids.push_back(loads[i].id);
  }
  return ids;
}

}  // namespace mgrel
