#pragma once

#include <string_view>

#include "erlab/model.hpp"

namespace erlab {

/// Lab axis that carries one-dimensional (line) results.
inline constexpr std::size_t kLineAxis = 2;

enum class Method { analytic, oracle, grid };

std::string_view to_string(Method m);
/// Throws InvalidParameter("method", ...) for unknown names.
Method parse_method(std::string_view name);

/// Mean position and per-axis variance at one time, tagged by how they were
/// obtained. In one-dimensional runs only index 2 is meaningful.
struct MomentSet {
  double time = 0.0;
  Vec3 mean_position{};
  Vec3 sigma_sq{};
  Method method = Method::analytic;
  int dimension = 3;
};

}  // namespace erlab
