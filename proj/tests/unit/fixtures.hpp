#pragma once

#include <string>

#include "qcoef/ifs.hpp"
#include "qcoef/system_io.hpp"

namespace fixtures {

inline qcoef::InfiniteIFS builtin(const std::string& name) {
  return qcoef::InfiniteIFS(qcoef::builtin_system(name));
}

/// Two maps x/3 and x/9 + 8/9 with probabilities 1/2, 1/2.
inline qcoef::SystemDescription two_map_description() {
  qcoef::SystemDescription d;
  d.id = "two-map";
  d.domain = qcoef::Domain::interval(0.0, 1.0);
  d.map_prefix = {{1.0 / 3.0, qcoef::Mat2::identity(), {0.0, 0.0}},
                  {1.0 / 9.0, qcoef::Mat2::identity(), {8.0 / 9.0, 0.0}}};
  d.prob_prefix = {0.5, 0.5};
  return d;
}

/// s_j = 2^{-j}, p_j = 2^{-j} with images [2^{-j}, 2^{-j} + 2^{-j-1}]:
/// separated, so the same thermodynamics as the dyadic family is usable
/// with the sampler.
inline qcoef::SystemDescription half_offset_description() {
  qcoef::SystemDescription d;
  d.id = "half-offset";
  d.domain = qcoef::Domain::interval(0.0, 1.0);
  d.map_tail = {qcoef::TailKind::geometric, 1.0, 0.5, 2.0};
  d.prob_tail = {qcoef::TailKind::geometric, 1.0, 0.5, 2.0};
  d.placement.rule = qcoef::Placement::Rule::offset_accumulate;
  d.placement.offset = 1.0;
  d.thermodynamics_only = true;
  return d;
}

}  // namespace fixtures
