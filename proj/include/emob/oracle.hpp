#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "emob/graph.hpp"
#include "emob/itinerary.hpp"

namespace emob {

class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleLimits {
  int max_nodes = 12;
  int max_path_len = 64;              // moves per itinerary, checked up front
  std::int64_t max_states = 50000000;  // move expansions before refusal
};

// Ground truth by exhaustive search: every walk that never repeats a
// (node, mode) state, with switches and rides applied exactly as the cost
// model defines them. With positive costs a repeat could only pay off by
// looping through a hub to refresh the battery, which takes three switches,
// so nothing is lost under small switch budgets. Throws TooLargeError
// instead of truncating.
std::optional<Itinerary> enumerate_optimal(const MultiModalGraph& g,
                                           const HubRegistry& hubs, const Query& q,
                                           const OracleLimits& limits = {});

}  // namespace emob
