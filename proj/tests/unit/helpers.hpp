#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strataboot/error.hpp"
#include "strataboot/experiment.hpp"

namespace strataboot::test {

template <typename F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// rows given as (stratum, z, y)
struct Row {
  const char* stratum;
  int z;
  double y;
};

inline ObservedExperiment observed(const std::vector<Row>& rows) {
  std::vector<ObservationRow> out;
  for (const auto& r : rows) out.push_back({r.stratum, r.z, r.y});
  return ObservedExperiment::from_rows(out);
}

inline ObservedExperiment table1() {
  return observed({{"1", 1, 8}, {"1", 0, 4}, {"2", 1, 6}, {"2", 0, 2}});
}

// single stratum, treated {4, 2}, control {1, 3}
inline ObservedExperiment four_units() {
  return observed({{"s", 1, 4}, {"s", 1, 2}, {"s", 0, 1}, {"s", 0, 3}});
}

inline FinitePopulation population(const std::vector<PopulationUnit>& units) {
  return FinitePopulation(units);
}

}  // namespace strataboot::test
