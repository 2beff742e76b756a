#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "strataboot/experiment.hpp"
#include "strataboot/random.hpp"

namespace strataboot {

// z[i] = 1 when unit i is treated; aligned with design.unit_stratum().
using AssignmentVector = std::vector<std::uint8_t>;

inline constexpr double kMaxEnumerableAssignments = 1e7;

// Complete randomization within each stratum: every arrangement with exactly
// n_m1 treated units is equally likely, strata independent.
AssignmentVector draw_assignment(const StratifiedDesign& design, Rng& rng);
AssignmentVector draw_assignment(const StratifiedDesign& design, RngState state);

// Allocation-free variant for hot loops. `scratch` is resized as needed.
void draw_assignment(const StratifiedDesign& design, Rng& rng, std::span<std::uint8_t> z,
                     std::vector<std::size_t>& scratch);

// prod_m C(n_m, n_m1), as a double (saturates rather than overflowing).
double count_assignments(const StratifiedDesign& design);

// Visits every admissible assignment exactly once, as the Cartesian product
// of per-stratum combinations in lexicographic order. The vector is only
// valid during the call. Throws TooLargeToEnumerate above 1e7 assignments.
class AssignmentEnumerator {
 public:
  explicit AssignmentEnumerator(const StratifiedDesign& design);

  // Advances to the next assignment; false once all were visited.
  bool next();
  std::span<const std::uint8_t> current() const noexcept { return z_; }

 private:
  void write_stratum(std::size_t m);

  const StratifiedDesign* design_;
  std::vector<std::vector<std::size_t>> combos_;  // chosen positions within members(m)
  std::vector<std::uint8_t> z_;
  bool started_ = false;
};

void for_each_assignment(const StratifiedDesign& design,
                         const std::function<void(std::span<const std::uint8_t>)>& visit);

}  // namespace strataboot
