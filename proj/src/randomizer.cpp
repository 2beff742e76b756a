#include "strataboot/randomizer.hpp"

#include <cmath>
#include <numeric>

#include "strataboot/error.hpp"

namespace strataboot {

void draw_assignment(const StratifiedDesign& design, Rng& rng, std::span<std::uint8_t> z,
                     std::vector<std::size_t>& scratch) {
  std::fill(z.begin(), z.end(), std::uint8_t{0});
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const auto members = design.members(m);
    const std::size_t size = members.size();
    const std::size_t treated = design.stratum(m).treated;
    scratch.assign(members.begin(), members.end());
    // Partial Fisher-Yates: the first `treated` slots are a uniform subset.
    for (std::size_t k = 0; k < treated; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(size - k));
      std::swap(scratch[k], scratch[j]);
      z[scratch[k]] = 1;
    }
  }
}

AssignmentVector draw_assignment(const StratifiedDesign& design, Rng& rng) {
  AssignmentVector z(design.num_units());
  std::vector<std::size_t> scratch;
  draw_assignment(design, rng, z, scratch);
  return z;
}

AssignmentVector draw_assignment(const StratifiedDesign& design, RngState state) {
  Rng rng(state);
  return draw_assignment(design, rng);
}

double count_assignments(const StratifiedDesign& design) {
  double total = 1.0;
  for (const auto& s : design.strata()) {
    // C(n, k) via lgamma is inexact; the product form is exact for moderate n.
    double c = 1.0;
    const std::size_t k = std::min(s.treated, s.control());
    for (std::size_t i = 1; i <= k; ++i) {
      c = c * static_cast<double>(s.size - k + i) / static_cast<double>(i);
    }
    total *= std::round(c);
  }
  return total;
}

AssignmentEnumerator::AssignmentEnumerator(const StratifiedDesign& design) : design_(&design) {
  const double total = count_assignments(design);
  if (total > kMaxEnumerableAssignments) {
    throw Error(ErrorCode::TooLargeToEnumerate,
                "design admits " + std::to_string(total) + " assignments (limit 1e7)");
  }
  combos_.resize(design.num_strata());
  z_.assign(design.num_units(), 0);
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    combos_[m].resize(design.stratum(m).treated);
    std::iota(combos_[m].begin(), combos_[m].end(), std::size_t{0});
    write_stratum(m);
  }
}

void AssignmentEnumerator::write_stratum(std::size_t m) {
  const auto members = design_->members(m);
  for (std::size_t i : members) z_[i] = 0;
  for (std::size_t pos : combos_[m]) z_[members[pos]] = 1;
}

bool AssignmentEnumerator::next() {
  if (!started_) {
    started_ = true;
    return true;
  }
  // Odometer over strata; each digit is a lexicographic k-subset.
  for (std::size_t m = 0; m < combos_.size(); ++m) {
    auto& c = combos_[m];
    const std::size_t n = design_->stratum(m).size;
    const std::size_t k = c.size();
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i > 0) {
      ++c[i - 1];
      for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
      write_stratum(m);
      return true;
    }
    std::iota(c.begin(), c.end(), std::size_t{0});
    write_stratum(m);
  }
  return false;
}

void for_each_assignment(const StratifiedDesign& design,
                         const std::function<void(std::span<const std::uint8_t>)>& visit) {
  AssignmentEnumerator it(design);
  while (it.next()) visit(it.current());
}

}  // namespace strataboot
