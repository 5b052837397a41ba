#ifndef DMC_TESTS_HELPERS_HPP
#define DMC_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dmc/core.hpp"

namespace dmc::test {

// One size-1 object per distinct letter, accessed in string order.
inline Trace letters(std::string_view s) {
  std::vector<DataObject> objects;
  std::vector<Access> accesses;
  for (char ch : s) {
    const auto id = static_cast<ObjectId>(ch - 'a');
    bool known = false;
    for (const auto& o : objects) known |= o.id == id;
    if (!known) objects.push_back({id, std::string(1, ch), 1});
    accesses.push_back({id, 0});
  }
  return Trace(std::move(objects), std::move(accesses));
}

inline Trace random_trace(std::uint64_t seed, std::size_t n_accesses,
                          ObjectId n_objects, std::uint64_t max_size) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> size(1, max_size);
  std::vector<DataObject> objects;
  for (ObjectId i = 0; i < n_objects; ++i)
    objects.push_back({i, "o" + std::to_string(i), size(rng)});
  std::uniform_int_distribution<ObjectId> pick(0, n_objects - 1);
  std::vector<Access> accesses;
  accesses.reserve(n_accesses);
  for (std::size_t i = 0; i < n_accesses; ++i) {
    const ObjectId id = pick(rng);
    std::uniform_int_distribution<std::uint64_t> off(0, objects[id].size - 1);
    accesses.push_back({id, off(rng)});
  }
  return Trace(std::move(objects), std::move(accesses));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace dmc::test

#endif  // DMC_TESTS_HELPERS_HPP
