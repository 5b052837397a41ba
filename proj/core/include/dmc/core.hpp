// Shared domain types: traces, memory layouts, analysis configuration and
// the DMD report produced by the reuse engine.
//
// All quantities are in abstract element units. One access touches one
// element; the bit width of an element only enters through
// scale_granularity().

#ifndef DMC_CORE_HPP
#define DMC_CORE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dmc {

using ObjectId = std::uint32_t;

/// Thrown when a trace or one of its parts violates a structural invariant.
class TraceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DataObject {
  ObjectId id = 0;
  std::string name;
  std::uint64_t size = 1;  // elements

  friend bool operator==(const DataObject&, const DataObject&) = default;
};

struct Access {
  ObjectId object = 0;
  std::uint64_t offset = 0;

  friend bool operator==(const Access&, const Access&) = default;
};

/// An ordered access sequence over a table of declared objects.
///
/// Validated on construction and immutable afterwards. Every datum
/// (object, offset) has a dense key in [0, total_elements()) so engines can
/// index flat arrays instead of hashing pairs.
class Trace {
 public:
  Trace() = default;
  Trace(std::vector<DataObject> objects, std::vector<Access> accesses);

  std::span<const DataObject> objects() const { return objects_; }
  std::span<const Access> accesses() const { return accesses_; }
  std::size_t size() const { return accesses_.size(); }
  bool empty() const { return accesses_.empty(); }

  bool has_object(ObjectId id) const { return index_.contains(id); }
  const DataObject& object(ObjectId id) const;
  /// Position of the object in declaration order.
  std::size_t object_index(ObjectId id) const;

  /// Sum of all object sizes; an upper bound on the footprint.
  std::uint64_t total_elements() const { return total_elements_; }

  std::uint64_t element_key(const Access& a) const {
    return element_base_[object_index(a.object)] + a.offset;
  }
  /// Dense datum key per access, in trace order.
  std::vector<std::uint64_t> element_keys() const;

 private:
  std::vector<DataObject> objects_;
  std::vector<Access> accesses_;
  std::unordered_map<ObjectId, std::size_t> index_;
  std::vector<std::uint64_t> element_base_;
  std::uint64_t total_elements_ = 0;
};

/// Object placement for block (spatial locality) analysis. Addresses are in
/// element units; the block of an address is address / block_size.
struct LayoutTable {
  std::map<ObjectId, std::uint64_t> bases;
  std::map<ObjectId, std::uint64_t> sizes;
  std::uint64_t block_size = 1;

  std::uint64_t base(ObjectId id) const;
  /// One past the highest address covered by any object.
  std::uint64_t end() const;
};

/// Places objects contiguously in declaration order, each base rounded up
/// to the next multiple of block_size.
LayoutTable build_layout(std::span<const DataObject> objects,
                         std::int64_t block_size);

enum class ColdPolicy { kExclude, kFootprintBound, kPerObject };

ColdPolicy parse_cold_policy(std::string_view name);
std::string_view to_string(ColdPolicy policy);

struct AnalysisConfig {
  std::int64_t granularity_bits = 1;
  std::int64_t block_size = 1;
  ColdPolicy cold_policy = ColdPolicy::kExclude;

  void validate() const;
};

struct DmdReport {
  double reuse_dmd = 0.0;
  double cold_dmd = 0.0;
  std::uint64_t n_accesses = 0;
  std::uint64_t n_cold = 0;
  std::uint64_t n_distinct = 0;
  std::map<std::uint64_t, std::uint64_t> histogram;  // distance -> count
  std::int64_t granularity_bits = 1;  // scale already applied to the totals

  double total() const { return reuse_dmd + cold_dmd; }
  std::uint64_t n_reuses() const { return n_accesses - n_cold; }

  /// Checks the count identities and that reuse_dmd matches
  /// sqrt(granularity_bits) * sum(count * sqrt(distance)) to within rel_tol.
  bool consistent(double rel_tol = 1e-9) const;

  friend bool operator==(const DmdReport&, const DmdReport&) = default;
};

/// Rescales a report for s-bit data: every per-access cost becomes
/// sqrt(s * d), so both DMD totals gain exactly a factor sqrt(s).
DmdReport scale_granularity(const DmdReport& report, std::int64_t bits);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
      comp_ += (sum_ - t) + value;
    else
      comp_ += (value - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dmc

#endif  // DMC_CORE_HPP
