#include "dmc/core.hpp"

#include <algorithm>
#include <string>

namespace dmc {

Trace::Trace(std::vector<DataObject> objects, std::vector<Access> accesses)
    : objects_(std::move(objects)), accesses_(std::move(accesses)) {
  element_base_.reserve(objects_.size());
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const DataObject& obj = objects_[i];
    if (obj.size < 1)
      throw TraceError("object " + std::to_string(obj.id) + " has size 0");
    if (!index_.emplace(obj.id, i).second)
      throw TraceError("duplicate object id " + std::to_string(obj.id));
    element_base_.push_back(total_elements_);
    total_elements_ += obj.size;
  }
  for (std::size_t i = 0; i < accesses_.size(); ++i) {
    const Access& a = accesses_[i];
    auto it = index_.find(a.object);
    if (it == index_.end())
      throw TraceError("access " + std::to_string(i) +
                       " references undeclared object " +
                       std::to_string(a.object));
    if (a.offset >= objects_[it->second].size)
      throw TraceError("access " + std::to_string(i) + " offset " +
                       std::to_string(a.offset) + " out of range for object " +
                       std::to_string(a.object));
  }
}

std::size_t Trace::object_index(ObjectId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw TraceError("unknown object id " + std::to_string(id));
  return it->second;
}

const DataObject& Trace::object(ObjectId id) const {
  return objects_[object_index(id)];
}

std::vector<std::uint64_t> Trace::element_keys() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(accesses_.size());
  // Traces from the generators use dense ids, so cache the last lookup.
  ObjectId last_id = 0;
  std::uint64_t last_base = 0;
  bool have_last = false;
  for (const Access& a : accesses_) {
    if (!have_last || a.object != last_id) {
      last_id = a.object;
      last_base = element_base_[index_.at(a.object)];
      have_last = true;
    }
    keys.push_back(last_base + a.offset);
  }
  return keys;
}

std::uint64_t LayoutTable::base(ObjectId id) const {
  auto it = bases.find(id);
  if (it == bases.end())
    throw TraceError("object " + std::to_string(id) + " missing from layout");
  return it->second;
}

std::uint64_t LayoutTable::end() const {
  std::uint64_t hi = 0;
  for (const auto& [id, b] : bases) hi = std::max(hi, b + sizes.at(id));
  return hi;
}

LayoutTable build_layout(std::span<const DataObject> objects,
                         std::int64_t block_size) {
  if (block_size < 1)
    throw std::invalid_argument("block size must be >= 1");
  if (objects.empty())
    throw std::invalid_argument("layout needs at least one object");
  const auto b = static_cast<std::uint64_t>(block_size);
  LayoutTable layout;
  layout.block_size = b;
  std::uint64_t next = 0;
  for (const DataObject& obj : objects) {
    if (obj.size < 1)
      throw TraceError("object " + std::to_string(obj.id) + " has size 0");
    const std::uint64_t base = (next + b - 1) / b * b;
    if (!layout.bases.emplace(obj.id, base).second)
      throw TraceError("duplicate object id " + std::to_string(obj.id));
    layout.sizes.emplace(obj.id, obj.size);
    next = base + obj.size;
  }
  return layout;
}

ColdPolicy parse_cold_policy(std::string_view name) {
  if (name == "exclude") return ColdPolicy::kExclude;
  if (name == "footprint_bound") return ColdPolicy::kFootprintBound;
  if (name == "per_object") return ColdPolicy::kPerObject;
  throw std::invalid_argument("unknown cold policy '" + std::string(name) +
                              "' (expected exclude, footprint_bound or "
                              "per_object)");
}

std::string_view to_string(ColdPolicy policy) {
  switch (policy) {
    case ColdPolicy::kExclude: return "exclude";
    case ColdPolicy::kFootprintBound: return "footprint_bound";
    case ColdPolicy::kPerObject: return "per_object";
  }
  return "unknown";
}

void AnalysisConfig::validate() const {
  if (granularity_bits < 1)
    throw std::invalid_argument("granularity bits must be >= 1");
  if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
  switch (cold_policy) {
    case ColdPolicy::kExclude:
    case ColdPolicy::kFootprintBound:
    case ColdPolicy::kPerObject:
      return;
  }
  throw std::invalid_argument("unknown cold policy");
}

bool DmdReport::consistent(double rel_tol) const {
  if (n_cold != n_distinct) return false;
  std::uint64_t reuses = 0;
  CompensatedSum sum;
  for (const auto& [distance, count] : histogram) {
    if (distance == 0) return false;
    reuses += count;
    sum.add(static_cast<double>(count) *
            std::sqrt(static_cast<double>(distance)));
  }
  if (n_accesses != n_cold + reuses) return false;
  const double expected =
      sum.value() * std::sqrt(static_cast<double>(granularity_bits));
  const double scale = std::max(1.0, std::abs(expected));
  return std::abs(reuse_dmd - expected) <= rel_tol * scale;
}

DmdReport scale_granularity(const DmdReport& report, std::int64_t bits) {
  if (bits < 1) throw std::invalid_argument("granularity bits must be >= 1");
  const double factor = std::sqrt(static_cast<double>(bits));
  DmdReport out = report;
  out.reuse_dmd *= factor;
  out.cold_dmd *= factor;
  out.granularity_bits *= bits;
  return out;
}

}  // namespace dmc
