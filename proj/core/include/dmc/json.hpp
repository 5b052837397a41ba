// JSON export of reports, model evaluations and advisor results. Keys keep
// insertion order so output is stable byte for byte.

#ifndef DMC_JSON_HPP
#define DMC_JSON_HPP

#include <nlohmann/json.hpp>

#include "dmc/advisor.hpp"
#include "dmc/core.hpp"
#include "dmc/models.hpp"

namespace dmc {

using Json = nlohmann::ordered_json;

/// Flat document: reuse_dmd, cold_dmd, n_accesses, n_cold, n_distinct,
/// histogram as [distance, count] pairs in increasing distance.
Json to_json(const DmdReport& report);

/// {formula, params, terms, total[, notes]}
Json to_json(const Evaluation& evaluation);

Json to_json(const AdvisorResult& result);
Json to_json(const Crossover& crossover);
Json to_json(const ChannelCrossover& crossover);
Json to_json(const GqaDimension& result);
Json to_json(const ConvFftComparison& result);
Json to_json(const OrientationRatios& result);

}  // namespace dmc

#endif  // DMC_JSON_HPP
