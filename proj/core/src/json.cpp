#include "dmc/json.hpp"

namespace dmc {

Json to_json(const DmdReport& report) {
  Json j;
  j["reuse_dmd"] = report.reuse_dmd;
  j["cold_dmd"] = report.cold_dmd;
  j["n_accesses"] = report.n_accesses;
  j["n_cold"] = report.n_cold;
  j["n_distinct"] = report.n_distinct;
  Json hist = Json::array();
  for (const auto& [distance, count] : report.histogram)
    hist.push_back(Json::array({distance, count}));
  j["histogram"] = std::move(hist);
  return j;
}

Json to_json(const Evaluation& e) {
  Json j;
  j["formula"] = e.formula;
  Json params = Json::object();
  for (const auto& [name, value] : e.params) params[name] = value;
  j["params"] = std::move(params);
  Json terms = Json::object();
  for (const Term& t : e.terms) terms[t.name] = t.value;
  j["terms"] = std::move(terms);
  j["total"] = e.total;
  if (!e.notes.empty()) j["notes"] = e.notes;
  return j;
}

Json to_json(const Crossover& c) {
  return Json{{"value", c.value}, {"below", c.below}, {"above", c.above}};
}

Json to_json(const AdvisorResult& r) {
  Json j;
  j["parameter"] = r.parameter;
  j["recommended"] = r.recommended;
  Json cands = Json::array();
  for (const Candidate& c : r.candidates)
    cands.push_back(Json{{"value", c.value}, {"cost", c.cost}});
  j["candidates"] = std::move(cands);
  Json cross = Json::array();
  for (const Crossover& c : r.crossovers) cross.push_back(to_json(c));
  j["crossovers"] = std::move(cross);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ChannelCrossover& c) {
  return Json{{"channels", c.channels},
              {"last_saving", c.last_saving},
              {"break_even", c.break_even}};
}

Json to_json(const GqaDimension& r) {
  return Json{{"d", r.d},
              {"d_asymptotic", r.d_asymptotic},
              {"cost_at_d", r.cost_at_d},
              {"l", r.l},
              {"include_matmul", r.include_matmul}};
}

Json to_json(const ConvFftComparison& r) {
  return Json{{"choice", r.spatial_cheaper ? "spatial" : "fft"},
              {"spatial_cost", r.spatial_cost},
              {"fft_cost", r.fft_cost},
              {"k_cubed_exceeds_n", r.kernel_cube_exceeds_n},
              {"notes", r.notes}};
}

Json to_json(const OrientationRatios& r) {
  return Json{{"square_over_portrait", r.square_over_portrait},
              {"landscape_over_portrait", r.landscape_over_portrait}};
}

}  // namespace dmc
