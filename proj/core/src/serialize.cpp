#include "estkit/serialize.hpp"

#include <cstdio>

namespace estkit {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& M) {
  json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  std::vector<double> data(M.data(), M.data() + M.size());  // column-major
  j["data"] = data;
  return j;
}

Matrix matrix_from_json(const json& j) {
  Index rows = j.at("rows").get<Index>();
  Index cols = j.at("cols").get<Index>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Index>(data.size()) != rows * cols)
    throw ConfigError("matrix: data length does not match rows*cols");
  Matrix M(rows, cols);
  std::copy(data.begin(), data.end(), M.data());
  return M;
}

}  // namespace

json to_json(const SetDescriptor& desc) {
  json params = json::object();
  switch (desc.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
      params["radius"] = desc.radius;
      break;
    case SetKind::Hypercube:
      params["halfwidth"] = desc.halfwidth;
      break;
    case SetKind::SparseCone:
    case SetKind::SparseUnitSet:
      params["s"] = desc.s;
      break;
    case SetKind::ConvexSparse:
      params["s"] = desc.s;
      params["radius"] = desc.radius;
      break;
    case SetKind::DictionaryHull:
      params["radius"] = desc.radius;
      params["dictionary"] = matrix_to_json(desc.dictionary);
      break;
    case SetKind::FiniteSet:
      params["points"] = matrix_to_json(desc.points);
      break;
    case SetKind::LowRankCone:
      params["r"] = desc.rank;
      params["d1"] = desc.d1;
      params["d2"] = desc.d2;
      break;
    case SetKind::NuclearBall:
      params["radius"] = desc.radius;
      params["d1"] = desc.d1;
      params["d2"] = desc.d2;
      break;
  }
  return json{{"kind", to_string(desc.kind)}, {"n", desc.n}, {"params", params}};
}

SetDescriptor set_descriptor_from_json(const json& j) {
  for (auto& [key, val] : j.items()) {
    (void)val;
    if (key != "kind" && key != "n" && key != "params")
      throw ConfigError("set descriptor: unknown key \"" + key + "\"");
  }
  SetKind kind = set_kind_from_string(j.at("kind").get<std::string>());
  json params = j.value("params", json::object());
  auto need_n = [&]() -> Index {
    if (!j.contains("n")) throw ConfigError("set descriptor: missing n");
    return j.at("n").get<Index>();
  };
  switch (kind) {
    case SetKind::EuclideanBall:
      return SetDescriptor::euclidean_ball(need_n(), params.value("radius", 1.0));
    case SetKind::L1Ball:
      return SetDescriptor::l1_ball(need_n(), params.value("radius", 1.0));
    case SetKind::Hypercube:
      return SetDescriptor::hypercube(need_n(), params.value("halfwidth", 1.0));
    case SetKind::SparseCone:
      return SetDescriptor::sparse_cone(need_n(), params.at("s").get<Index>());
    case SetKind::SparseUnitSet:
      return SetDescriptor::sparse_unit(need_n(), params.at("s").get<Index>());
    case SetKind::ConvexSparse:
      return SetDescriptor::convex_sparse(need_n(), params.at("s").get<Index>(),
                                          params.value("radius", 1.0));
    case SetKind::DictionaryHull:
      return SetDescriptor::dictionary_hull(matrix_from_json(params.at("dictionary")),
                                            params.value("radius", 1.0));
    case SetKind::FiniteSet:
      return SetDescriptor::finite_set(matrix_from_json(params.at("points")));
    case SetKind::LowRankCone:
      return SetDescriptor::low_rank_cone(params.at("r").get<Index>(),
                                          params.at("d1").get<Index>(),
                                          params.at("d2").get<Index>());
    case SetKind::NuclearBall:
      return SetDescriptor::nuclear_ball(params.value("radius", 1.0),
                                         params.at("d1").get<Index>(),
                                         params.at("d2").get<Index>());
  }
  throw ConfigError("set descriptor: unhandled kind");
}

json to_json(const WidthEstimate& w) {
  const char* kind = w.kind == WidthKind::Global ? "global"
                     : w.kind == WidthKind::Local ? "local"
                                                  : "cone";
  json j{{"mean", w.mean}, {"stderr", w.stderr_}, {"trials", w.trials}, {"kind", kind}};
  if (w.kind != WidthKind::Global) j["radius"] = w.local_radius;
  return j;
}

json to_json(const SolveDiagnostics& d) {
  return json{{"iterations", d.iterations},
              {"primal_residual", d.primal_residual},
              {"feasibility_gap", d.feasibility_gap},
              {"objective", d.objective},
              {"converged", d.converged},
              {"method", d.method}};
}

json to_json(const EstimateReport& r) {
  json j;
  j["estimate"] = std::vector<double>(r.estimate.data(), r.estimate.data() + r.estimate.size());
  j["diagnostics"] = to_json(r.diagnostics);
  if (r.auxiliary)
    j["auxiliary"] =
        std::vector<double>(r.auxiliary->data(), r.auxiliary->data() + r.auxiliary->size());
  if (r.error_l2) j["error_l2"] = *r.error_l2;
  if (r.scaled_target)
    j["scaled_target"] = std::vector<double>(r.scaled_target->data(),
                                             r.scaled_target->data() + r.scaled_target->size());
  if (r.agreement) j["agreement"] = *r.agreement;
  return j;
}

json to_json(const SweepRecord& r) {
  return json{{"experiment", r.experiment},
              {"n", r.n},
              {"m", r.m},
              {"s", r.s},
              {"r", r.rank},
              {"eps", r.eps},
              {"trial_count", r.trials},
              {"err_mean", r.err_mean},
              {"err_median", r.err_median},
              {"err_q90", r.err_q90},
              {"bound_value", r.bound_value},
              {"seed", r.seed}};
}

SweepRecord sweep_record_from_json(const json& j) {
  SweepRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.n = j.at("n").get<Index>();
  r.m = j.at("m").get<long>();
  r.s = j.at("s").get<Index>();
  r.rank = j.at("r").get<Index>();
  r.eps = j.at("eps").get<double>();
  r.trials = j.at("trial_count").get<long>();
  r.err_mean = j.at("err_mean").get<double>();
  r.err_median = j.at("err_median").get<double>();
  r.err_q90 = j.at("err_q90").get<double>();
  r.bound_value = j.at("bound_value").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

json to_json(const ScalingFit& f) {
  json j{{"valid", f.valid}, {"grid", f.grid}};
  if (f.valid) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
  }
  return j;
}

}  // namespace estkit
