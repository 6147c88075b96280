#include "estkit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "estkit/parallel.hpp"
#include "estkit/rng.hpp"
#include "estkit/serialize.hpp"

namespace estkit {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// TOML subset reader

namespace {

struct TomlParser {
  const std::string& text;
  size_t pos = 0;
  size_t line = 1;

  explicit TomlParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("toml line " + std::to_string(line) + ": " + what);
  }

  void skip_ws(bool newlines) {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == '\n') {
        if (!newlines) return;
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else {
        return;
      }
    }
  }

  bool eof() {
    skip_ws(true);
    return pos >= text.size();
  }

  std::string bare_key() {
    skip_ws(false);
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
            text[pos] == '-' || text[pos] == '.'))
      ++pos;
    if (pos == start) fail("expected a key");
    return text.substr(start, pos - start);
  }

  void expect(char c) {
    skip_ws(false);
    if (pos >= text.size() || text[pos] != c)
      fail(std::string("expected '") + c + "'");
    ++pos;
  }

  json value() {
    skip_ws(false);
    if (pos >= text.size()) fail("expected a value");
    char c = text[pos];
    if (c == '"') {
      ++pos;
      std::string out;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) {
          ++pos;
          char e = text[pos];
          out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          out += text[pos];
        }
        ++pos;
      }
      expect('"');
      return out;
    }
    if (c == '[') {
      ++pos;
      json arr = json::array();
      skip_ws(true);
      if (pos < text.size() && text[pos] == ']') {
        ++pos;
        return arr;
      }
      for (;;) {
        skip_ws(true);
        arr.push_back(value());
        skip_ws(true);
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        expect(']');
        return arr;
      }
    }
    if (c == '{') {
      ++pos;
      json obj = json::object();
      skip_ws(false);
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        return obj;
      }
      for (;;) {
        std::string k = bare_key();
        expect('=');
        obj[k] = value();
        skip_ws(false);
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          skip_ws(false);
          continue;
        }
        expect('}');
        return obj;
      }
    }
    if (std::strncmp(text.c_str() + pos, "true", 4) == 0) {
      pos += 4;
      return true;
    }
    if (std::strncmp(text.c_str() + pos, "false", 5) == 0) {
      pos += 5;
      return false;
    }
    // number
    size_t start = pos;
    bool is_float = false;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '+' ||
            text[pos] == '-' || text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E' ||
            text[pos] == '_')) {
      if (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E') is_float = true;
      ++pos;
    }
    if (pos == start) fail("unrecognized value");
    std::string tok = text.substr(start, pos - start);
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    try {
      if (is_float) return std::stod(tok);
      return static_cast<std::int64_t>(std::stoll(tok));
    } catch (const std::exception&) {
      fail("bad number \"" + tok + "\"");
    }
  }
};

}  // namespace

json toml_to_json(const std::string& text) {
  TomlParser p(text);
  json root = json::object();
  json* current = &root;
  while (!p.eof()) {
    p.skip_ws(true);
    if (p.pos >= p.text.size()) break;
    if (p.text[p.pos] == '[') {
      ++p.pos;
      std::string name = p.bare_key();
      p.expect(']');
      json* tgt = &root;
      std::stringstream ss(name);
      std::string part;
      while (std::getline(ss, part, '.')) {
        if (!tgt->contains(part)) (*tgt)[part] = json::object();
        tgt = &(*tgt)[part];
      }
      current = tgt;
    } else {
      std::string key = p.bare_key();
      p.expect('=');
      json* tgt = current;
      std::stringstream ss(key);
      std::string part, last;
      std::vector<std::string> parts;
      while (std::getline(ss, part, '.')) parts.push_back(part);
      for (size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!tgt->contains(parts[i])) (*tgt)[parts[i]] = json::object();
        tgt = &(*tgt)[parts[i]];
      }
      (*tgt)[parts.back()] = p.value();
    }
  }
  return root;
}

// ---------------------------------------------------------------------------
// config validation

namespace {

const std::vector<std::string> kTopKeys = {
    "experiment", "n", "grid", "s", "r", "d1", "d2", "eps", "trials", "seed",
    "set", "model", "output", "format", "solver", "workers", "truth"};
const std::vector<std::string> kGridKeys = {"m", "s", "r", "eps"};
const std::vector<std::string> kModelKeys = {"rows", "link", "noise"};
const std::vector<std::string> kLinkKeys = {"kind", "scale", "binary", "table"};
const std::vector<std::string> kNoiseKeys = {"kind", "sigma", "eps"};

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a table/object");
  for (auto& [key, val] : obj.items()) {
    (void)val;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key \"" + (where.empty() ? key : where + "." + key) + "\"");
  }
}

long to_long_strict(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == std::floor(d)) return static_cast<long>(d);
  }
  throw ConfigError("expected an integer at " + path);
}

}  // namespace

SweepConfig config_from_json(const json& doc) {
  check_keys(doc, kTopKeys, "");
  SweepConfig cfg;
  if (!doc.contains("experiment")) throw ConfigError("missing key \"experiment\"");
  cfg.experiment = doc.at("experiment").get<std::string>();
  const std::vector<std::string> kExperiments = {"recover", "dict-recover", "lowrank",
                                                 "complete", "onebit", "project", "regress"};
  if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
    throw ConfigError("unknown experiment \"" + cfg.experiment + "\"");
  if (cfg.experiment == "regress") cfg.experiment = "recover";

  if (doc.contains("n")) cfg.n = to_long_strict(doc.at("n"), "n");
  if (doc.contains("s")) cfg.s = to_long_strict(doc.at("s"), "s");
  if (doc.contains("r")) cfg.rank = to_long_strict(doc.at("r"), "r");
  if (doc.contains("d1")) cfg.d1 = to_long_strict(doc.at("d1"), "d1");
  if (doc.contains("d2")) cfg.d2 = to_long_strict(doc.at("d2"), "d2");
  if (doc.contains("eps")) cfg.eps = doc.at("eps").get<double>();
  if (doc.contains("trials")) cfg.trials = to_long_strict(doc.at("trials"), "trials");
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
  if (doc.contains("format")) cfg.format = doc.at("format").get<std::string>();
  if (doc.contains("workers")) cfg.workers = static_cast<int>(to_long_strict(doc.at("workers"), "workers"));
  if (doc.contains("truth")) cfg.truth = doc.at("truth").get<std::string>();
  if (doc.contains("solver"))
    cfg.solver = solver_path_from_string(doc.at("solver").get<std::string>());

  if (!doc.contains("grid")) throw ConfigError("missing key \"grid\"");
  const json& grid = doc.at("grid");
  check_keys(grid, kGridKeys, "grid");
  if (!grid.contains("m")) throw ConfigError("missing key \"grid.m\"");
  if (!grid.at("m").is_array()) throw ConfigError("grid.m must be a list");
  size_t i = 0;
  for (const auto& me : grid.at("m")) {
    cfg.m_grid.push_back(to_long_strict(me, "grid.m[" + std::to_string(i) + "]"));
    ++i;
  }
  if (grid.contains("s")) cfg.s = to_long_strict(grid.at("s"), "grid.s");
  if (grid.contains("r")) cfg.rank = to_long_strict(grid.at("r"), "grid.r");
  if (grid.contains("eps")) cfg.eps = grid.at("eps").get<double>();

  if (doc.contains("set")) cfg.set = set_descriptor_from_json(doc.at("set"));

  if (doc.contains("model")) {
    const json& model = doc.at("model");
    check_keys(model, kModelKeys, "model");
    if (model.contains("rows"))
      cfg.rows = row_kind_from_string(model.at("rows").get<std::string>());
    if (model.contains("link")) {
      const json& link = model.at("link");
      check_keys(link, kLinkKeys, "model.link");
      std::string kind = link.value("kind", "sign");
      if (kind == "sign" || kind == "Sign") cfg.link = LinkFunction::sign_link();
      else if (kind == "tanh" || kind == "Tanh")
        cfg.link = LinkFunction::tanh_link(link.value("scale", 0.5));
      else if (kind == "linear" || kind == "Linear")
        cfg.link = LinkFunction::linear_link();
      else if (kind == "custom" || kind == "Custom") {
        std::vector<std::pair<double, double>> table;
        for (const auto& row : link.at("table"))
          table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        cfg.link = LinkFunction::custom(std::move(table), link.value("binary", true));
      } else {
        throw ConfigError("unknown link kind \"" + kind + "\"");
      }
    }
    if (model.contains("noise")) {
      const json& noise = model.at("noise");
      check_keys(noise, kNoiseKeys, "model.noise");
      std::string kind = noise.value("kind", "none");
      if (kind == "none") cfg.noise = NoiseSpec::none();
      else if (kind == "iid")
        cfg.noise = NoiseSpec::iid_bounded(noise.value("sigma", 0.0), noise.value("eps", 0.0));
      else if (kind == "adversarial")
        cfg.noise = NoiseSpec::adversarial(noise.value("eps", 0.0));
      else
        throw ConfigError("unknown noise kind \"" + kind + "\"");
    }
  }

  // defaults and basic shape checks
  if (cfg.experiment == "complete" || cfg.experiment == "lowrank") {
    if (cfg.d1 < 1 || cfg.d2 < 1) {
      if (cfg.n >= 1) {
        Index d = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(cfg.n))));
        if (d * d != cfg.n) throw ConfigError("matrix experiments need d1 and d2 (or square n)");
        cfg.d1 = cfg.d2 = d;
      } else {
        throw ConfigError("matrix experiments need d1 and d2");
      }
    }
    cfg.n = cfg.d1 * cfg.d2;
  }
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.m_grid.empty()) throw ConfigError("grid.m must be non-empty");
  for (long m : cfg.m_grid)
    if (m < 0) throw ConfigError("grid.m entries must be >= 0");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.eps < 0) throw ConfigError("eps must be >= 0");
  if (cfg.truth != "sparse" && cfg.truth != "effective")
    throw ConfigError("truth must be \"sparse\" or \"effective\"");
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("format must be \"csv\" or \"json\"");
  if (cfg.noise.kind == NoiseSpec::Kind::None && cfg.eps > 0)
    cfg.noise = NoiseSpec::iid_bounded(cfg.eps, cfg.eps);
  return cfg;
}

SweepConfig load_config(const std::string& path, const json& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
    doc = toml_to_json(buf.str());
  } else {
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
  }
  if (overrides.is_object())
    for (auto& [key, val] : overrides.items()) doc[key] = val;
  return config_from_json(doc);
}

json config_to_json(const SweepConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["n"] = cfg.n;
  j["grid"] = json{{"m", cfg.m_grid}, {"s", cfg.s}, {"r", cfg.rank}, {"eps", cfg.eps}};
  j["d1"] = cfg.d1;
  j["d2"] = cfg.d2;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["truth"] = cfg.truth;
  j["solver"] = to_string(cfg.solver);
  j["format"] = cfg.format;
  j["workers"] = cfg.workers;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  if (cfg.set) j["set"] = to_json(*cfg.set);
  json link;
  switch (cfg.link.kind) {
    case LinkFunction::Kind::Sign: link["kind"] = "sign"; break;
    case LinkFunction::Kind::Tanh:
      link["kind"] = "tanh";
      link["scale"] = cfg.link.scale;
      break;
    case LinkFunction::Kind::Linear: link["kind"] = "linear"; break;
    case LinkFunction::Kind::Custom: {
      link["kind"] = "custom";
      json table = json::array();
      for (auto& [a, b] : cfg.link.table) table.push_back(json::array({a, b}));
      link["table"] = table;
      link["binary"] = cfg.link.binary;
      break;
    }
  }
  json noise;
  switch (cfg.noise.kind) {
    case NoiseSpec::Kind::None: noise["kind"] = "none"; break;
    case NoiseSpec::Kind::IidBounded:
      noise["kind"] = "iid";
      noise["sigma"] = cfg.noise.sigma;
      noise["eps"] = cfg.noise.epsilon;
      break;
    case NoiseSpec::Kind::Adversarial:
      noise["kind"] = "adversarial";
      noise["eps"] = cfg.noise.epsilon;
      break;
  }
  j["model"] = json{{"rows", to_string(cfg.rows)}, {"link", link}, {"noise", noise}};
  return j;
}

// ---------------------------------------------------------------------------
// sweep driver

namespace {

Vector draw_truth_vector(Index n, Index s, const std::string& truth, Rng& rng) {
  if (truth == "effective") {
    // power-law profile with effective sparsity s, random signs/permutation
    double lo = 0.3, hi = 8.0;
    auto eff = [&](double alpha) {
      double l1 = 0.0, l2 = 0.0;
      for (Index i = 1; i <= n; ++i) {
        double w = std::pow(static_cast<double>(i), -alpha);
        l1 += w;
        l2 += w * w;
      }
      return l1 * l1 / l2;
    };
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (eff(mid) > static_cast<double>(s)) lo = mid;
      else hi = mid;
    }
    double alpha = 0.5 * (lo + hi);
    Vector x(n);
    for (Index i = 0; i < n; ++i)
      x[i] = std::pow(static_cast<double>(i + 1), -alpha) * rng.rademacher();
    // random permutation
    for (Index i = n - 1; i > 0; --i) {
      Index j = static_cast<Index>(rng.integer(static_cast<std::uint64_t>(i + 1)));
      std::swap(x[i], x[j]);
    }
    return x / x.norm();
  }
  Vector x = Vector::Zero(n);
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index k = 0; k < s; ++k)
    std::swap(idx[static_cast<size_t>(k)],
              idx[static_cast<size_t>(
                  k + static_cast<Index>(rng.integer(static_cast<std::uint64_t>(n - k))))]);
  double nrm = 0.0;
  while (nrm == 0.0) {
    for (Index k = 0; k < s; ++k) x[idx[static_cast<size_t>(k)]] = rng.gaussian();
    nrm = x.norm();
  }
  return x / nrm;
}

Matrix draw_lowrank_matrix(Index d1, Index d2, Index r, Rng& rng, bool unit_inf_norm) {
  Matrix U(d1, r), V(d2, r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < d1; ++i) U(i, j) = rng.gaussian();
    for (Index i = 0; i < d2; ++i) V(i, j) = rng.gaussian();
  }
  Matrix X = U * V.transpose();
  if (unit_inf_norm) {
    double mx = X.cwiseAbs().maxCoeff();
    if (mx > 0) X /= mx;
  } else {
    double f = X.norm();
    if (f > 0) X /= f;
  }
  return X;
}

struct TrialOutcome {
  double err = 0.0;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  SweepResult out;
  const int workers = cfg.workers;

  // one width estimate drives every bound column of the sweep
  double width_for_bound = 0.0;
  if (cfg.experiment == "recover" || cfg.experiment == "onebit") {
    FeasibleSet K = cfg.set ? FeasibleSet(*cfg.set)
                            : FeasibleSet(SetDescriptor::convex_sparse(cfg.n, cfg.s, 1.0));
    width_for_bound = mean_width_mc(K, 2000, Rng::derive(cfg.seed, {0xb0ULL}), workers).mean;
  } else if (cfg.experiment == "project") {
    FeasibleSet cone = cfg.set ? FeasibleSet(*cfg.set)
                               : FeasibleSet(SetDescriptor::sparse_cone(cfg.n, cfg.s));
    width_for_bound =
        local_mean_width_mc(cone, 1.0, 2000, Rng::derive(cfg.seed, {0xb1ULL}), workers).mean;
  }

  LinkConstants lk{1.0, 1.0};
  if (cfg.experiment == "project" || cfg.experiment == "onebit") {
    lk = link_constants(cfg.link, 1.0);
  }

  for (size_t gi = 0; gi < cfg.m_grid.size(); ++gi) {
    const long m = cfg.m_grid[gi];
    std::vector<double> errs(static_cast<size_t>(cfg.trials));
    parallel_for(cfg.trials, workers, [&](long t) {
      Rng rng(Rng::derive(cfg.seed, {static_cast<std::uint64_t>(gi),
                                     static_cast<std::uint64_t>(t), 0x5feedULL}));
      std::uint64_t oseed =
          Rng::derive(cfg.seed, {static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(t), 1ULL});
      double err = 0.0;
      if (cfg.experiment == "recover") {
        Vector x = draw_truth_vector(cfg.n, cfg.s, cfg.truth, rng);
        Matrix A = sample_sensing_matrix({cfg.rows, cfg.n}, m, oseed);
        auto obs = observe_linear(A, x, cfg.eps > 0 ? cfg.noise : NoiseSpec::none(), oseed);
        if (cfg.set && cfg.set->kind != SetKind::L1Ball) {
          auto rep = estimate_linear_gauge(FeasibleSet(*cfg.set), A, obs.y, cfg.eps, x,
                                           cfg.solver);
          err = *rep.error_l2;
        } else {
          auto [xh, diag] = l1_min(A, obs.y, cfg.eps, cfg.solver);
          err = (xh - x).norm();
        }
      } else if (cfg.experiment == "onebit") {
        FeasibleSet K = cfg.set ? FeasibleSet(*cfg.set)
                                : FeasibleSet(SetDescriptor::convex_sparse(cfg.n, cfg.s, 1.0));
        Vector x = draw_truth_vector(cfg.n, cfg.s, cfg.truth, rng);
        Matrix A = sample_sensing_matrix({cfg.rows, cfg.n}, m, oseed);
        Vector y = cfg.link.kind == LinkFunction::Kind::Sign ? observe_single_bit(A, x)
                                                             : observe_link(A, x, cfg.link, oseed);
        auto rep = estimate_onebit(K, A, y, x);
        err = *rep.error_l2 * *rep.error_l2;  // squared-error metric
      } else if (cfg.experiment == "project") {
        FeasibleSet cone = cfg.set ? FeasibleSet(*cfg.set)
                                   : FeasibleSet(SetDescriptor::sparse_cone(cfg.n, cfg.s));
        Vector x = draw_truth_vector(cfg.n, cfg.s, cfg.truth, rng);
        Matrix A = sample_sensing_matrix({cfg.rows, cfg.n}, m, oseed);
        Vector y = cfg.link.kind == LinkFunction::Kind::Sign ? observe_single_bit(A, x)
                                                             : observe_link(A, x, cfg.link, oseed);
        auto rep = estimate_single_index(cone, A, y, lk, x);
        err = *rep.error_l2;
      } else if (cfg.experiment == "lowrank") {
        Matrix X = draw_lowrank_matrix(cfg.d1, cfg.d2, cfg.rank, rng, false);
        Vector xf = flatten(X);
        Matrix A = sample_sensing_matrix({cfg.rows, cfg.n}, m, oseed);
        auto obs = observe_linear(A, xf, cfg.eps > 0 ? cfg.noise : NoiseSpec::none(), oseed);
        auto rep = estimate_lowrank(A, obs.y, cfg.d1, cfg.d2, cfg.eps, xf);
        err = *rep.error_l2;
      } else if (cfg.experiment == "complete") {
        Matrix X = draw_lowrank_matrix(cfg.d1, cfg.d2, cfg.rank, rng, true);
        auto es = sample_entries(X, m, cfg.noise, oseed);
        auto rep = complete_matrix(es.y, es.mask, es.p, cfg.rank, X);
        err = *rep.error_l2;
      } else if (cfg.experiment == "dict-recover") {
        const Index N = 2 * cfg.n;
        Matrix D(cfg.n, N);
        for (Index j = 0; j < N; ++j) {
          Vector col = rng.gaussian_vector(cfg.n);
          D.col(j) = col / col.norm();
        }
        Vector alpha = Vector::Zero(N);
        for (Index k = 0; k < cfg.s; ++k)
          alpha[static_cast<Index>(rng.integer(static_cast<std::uint64_t>(N)))] = rng.gaussian();
        if (alpha.norm() == 0) alpha[0] = 1.0;
        Vector x = D * alpha;
        Matrix A = sample_sensing_matrix({cfg.rows, cfg.n}, m, oseed);
        auto obs = observe_linear(A, x, cfg.eps > 0 ? cfg.noise : NoiseSpec::none(), oseed);
        auto rep = estimate_sparse_dictionary(D, A, obs.y, cfg.eps, x);
        err = *rep.error_l2;
      } else {
        throw ConfigError("run_sweep: unhandled experiment " + cfg.experiment);
      }
      errs[static_cast<size_t>(t)] = err;
    });

    std::vector<double> copy = errs;
    std::sort(copy.begin(), copy.end());
    double mean = std::accumulate(copy.begin(), copy.end(), 0.0) / static_cast<double>(copy.size());
    auto quant = [&](double q) {
      double pos = q * static_cast<double>(copy.size() - 1);
      size_t lo = static_cast<size_t>(pos);
      size_t hi = std::min(lo + 1, copy.size() - 1);
      double frac = pos - static_cast<double>(lo);
      return copy[lo] * (1 - frac) + copy[hi] * frac;
    };

    SweepRecord rec;
    rec.experiment = cfg.experiment;
    rec.n = cfg.n;
    rec.m = m;
    rec.s = cfg.s;
    rec.rank = cfg.rank;
    rec.eps = cfg.eps;
    rec.trials = cfg.trials;
    rec.err_mean = mean;
    rec.err_median = quant(0.5);
    rec.err_q90 = quant(0.9);
    rec.seed = cfg.seed;
    const double sm = std::sqrt(static_cast<double>(std::max<long>(m, 1)));
    if (cfg.experiment == "recover") {
      rec.bound_value = width_for_bound / sm + cfg.eps;
    } else if (cfg.experiment == "onebit") {
      rec.bound_value = width_for_bound / sm;
    } else if (cfg.experiment == "project") {
      rec.bound_value = lk.m_const * width_for_bound / sm;
    } else if (cfg.experiment == "lowrank") {
      rec.bound_value =
          std::sqrt(static_cast<double>(cfg.rank * (cfg.d1 + cfg.d2)) / static_cast<double>(m));
    } else if (cfg.experiment == "complete") {
      double noise_bound = cfg.noise.kind == NoiseSpec::Kind::IidBounded ? cfg.noise.sigma : 0.0;
      rec.bound_value =
          std::sqrt(static_cast<double>(cfg.rank * (cfg.d1 + cfg.d2)) / static_cast<double>(m)) *
          (1.0 + noise_bound);
    } else if (cfg.experiment == "dict-recover") {
      rec.bound_value = std::sqrt(static_cast<double>(cfg.s) *
                                  std::log(static_cast<double>(2 * cfg.n)) /
                                  static_cast<double>(m)) +
                        std::sqrt(2.0 * M_PI) * cfg.eps;
    }
    out.records.push_back(std::move(rec));
  }

  if (cfg.eps == 0.0) {
    std::vector<double> med;
    for (const auto& r : out.records) med.push_back(r.err_median);
    out.fit = fit_loglog(cfg.m_grid, med);
  } else {
    out.fit.grid = cfg.m_grid;
  }
  return out;
}

void emit(const std::vector<SweepRecord>& records, const ScalingFit& fit,
          const std::string& format, const std::string& path) {
  if (records.empty()) throw IoError("emit: no records to write");
  if (format != "csv" && format != "json") throw IoError("emit: unknown format " + format);
  std::ofstream outf(path);
  if (!outf) throw IoError("emit: cannot open " + path);
  if (format == "csv") {
    outf << "experiment,n,m,s,r,eps,trial_count,err_mean,err_median,err_q90,bound_value,seed\n";
    for (const auto& r : records) {
      outf << r.experiment << ',' << r.n << ',' << r.m << ',' << r.s << ',' << r.rank << ','
           << format_double(r.eps) << ',' << r.trials << ',' << format_double(r.err_mean) << ','
           << format_double(r.err_median) << ',' << format_double(r.err_q90) << ','
           << format_double(r.bound_value) << ',' << r.seed << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    outf << arr.dump(2) << '\n';
  }
  outf.close();
  std::ofstream sidecar(path + ".fit.json");
  if (!sidecar) throw IoError("emit: cannot open " + path + ".fit.json");
  sidecar << to_json(fit).dump(2) << '\n';
}

}  // namespace estkit
