#include "cli_lib.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "robann/dataset_io.hpp"
#include "robann/dp.hpp"
#include "robann/forall.hpp"
#include "robann/harness.hpp"
#include "robann/metric.hpp"
#include "robann/robust.hpp"
#include "robann/stats.hpp"

namespace robann {
namespace cli {

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// section -> allowed keys; "u*" admits u0, u1, ...
const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"", {"kind"}},
      {"dataset", {"source", "n", "dim", "ball", "path", "min_weight"}},
      {"problem", {"c", "r", "Q", "delta"}},
      {"searcher", {"type", "tables"}},
      {"adversary", {"type"}},
      {"run",
       {"seed", "games", "rounds", "max_win_rate", "write_transcript"}},
      {"fairness", {"trials", "min_p"}},
      {"beta", {"c_min", "c_max", "step", "rho"}},
      {"forall", {"d", "n", "builds", "min_correct", "rho_mode"}},
      {"updates", {"count", "u*"}},
      {"overrides",
       {"fair.boost_const", "fair.reject_const", "decider.copies",
        "decider.subsample", "decider.copy_miss", "decider.noise_scale",
        "bucketed.alpha", "annuli.k", "annuli.eta", "annuli.p_star",
        "annuli.pool", "annuli.probes", "annuli.trunc_scale",
        "annuli.noise_scale", "relaxed.k", "relaxed.budget_scale",
        "forall.sample_const", "covering.delta", "covering.cell_cap",
        "median.t"}},
  };
  return schema;
}

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds = {
      "game", "fairness", "beta-curve", "forall-exhaustive",
      "decider-accuracy"};
  return kinds;
}

}  // namespace

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_num(const std::string& key,
                                 double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError{"config key '" + key + "' is not a number: '" +
                      it->second + "'"};
  }
}

std::uint64_t ExperimentConfig::get_int(const std::string& key,
                                        std::uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError{"config key '" + key + "' is not an integer: '" +
                      it->second + "'"};
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  const auto& schema = config_schema();
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError{"unterminated section: " + line};
      section = trim(line.substr(1, line.size() - 2));
      if (schema.find(section) == schema.end()) {
        throw ConfigError{"unknown config section '" + section + "'"};
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError{"expected 'key = value', got: " + line};
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& allowed = schema.at(section);
    const bool updates_slot =
        section == "updates" && key.size() > 1 && key[0] == 'u' &&
        std::all_of(key.begin() + 1, key.end(),
                    [](char c) { return c >= '0' && c <= '9'; });
    if (allowed.find(key) == allowed.end() && !updates_slot) {
      throw ConfigError{"unknown config key '" +
                        (section.empty() ? key : section + "." + key) + "'"};
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values.count(full)) {
      throw ConfigError{"duplicate config key '" + full + "'"};
    }
    cfg.values[full] = value;
  }
  cfg.kind = cfg.get("kind", "");
  if (cfg.kind.empty()) throw ConfigError{"missing required key 'kind'"};
  if (known_kinds().find(cfg.kind) == known_kinds().end()) {
    throw ConfigError{"unknown experiment kind '" + cfg.kind + "'"};
  }
  return cfg;
}

namespace {

struct Resolved {
  ProblemParams params;
  FairConfig fair;
  DeciderConfig decider;
  BucketedConfig bucketed;
  AnnuliConfig annuli;
  RelaxedConfig relaxed;
  ForAllConfig forall;
  std::uint64_t median_t = 1;
  std::map<std::string, std::string> table;  // for output provenance
};

Resolved resolve(const ExperimentConfig& cfg) {
  Resolved r;
  r.params.c = cfg.get_num("problem.c", 2.0);
  r.params.r = cfg.get_num("problem.r", 2.0);
  r.params.max_queries = cfg.get_int("problem.Q", 100);
  r.params.delta = cfg.get_num("problem.delta", 0.001);

  r.fair.boost_const = cfg.get_num("overrides.fair.boost_const", 1.0);
  r.fair.reject_const = cfg.get_num("overrides.fair.reject_const", 100.0);
  r.decider.copies = cfg.get_int("overrides.decider.copies", 0);
  r.decider.subsample = cfg.get_int("overrides.decider.subsample", 0);
  r.decider.copy_miss = cfg.get_num("overrides.decider.copy_miss", 0.1);
  r.decider.noise_scale = cfg.get_num("overrides.decider.noise_scale", 1.0);
  r.bucketed.decider = r.decider;
  r.bucketed.alpha = cfg.get_num("overrides.bucketed.alpha", 0.0);
  r.annuli.annuli =
      static_cast<std::uint32_t>(cfg.get_int("overrides.annuli.k", 2));
  r.annuli.eta = cfg.get_num("overrides.annuli.eta", 0.001);
  r.annuli.p_star = cfg.get_num("overrides.annuli.p_star", 0.998);
  r.annuli.pool = cfg.get_int("overrides.annuli.pool", 0);
  r.annuli.probes = cfg.get_int("overrides.annuli.probes", 0);
  r.annuli.trunc_scale = cfg.get_num("overrides.annuli.trunc_scale", 4.0);
  r.annuli.noise_scale = cfg.get_num("overrides.annuli.noise_scale", 1.0);
  r.annuli.fair = r.fair;
  r.relaxed.annuli =
      static_cast<std::uint32_t>(cfg.get_int("overrides.relaxed.k", 2));
  r.relaxed.budget_scale =
      cfg.get_num("overrides.relaxed.budget_scale", 100.0);
  r.relaxed.fair = r.fair;
  r.forall.sample_const = cfg.get_num("overrides.forall.sample_const", 1.0);
  const std::string rho_mode = cfg.get("forall.rho_mode", "bit_sampling");
  const auto rho_fn = rho_fn_from_name(rho_mode);
  if (!rho_fn) throw ConfigError{"unknown forall.rho_mode '" + rho_mode + "'"};
  r.forall.rho_mode = *rho_fn;
  r.median_t = cfg.get_int("overrides.median.t", 1);

  r.table["problem.c"] = fmt(r.params.c);
  r.table["problem.r"] = fmt(r.params.r);
  r.table["problem.Q"] = std::to_string(r.params.max_queries);
  r.table["problem.delta"] = fmt(r.params.delta);
  r.table["fair.boost_const"] = fmt(r.fair.boost_const);
  r.table["fair.reject_const"] = fmt(r.fair.reject_const);
  r.table["decider.copies"] = std::to_string(r.decider.copies);
  r.table["decider.subsample"] = std::to_string(r.decider.subsample);
  r.table["decider.copy_miss"] = fmt(r.decider.copy_miss);
  r.table["decider.noise_scale"] = fmt(r.decider.noise_scale);
  r.table["bucketed.alpha"] = fmt(r.bucketed.alpha);
  r.table["annuli.k"] = std::to_string(r.annuli.annuli);
  r.table["annuli.eta"] = fmt(r.annuli.eta);
  r.table["annuli.p_star"] = fmt(r.annuli.p_star);
  r.table["annuli.pool"] = std::to_string(r.annuli.pool);
  r.table["annuli.probes"] = std::to_string(r.annuli.probes);
  r.table["annuli.trunc_scale"] = fmt(r.annuli.trunc_scale);
  r.table["relaxed.k"] = std::to_string(r.relaxed.annuli);
  r.table["relaxed.budget_scale"] = fmt(r.relaxed.budget_scale);
  r.table["forall.sample_const"] = fmt(r.forall.sample_const);
  r.table["median.t"] = std::to_string(r.median_t);
  return r;
}

std::string csv_header(std::uint64_t seed, const Resolved& r) {
  std::ostringstream out;
  out << "# robann " << kVersion << "\n# seed=" << seed << "\n# constants:";
  for (const auto& [k, v] : r.table) out << ' ' << k << '=' << v;
  out << '\n';
  return out.str();
}

json base_summary(std::uint64_t seed, const Resolved& r) {
  json j;
  j["version"] = kVersion;
  j["seed"] = seed;
  json constants;
  for (const auto& [k, v] : r.table) constants[k] = v;
  j["constants"] = constants;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct DatasetBundle {
  std::shared_ptr<Dataset> data;
  std::optional<Point> planted_query;
};

DatasetBundle make_dataset(const ExperimentConfig& cfg,
                           const ProblemParams& params, std::uint64_t seed,
                           std::uint64_t game) {
  const std::string source = cfg.get("dataset.source", "planted");
  const auto n = static_cast<std::size_t>(cfg.get_int("dataset.n", 128));
  const auto dim = static_cast<std::size_t>(cfg.get_int("dataset.dim", 16));
  RngStream rng = derive_stream(seed, "dataset", game);
  DatasetBundle out;
  if (source == "planted") {
    const auto ball =
        static_cast<std::size_t>(cfg.get_int("dataset.ball", 1));
    auto inst = planted_instance(n, dim, params, ball, rng);
    out.data = inst.data;
    out.planted_query = inst.query;
  } else if (source == "random") {
    out.data = random_hamming_dataset(n, dim, rng);
  } else if (source == "isolated") {
    const auto w = static_cast<std::size_t>(
        cfg.get_int("dataset.min_weight", dim / 3));
    out.data = isolated_instance(n, dim, w, rng);
  } else if (source == "file") {
    const std::string path = cfg.get("dataset.path", "");
    if (path.empty()) throw ConfigError{"dataset.source=file needs dataset.path"};
    out.data = std::make_shared<Dataset>(read_dataset_file(path));
  } else {
    throw ConfigError{"unknown dataset.source '" + source + "'"};
  }
  return out;
}

std::unique_ptr<Searcher> make_searcher(const ExperimentConfig& cfg,
                                        const Resolved& r,
                                        std::shared_ptr<Dataset> ds,
                                        std::uint64_t setup_seed) {
  const std::string type = cfg.get("searcher.type", "fair");
  if (type == "fair") {
    return std::make_unique<FairSearcher>(std::move(ds), r.params, setup_seed,
                                          r.fair);
  }
  if (type == "classic") {
    const auto tables =
        static_cast<std::uint32_t>(cfg.get_int("searcher.tables", 0));
    return std::make_unique<ClassicSearcher>(std::move(ds), r.params,
                                             setup_seed, tables);
  }
  if (type == "classic_single") {
    return std::make_unique<ClassicSearcher>(std::move(ds), r.params,
                                             setup_seed, 1);
  }
  if (type == "bucketed") {
    return std::make_unique<BucketedSearcher>(std::move(ds), r.params,
                                              r.bucketed, setup_seed);
  }
  if (type == "annuli") {
    return std::make_unique<AnnuliSearcher>(std::move(ds), r.params, r.annuli,
                                            setup_seed);
  }
  if (type == "relaxed") {
    return std::make_unique<RelaxedSearcher>(std::move(ds), r.params,
                                             r.relaxed, setup_seed);
  }
  if (type == "decider") {
    return std::make_unique<DeciderSearcher>(std::move(ds), r.params,
                                             r.decider, setup_seed);
  }
  if (type == "oracle_stub") {
    return std::make_unique<OracleStubSearcher>(std::move(ds), r.params);
  }
  if (type == "always_bottom") {
    return std::make_unique<AlwaysBottomSearcher>();
  }
  throw ConfigError{"unknown searcher.type '" + type + "'"};
}

std::unique_ptr<Adversary> make_adversary(const ExperimentConfig& cfg,
                                          std::uint64_t seed,
                                          std::uint64_t game) {
  const std::string type = cfg.get("adversary.type", "oblivious_random");
  const std::uint64_t adv_seed =
      RngStream::word_at(seed, stream_id("adversary", game), 0);
  if (type == "oblivious_random") {
    return std::make_unique<ObliviousRandomAdversary>(adv_seed);
  }
  if (type == "repeat_perturb") {
    return std::make_unique<RepeatPerturbAdversary>(adv_seed);
  }
  if (type == "bucket_prober") {
    return std::make_unique<BucketProberAdversary>(adv_seed);
  }
  if (type == "replay_worst") {
    return std::make_unique<ReplayWorstAdversary>(adv_seed);
  }
  throw ConfigError{"unknown adversary.type '" + type + "'"};
}

std::vector<UpdateOp> make_schedule(const ExperimentConfig& cfg) {
  std::vector<UpdateOp> ops;
  const auto count = cfg.get_int("updates.count", 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string raw = cfg.get("updates.u" + std::to_string(i), "");
    if (raw.empty()) {
      throw ConfigError{"updates.count=" + std::to_string(count) +
                        " but updates.u" + std::to_string(i) + " is missing"};
    }
    std::istringstream in(raw);
    UpdateOp op;
    std::string kind;
    if (!(in >> op.after_round >> kind)) {
      throw ConfigError{"malformed update '" + raw + "'"};
    }
    if (kind == "insert") {
      std::string bits;
      in >> bits;
      op.is_insert = true;
      op.pt = Point::hamming(bits);
    } else if (kind == "erase") {
      op.is_insert = false;
      in >> op.id;
    } else {
      throw ConfigError{"update op must be insert or erase, got '" + kind +
                        "'"};
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

struct Outcome {
  int exit_code = 0;
  std::string failure;
};

Outcome run_games(const ExperimentConfig& cfg, const Resolved& r,
                  std::uint64_t seed, const std::filesystem::path& out_dir,
                  std::string& log) {
  const std::uint64_t games = cfg.get_int("run.games", 10);
  const std::uint64_t rounds =
      cfg.get_int("run.rounds", r.params.max_queries);
  const bool write_transcript = cfg.get("run.write_transcript", "yes") != "no";
  const double max_win_rate = cfg.get_num("run.max_win_rate", 1.0);
  const auto schedule = make_schedule(cfg);

  std::uint64_t wins = 0;
  std::uint64_t total_charge = 0;
  std::uint64_t max_charge = 0;
  std::string first_transcript;
  for (std::uint64_t g = 0; g < games; ++g) {
    auto bundle = make_dataset(cfg, r.params, seed, g);
    const std::uint64_t setup_seed =
        RngStream::word_at(seed, stream_id("setup", g), 0);
    auto searcher = make_searcher(cfg, r, bundle.data, setup_seed);
    auto adversary = make_adversary(cfg, seed, g);
    GameOptions opt;
    opt.rounds = rounds;
    opt.seed = seed;
    opt.game_ordinal = g;
    opt.schedule = schedule;
    const Transcript t =
        run_game(bundle.data, r.params, *searcher, *adversary, opt);
    wins += t.adversary_won;
    total_charge += t.total_charge;
    max_charge = std::max(max_charge, t.total_charge);
    if (g == 0 && write_transcript) first_transcript = t.to_tsv();
  }
  const auto wilson = wilson_interval(wins, games);

  json j = base_summary(seed, r);
  j["kind"] = cfg.kind;
  j["games"] = games;
  j["rounds"] = rounds;
  j["adversary_wins"] = wins;
  j["win_rate"] = wilson.estimate;
  j["win_rate_ci_low"] = wilson.low;
  j["win_rate_ci_high"] = wilson.high;
  j["mean_charge_per_game"] =
      games > 0 ? static_cast<double>(total_charge) / static_cast<double>(games)
                : 0.0;
  j["max_charge_per_game"] = max_charge;
  write_file(out_dir / "summary.json", j.dump(2) + "\n");
  if (write_transcript) {
    write_file(out_dir / "transcript.tsv", first_transcript);
  }
  log += "win_rate=" + fmt(wilson.estimate) + " [" + fmt(wilson.low) + ", " +
         fmt(wilson.high) + "]\n";

  Outcome out;
  if (wilson.estimate > max_win_rate) {
    out.exit_code = 1;
    out.failure = "win rate " + fmt(wilson.estimate) + " exceeds max " +
                  fmt(max_win_rate);
  }
  return out;
}

Outcome run_fairness(const ExperimentConfig& cfg, const Resolved& r,
                     std::uint64_t seed, const std::filesystem::path& out_dir,
                     std::string& log) {
  const std::uint64_t trials = cfg.get_int("fairness.trials", 10000);
  const double min_p = cfg.get_num("fairness.min_p", 0.001);
  auto bundle = make_dataset(cfg, r.params, seed, 0);
  if (!bundle.planted_query) {
    throw ConfigError{"fairness kind needs dataset.source=planted"};
  }
  const std::uint64_t setup_seed =
      RngStream::word_at(seed, stream_id("setup", 0), 0);
  FairIndex fi(bundle.data, r.params, setup_seed, r.fair);
  const auto rep = fairness_test(
      [&](const Point& q, RngStream& rng) -> std::optional<PointId> {
        const FairAnswer a = fi.query(q, rng);
        if (a.outcome != QueryOutcome::kFound) return std::nullopt;
        return a.id;
      },
      *bundle.data, *bundle.planted_query, r.params.r, trials, seed);

  std::ostringstream csv;
  csv << csv_header(seed, r) << "ball_id,count\n";
  for (std::size_t i = 0; i < rep.ball_ids.size(); ++i) {
    csv << rep.ball_ids[i] << ',' << rep.counts[i] << '\n';
  }
  write_file(out_dir / "fairness.csv", csv.str());

  json j = base_summary(seed, r);
  j["kind"] = cfg.kind;
  j["trials"] = trials;
  j["skipped"] = rep.skipped;
  j["ball_size"] = rep.ball_ids.size();
  j["bottoms"] = rep.bottoms;
  j["invalid"] = rep.invalid;
  j["chi_square"] = rep.chi.statistic;
  j["dof"] = rep.chi.dof;
  j["p_value"] = rep.chi.p_value;
  write_file(out_dir / "summary.json", j.dump(2) + "\n");
  log += "p_value=" + fmt(rep.chi.p_value) + "\n";

  Outcome out;
  if (rep.skipped) {
    log += "fairness test skipped: empty ball\n";
  } else if (rep.chi.p_value <= min_p || rep.invalid > 0) {
    out.exit_code = 1;
    out.failure = "fairness rejected: p=" + fmt(rep.chi.p_value) +
                  " invalid=" + std::to_string(rep.invalid);
  }
  return out;
}

Outcome run_beta_curve(const ExperimentConfig& cfg, const Resolved& r,
                       std::uint64_t seed,
                       const std::filesystem::path& out_dir,
                       std::string& log) {
  const double c_min = cfg.get_num("beta.c_min", 2.0);
  const double c_max = cfg.get_num("beta.c_max", 100.0);
  const double step = cfg.get_num("beta.step", 1.0);
  if (!(c_min > 1.0) || !(c_max >= c_min) || !(step > 0.0)) {
    throw ConfigError{"beta range needs c_min > 1, c_max >= c_min, step > 0"};
  }
  const std::string rho = cfg.get("beta.rho", "both");
  std::vector<RhoFn> fns;
  if (rho == "both") {
    fns = {RhoFn::kHammingOpt, RhoFn::kL2Opt};
  } else {
    const auto fn = rho_fn_from_name(rho);
    if (!fn) throw ConfigError{"unknown beta.rho '" + rho + "'"};
    fns = {*fn};
  }

  std::ostringstream csv;
  csv << csv_header(seed, r) << "rho_fn,c,k_star,beta,crossover_k\n";
  std::uint64_t rows = 0;
  for (const RhoFn fn : fns) {
    for (double c = c_min; c <= c_max + 1e-12; c += step) {
      const auto rep = exponent_optimize(c, fn);
      csv << rho_fn_name(fn) << ',' << fmt(c) << ',' << rep.k_star << ','
          << fmt(rep.beta) << ',' << fmt(rep.crossover_k) << '\n';
      ++rows;
    }
  }
  write_file(out_dir / "beta.csv", csv.str());

  json j = base_summary(seed, r);
  j["kind"] = cfg.kind;
  j["rows"] = rows;
  write_file(out_dir / "summary.json", j.dump(2) + "\n");
  log += "rows=" + std::to_string(rows) + "\n";
  return {};
}

Outcome run_forall(const ExperimentConfig& cfg, const Resolved& r,
                   std::uint64_t seed, const std::filesystem::path& out_dir,
                   std::string& log) {
  const auto d = static_cast<std::size_t>(cfg.get_int("forall.d", 8));
  const auto n = static_cast<std::size_t>(cfg.get_int("forall.n", 32));
  const std::uint64_t builds = cfg.get_int("forall.builds", 100);
  const std::uint64_t min_correct = cfg.get_int("forall.min_correct", 0);
  if (d > 20) throw ConfigError{"forall.d > 20 is not a desk-scale run"};

  std::ostringstream csv;
  csv << csv_header(seed, r) << "build,wrong_queries\n";
  std::uint64_t correct_builds = 0;
  for (std::uint64_t b = 0; b < builds; ++b) {
    RngStream rng = derive_stream(seed, "forall-data", b);
    auto ds = random_hamming_dataset(n, d, rng);
    ProblemParams params = r.params;
    params.mode = SpaceMode::kHamming;
    ForAllHammingIndex idx(ds, params, r.forall,
                           RngStream::word_at(seed, stream_id("forall", b), 0));
    std::uint64_t wrong = 0;
    std::vector<int> bits(d, 0);
    const std::uint64_t total = 1ULL << d;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      for (std::size_t i = 0; i < d; ++i) bits[i] = (mask >> i) & 1;
      const Point q = Point::hamming(bits);
      const auto hit = idx.query(q);
      const auto v = oracle_ann_verdicts(*ds, q, params);
      const bool ok = hit ? v.point_correct(*hit) : v.bottom_correct();
      wrong += !ok;
    }
    correct_builds += wrong == 0;
    csv << b << ',' << wrong << '\n';
  }
  write_file(out_dir / "forall.csv", csv.str());

  json j = base_summary(seed, r);
  j["kind"] = cfg.kind;
  j["builds"] = builds;
  j["correct_builds"] = correct_builds;
  write_file(out_dir / "summary.json", j.dump(2) + "\n");
  log += "correct_builds=" + std::to_string(correct_builds) + "/" +
         std::to_string(builds) + "\n";

  Outcome out;
  if (correct_builds < min_correct) {
    out.exit_code = 1;
    out.failure = "only " + std::to_string(correct_builds) +
                  " fully correct builds, needed " +
                  std::to_string(min_correct);
  }
  return out;
}

int run_experiment(const std::string& config_path,
                   std::optional<std::uint64_t> seed_override,
                   const std::string& out_dir_arg, std::string& out,
                   std::string& err) {
  std::ifstream in(config_path);
  if (!in) {
    err = "cannot open config: " + config_path + "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  ExperimentConfig cfg;
  try {
    cfg = parse_config(buf.str());
  } catch (const ConfigError& e) {
    err = "config error: " + e.message + "\n";
    return 2;
  }

  const std::filesystem::path out_dir =
      out_dir_arg.empty() ? std::filesystem::path(".")
                          : std::filesystem::path(out_dir_arg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  try {
    const Resolved r = resolve(cfg);
    const std::uint64_t seed =
        seed_override ? *seed_override : cfg.get_int("run.seed", 0);
    Outcome outcome;
    if (cfg.kind == "game" || cfg.kind == "decider-accuracy") {
      outcome = run_games(cfg, r, seed, out_dir, out);
    } else if (cfg.kind == "fairness") {
      outcome = run_fairness(cfg, r, seed, out_dir, out);
    } else if (cfg.kind == "beta-curve") {
      outcome = run_beta_curve(cfg, r, seed, out_dir, out);
    } else if (cfg.kind == "forall-exhaustive") {
      outcome = run_forall(cfg, r, seed, out_dir, out);
    }
    if (outcome.exit_code != 0) {
      write_file(out_dir / "FAILED", outcome.failure + "\n");
      err = "experiment failed: " + outcome.failure + "\n";
    }
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    err = "config error: " + e.message + "\n";
    return 2;
  } catch (const std::exception& e) {
    write_file(out_dir / "FAILED", std::string(e.what()) + "\n");
    err = std::string("experiment error: ") + e.what() + "\n";
    return 1;
  }
}

constexpr const char* kSchemaText = R"(robann experiment outputs

summary.json     every kind; fields: version, seed, constants (the resolved
                 override table), plus per-kind results documented below.
FAILED           written next to partial outputs when an experiment fails.

kind = game | decider-accuracy
  summary.json   games, rounds, adversary_wins, win_rate, win_rate_ci_low,
                 win_rate_ci_high (95% Wilson), mean/max charge per game
  transcript.tsv game 0, one row per round:
                 round, query, answer, verdict(ok|wrong), charge

kind = fairness
  fairness.csv   columns: ball_id, count  (per oracle-ball member)
  summary.json   trials, ball_size, bottoms, invalid, chi_square, dof, p_value

kind = beta-curve
  beta.csv       columns: rho_fn, c, k_star, beta, crossover_k
                 beta = min over integer k of max(rho(c^(1/k)), 1/k)

kind = forall-exhaustive
  forall.csv     columns: build, wrong_queries (over all 2^d queries)
  summary.json   builds, correct_builds

CSV files start with '#' comment lines carrying version, seed, and the
resolved constants; numbers use shortest round-trip formatting, so equal
seeds reproduce byte-identical files.

config file: 'key = value' lines under [sections]; see the project README
for the full key list. Unknown keys are rejected.
)";

}  // namespace

int run_cli(const std::vector<std::string>& args, std::string& out,
            std::string& err) {
  const auto usage = [&] {
    err +=
        "usage:\n"
        "  robann run <config> [--seed N] [--out DIR]\n"
        "  robann beta --c-min A --c-max B [--step S] [--rho FN] [--out DIR]\n"
        "  robann schema\n";
    return 2;
  };
  if (args.empty()) return usage();
  const std::string& cmd = args[0];

  if (cmd == "schema") {
    out += kSchemaText;
    return 0;
  }

  if (cmd == "run") {
    if (args.size() < 2) return usage();
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    for (std::size_t i = 2; i < args.size(); ++i) {
      if (args[i] == "--seed" && i + 1 < args.size()) {
        try {
          seed = std::stoull(args[++i]);
        } catch (const std::exception&) {
          err = "config error: --seed expects an integer\n";
          return 2;
        }
      } else if (args[i] == "--out" && i + 1 < args.size()) {
        out_dir = args[++i];
      } else {
        err = "unknown option '" + args[i] + "'\n";
        return 2;
      }
    }
    return run_experiment(args[1], seed, out_dir, out, err);
  }

  if (cmd == "beta") {
    double c_min = 0.0;
    double c_max = 0.0;
    double step = 1.0;
    std::string rho = "both";
    std::string out_dir;
    for (std::size_t i = 1; i < args.size(); ++i) {
      auto next_num = [&](double& target) {
        if (i + 1 >= args.size()) throw ConfigError{"missing value for " + args[i]};
        try {
          target = std::stod(args[i + 1]);
        } catch (const std::exception&) {
          throw ConfigError{"bad number for " + args[i]};
        }
        ++i;
      };
      try {
        if (args[i] == "--c-min") {
          next_num(c_min);
        } else if (args[i] == "--c-max") {
          next_num(c_max);
        } else if (args[i] == "--step") {
          next_num(step);
        } else if (args[i] == "--rho" && i + 1 < args.size()) {
          rho = args[++i];
        } else if (args[i] == "--out" && i + 1 < args.size()) {
          out_dir = args[++i];
        } else {
          err = "unknown option '" + args[i] + "'\n";
          return 2;
        }
      } catch (const ConfigError& e) {
        err = "config error: " + e.message + "\n";
        return 2;
      }
    }
    std::ostringstream cfg_text;
    cfg_text << "kind = beta-curve\n[beta]\nc_min = " << c_min
             << "\nc_max = " << c_max << "\nstep = " << step
             << "\nrho = " << rho << "\n";
    // stage the synthesized config through the normal path
    const auto tmp =
        std::filesystem::temp_directory_path() /
        ("robann-beta-" + std::to_string(RngStream::word_at(
                              static_cast<std::uint64_t>(c_min * 1000), 0,
                              static_cast<std::uint64_t>(c_max * 1000))) +
         ".cfg");
    write_file(tmp, cfg_text.str());
    const int rc = run_experiment(tmp.string(), std::nullopt, out_dir, out, err);
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    return rc;
  }

  return usage();
}

}  // namespace cli
}  // namespace robann
