// chainorder command-line tool. Every subcommand goes through the C API.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainorder/chainorder.h"
#include "config.hpp"

namespace {

using cli::Config;
using cli::ConfigError;

class ApiError : public std::runtime_error {
 public:
  ApiError(co_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  co_status status;
};

void check(co_status s, const std::string& context) {
  if (s != CO_OK) throw ApiError(s, context + ": [" + co_status_name(s) + "] " + co_last_error());
}

struct DatasetDeleter {
  void operator()(co_dataset* d) const { co_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(co_model* m) const { co_model_free(m); }
};
using DatasetPtr = std::unique_ptr<co_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<co_model, ModelDeleter>;

DatasetPtr load_dataset(const std::string& path) {
  co_dataset* d = nullptr;
  check(co_dataset_load(path.c_str(), &d), "loading dataset '" + path + "'");
  return DatasetPtr(d);
}

ModelPtr load_model(const std::string& path) {
  co_model* m = nullptr;
  check(co_model_load(path.c_str(), &m), "loading model '" + path + "'");
  return ModelPtr(m);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::size_t> read_indices(const std::string& path) {
  std::size_t n = 0;
  check(co_index_file_read(path.c_str(), nullptr, 0, &n), "reading '" + path + "'");
  std::vector<std::size_t> v(n);
  check(co_index_file_read(path.c_str(), v.data(), v.size(), &n), "reading '" + path + "'");
  return v;
}

std::optional<std::string> read_header(const std::string& path, const std::string& key) {
  char buf[256];
  int found = 0;
  check(co_index_file_header(path.c_str(), key.c_str(), buf, sizeof buf, &found), "reading '" + path + "'");
  if (!found) return std::nullopt;
  return std::string(buf);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ApiError(CO_ERR_IO, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw ApiError(CO_ERR_IO, "failed writing '" + path + "'");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text(path, text);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

const std::vector<std::string> kKnownKeys = {
    "seed",
    "gen.family", "gen.n", "gen.radius", "gen.angular_step", "gen.noise_sd", "gen.decay", "gen.angle",
    "gen.scale", "gen.offset", "gen.dim", "gen.flip_prob", "gen.matrix", "gen.x0", "gen.shuffle",
    "model.hidden", "model.dropout",
    "train.batch_size", "train.overlap", "train.refresh_period", "train.steps", "train.num_starts",
    "train.learning_rate", "train.beta1", "train.beta2", "train.epsilon",
    "order.method", "order.starts",
    "eval.seeds", "eval.methods", "eval.name",
    "oneshot.way", "oneshot.k", "oneshot.episodes", "oneshot.queries",
    "output.dir",
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Config load_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  cfg.reject_unknown(kKnownKeys);
  if (cfg.has("eval.seeds") && cli::split_list(cfg.get_string("eval.seeds", "")).empty())
    throw ConfigError("eval.seeds", "seed list must not be empty");
  cfg.get_sizes("eval.seeds", {});
  return cfg;
}

std::uint64_t resolve_seed(const Common& c, const Config& cfg) {
  if (c.seed) return *c.seed;
  return cfg.get_u64("seed", 0);
}

void add_common(CLI::App* app, Common& c, bool out_required) {
  app->add_option("--config", c.config_path, "key = value config file");
  app->add_option("--seed", c.seed, "master seed");
  auto* o = app->add_option("--out", c.out, "output path");
  if (out_required) o->required();
}

// ---- gen ------------------------------------------------------------------

int cmd_gen(const Common& c) {
  const Config cfg = load_config(c);
  const std::uint64_t seed = resolve_seed(c, cfg);
  const std::string family = cfg.get_string("gen.family", "rotation");
  const std::size_t n = cfg.get_size("gen.n", 64);
  if (n < 2) throw ConfigError("gen.n", "at least 2 instances are required");
  const double radius = cfg.get_double("gen.radius", 1.0);
  const std::uint64_t gen_seed = co_derive_seed(seed, "gen");

  co_dataset* raw = nullptr;
  if (family == "rotation") {
    const double step = cfg.get_double("gen.angular_step", 2.0 * std::numbers::pi / static_cast<double>(n));
    const double noise = cfg.get_double("gen.noise_sd", 0.02 * radius);
    if (noise < 0) throw ConfigError("gen.noise_sd", "must be non-negative");
    check(co_gen_rotation(n, radius, step, noise, gen_seed, &raw), "gen.family=rotation");
  } else if (family == "spiral") {
    const double decay = cfg.get_double("gen.decay", 0.95);
    const double angle = cfg.get_double("gen.angle", 2.0 * std::numbers::pi / 16.0);
    const double noise = cfg.get_double("gen.noise_sd", 0.0);
    if (noise < 0) throw ConfigError("gen.noise_sd", "must be non-negative");
    const double a[4] = {decay * std::cos(angle), -decay * std::sin(angle), decay * std::sin(angle),
                         decay * std::cos(angle)};
    const std::vector<double> x0 = cfg.get_doubles("gen.x0", {radius, 0.0});
    if (x0.size() != 2) throw ConfigError("gen.x0", "spiral needs a 2-D start");
    check(co_gen_linear(n, 2, a, x0.data(), noise, gen_seed, &raw), "gen.family=spiral");
  } else if (family == "linear") {
    const std::vector<double> x0 = cfg.get_doubles("gen.x0", {});
    if (x0.empty()) throw ConfigError("gen.x0", "required for the linear family");
    const std::vector<double> a = cfg.get_doubles("gen.matrix", {});
    if (a.size() != x0.size() * x0.size())
      throw ConfigError("gen.matrix", "expected " + std::to_string(x0.size() * x0.size()) + " row-major entries");
    const double noise = cfg.get_double("gen.noise_sd", 0.0);
    if (noise < 0) throw ConfigError("gen.noise_sd", "must be non-negative");
    check(co_gen_linear(n, x0.size(), a.data(), x0.data(), noise, gen_seed, &raw), "gen.family=linear");
  } else if (family == "bitflip") {
    const std::size_t dim = cfg.get_size("gen.dim", 16);
    const double q = cfg.get_double("gen.flip_prob", 0.05);
    if (!(q > 0.0 && q < 0.5)) throw ConfigError("gen.flip_prob", "must lie in (0, 0.5)");
    check(co_gen_bitflip(n, dim, q, gen_seed, &raw), "gen.family=bitflip");
  } else {
    throw ConfigError("gen.family", "unknown family '" + family + "' (rotation, spiral, linear, bitflip)");
  }
  DatasetPtr ordered(raw);

  const std::size_t dim = co_dataset_dim(ordered.get());
  if (cfg.has("gen.scale")) {
    const std::vector<double> s = cfg.get_doubles("gen.scale", {});
    if (s.size() != dim) throw ConfigError("gen.scale", "expected " + std::to_string(dim) + " entries");
    check(co_dataset_scale(ordered.get(), s.data(), s.size()), "gen.scale");
  }
  if (cfg.has("gen.offset")) {
    const std::vector<double> o = cfg.get_doubles("gen.offset", {});
    if (o.size() != dim) throw ConfigError("gen.offset", "expected " + std::to_string(dim) + " entries");
    check(co_dataset_translate(ordered.get(), o.data(), o.size()), "gen.offset");
  }

  std::vector<std::size_t> truth(n);
  DatasetPtr out;
  if (cfg.get_bool("gen.shuffle", true)) {
    co_dataset* shuffled = nullptr;
    check(co_shuffle(ordered.get(), co_derive_seed(seed, "shuffle"), &shuffled), "shuffling");
    out.reset(shuffled);
    check(co_dataset_truth(out.get(), truth.data(), n), "truth");
  } else {
    for (std::size_t i = 0; i < n; ++i) truth[i] = i;
    out = std::move(ordered);
  }
  check(co_dataset_save(out.get(), c.out.c_str()), "writing '" + c.out + "'");
  const std::string truth_path = c.out + ".truth";
  check(co_index_file_write(truth_path.c_str(), truth.data(), n, nullptr, nullptr, 0), "writing truth");
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainFlags {
  std::string data;
  std::string history;
  std::size_t steps = 0;
  CLI::Option* steps_opt = nullptr;
};

int cmd_train(const Common& c, const TrainFlags& f) {
  const Config cfg = load_config(c);
  const std::uint64_t seed = resolve_seed(c, cfg);
  DatasetPtr data = load_dataset(f.data);

  co_train_config tc;
  co_train_config_default(&tc);
  const std::vector<std::size_t> hidden = cfg.get_sizes("model.hidden", {32});
  for (std::size_t h : hidden)
    if (h == 0) throw ConfigError("model.hidden", "layer widths must be positive");
  tc.hidden_sizes = hidden.data();
  tc.num_hidden = hidden.size();
  tc.dropout_rate = cfg.get_double("model.dropout", tc.dropout_rate);
  tc.batch_size = cfg.get_size("train.batch_size", tc.batch_size);
  tc.overlap = cfg.get_size("train.overlap", tc.overlap);
  tc.refresh_period = cfg.get_size("train.refresh_period", tc.refresh_period);
  tc.total_steps = f.steps_opt->count() ? f.steps : cfg.get_size("train.steps", tc.total_steps);
  tc.num_starts = cfg.get_size("train.num_starts", tc.num_starts);
  tc.learning_rate = cfg.get_double("train.learning_rate", tc.learning_rate);
  tc.beta1 = cfg.get_double("train.beta1", tc.beta1);
  tc.beta2 = cfg.get_double("train.beta2", tc.beta2);
  tc.epsilon = cfg.get_double("train.epsilon", tc.epsilon);
  tc.seed = co_derive_seed(seed, "train");

  std::vector<co_train_record> history(tc.total_steps);
  co_model* raw = nullptr;
  std::size_t failed_step = 0;
  const co_status st = co_train(data.get(), &tc, &raw, history.data(), history.size(), &failed_step);
  if (st == CO_ERR_CONFIG) throw ConfigError("train", co_last_error());
  if (st == CO_ERR_TRAINING)
    throw ApiError(st, "training aborted at step " + std::to_string(failed_step) + ": " + co_last_error());
  check(st, "training");
  ModelPtr model(raw);

  check(co_model_save(model.get(), c.out.c_str()), "writing model");
  const std::string hist_path = f.history.empty() ? c.out + ".history.csv" : f.history;
  check(co_history_write(hist_path.c_str(), history.data(), history.size()), "writing history");
  return 0;
}

// ---- order ----------------------------------------------------------------

struct OrderFlags {
  std::string model, data, method;
  std::size_t starts = 0;
  bool timing = false;
};

int cmd_order(const Common& c, const OrderFlags& f) {
  const Config cfg = load_config(c);
  const std::uint64_t seed = resolve_seed(c, cfg);
  ModelPtr model = load_model(f.model);
  DatasetPtr data = load_dataset(f.data);

  const std::string method = f.method.empty() ? cfg.get_string("order.method", "greedy") : f.method;
  co_order_method m;
  if (method == "greedy")
    m = CO_ORDER_GREEDY;
  else if (method == "sampled")
    m = CO_ORDER_SAMPLED;
  else if (method == "brute")
    m = CO_ORDER_BRUTE;
  else
    throw ConfigError("order.method", "unknown method '" + method + "' (greedy, sampled, brute)");
  const std::size_t starts = f.starts ? f.starts : cfg.get_size("order.starts", 0);
  if (m == CO_ORDER_SAMPLED && starts == 0) throw ConfigError("order.starts", "sampled ordering needs --starts >= 1");

  const std::size_t n = co_dataset_size(data.get());
  std::vector<std::size_t> order(n);
  double ll = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  check(co_order(model.get(), data.get(), m, starts, seed, order.data(), &ll), "ordering");
  const double ms = elapsed_ms(t0);

  std::vector<std::string> keys{"log_likelihood", "method", "seed"};
  std::vector<std::string> values{fmt(ll), method, std::to_string(seed)};
  if (f.timing) {
    keys.push_back("wall_time_ms");
    values.push_back(fmt(ms));
  }
  std::vector<const char*> kp, vp;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    kp.push_back(keys[i].c_str());
    vp.push_back(values[i].c_str());
  }
  check(co_index_file_write(c.out.c_str(), order.data(), n, kp.data(), vp.data(), kp.size()), "writing order");
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalFlags {
  std::string order, truth, data, name;
  bool timing = false;
};

int cmd_eval(const Common& c, const EvalFlags& f) {
  const Config cfg = load_config(c);
  const std::vector<std::size_t> order = read_indices(f.order);
  const std::vector<std::size_t> truth = read_indices(f.truth);
  if (order.size() != truth.size())
    throw ApiError(CO_ERR_SIZE, "order has " + std::to_string(order.size()) + " entries, truth has " +
                                    std::to_string(truth.size()));
  const std::string name = f.name.empty() ? cfg.get_string("eval.name", "dataset") : f.name;
  std::string seed = std::to_string(resolve_seed(c, cfg));
  if (!c.seed)
    if (auto s = read_header(f.order, "seed")) seed = *s;
  const std::string method = read_header(f.order, "method").value_or("learned");
  const std::string wall = read_header(f.order, "wall_time_ms").value_or("0");

  std::ostringstream os;
  os << "dataset,method,seed,tau_forward,tau_reverse,tau_best,wall_time_ms\n";
  co_order_report r;
  check(co_evaluate_order(truth.data(), order.data(), order.size(), &r), "evaluating order");
  os << name << ",ordernet-" << method << ',' << seed << ',' << fmt(r.tau_forward) << ',' << fmt(r.tau_reverse) << ','
     << fmt(r.tau_best) << ',' << wall << '\n';

  if (!f.data.empty()) {
    DatasetPtr data = load_dataset(f.data);
    const std::size_t n = co_dataset_size(data.get());
    if (n != truth.size())
      throw ApiError(CO_ERR_SIZE, "dataset has " + std::to_string(n) + " rows, truth has " +
                                      std::to_string(truth.size()));
    std::vector<std::size_t> nn(n);
    const auto t0 = std::chrono::steady_clock::now();
    check(co_nn_order(data.get(), nn.data()), "nearest-neighbour order");
    const double ms = f.timing ? elapsed_ms(t0) : 0.0;
    check(co_evaluate_order(truth.data(), nn.data(), n, &r), "evaluating baseline");
    os << name << ",nn," << seed << ',' << fmt(r.tau_forward) << ',' << fmt(r.tau_reverse) << ',' << fmt(r.tau_best)
       << ',' << (f.timing ? fmt(ms) : std::string("0")) << '\n';
  }
  emit(c.out, os.str());
  return 0;
}

// ---- propagate ------------------------------------------------------------

struct PropagateFlags {
  std::string model, data;
  std::size_t start = 0, steps = 10;
  bool no_revisit = false;
};

int cmd_propagate(const Common& c, const PropagateFlags& f) {
  load_config(c);
  ModelPtr model = load_model(f.model);
  DatasetPtr data = load_dataset(f.data);
  const std::size_t n = co_dataset_size(data.get());
  if (f.start >= n)
    throw ApiError(CO_ERR_INVALID_ARGUMENT,
                   "start index " + std::to_string(f.start) + " out of range for " + std::to_string(n) + " instances");
  if (f.steps == 0) throw ApiError(CO_ERR_INVALID_ARGUMENT, "--steps must be at least 1");

  std::vector<std::size_t> learned(f.steps + 1), euclid(f.steps + 1);
  std::size_t ln = 0, en = 0;
  int lt = 0, et = 0;
  const int revisit = f.no_revisit ? 0 : 1;
  check(co_propagate(model.get(), data.get(), f.start, f.steps, revisit, learned.data(), &ln, &lt), "propagating");
  check(co_propagate(nullptr, data.get(), f.start, f.steps, revisit, euclid.data(), &en, &et), "propagating");

  std::ostringstream os;
  os << "step,learned,euclidean\n";
  for (std::size_t i = 0; i < std::max(ln, en); ++i) {
    os << i << ',';
    if (i < ln) os << learned[i];
    os << ',';
    if (i < en) os << euclid[i];
    os << '\n';
  }
  emit(c.out, os.str());
  return 0;
}

// ---- oneshot --------------------------------------------------------------

struct OneshotFlags {
  std::string model, classes, episodes_out;
  std::size_t way = 0, k = 0, episodes = 0, queries = 0;
  CLI::Option *way_opt = nullptr, *k_opt = nullptr, *episodes_opt = nullptr, *queries_opt = nullptr;
};

struct QueryRows {
  std::ostringstream os;
};

void on_query(void* user, size_t episode, uint64_t episode_seed, size_t query, const double* scores, size_t way,
              size_t prediction, size_t truth) {
  auto& os = static_cast<QueryRows*>(user)->os;
  os << episode << ',' << episode_seed << ',' << query;
  for (std::size_t c = 0; c < way; ++c) os << ',' << fmt(scores[c]);
  os << ',' << prediction << ',' << truth << '\n';
}

int cmd_oneshot(const Common& c, const OneshotFlags& f) {
  const Config cfg = load_config(c);
  const std::uint64_t seed = resolve_seed(c, cfg);
  ModelPtr model = load_model(f.model);

  co_oneshot_config oc;
  oc.way = f.way_opt->count() ? f.way : cfg.get_size("oneshot.way", 5);
  oc.chain_length = f.k_opt->count() ? f.k : cfg.get_size("oneshot.k", 5);
  oc.episodes = f.episodes_opt->count() ? f.episodes : cfg.get_size("oneshot.episodes", 100);
  oc.queries_per_class = f.queries_opt->count() ? f.queries : cfg.get_size("oneshot.queries", 5);
  oc.seed = seed;
  if (oc.way == 0) throw ConfigError("oneshot.way", "must be at least 1");
  if (oc.episodes == 0) throw ConfigError("oneshot.episodes", "must be at least 1");

  const std::vector<std::string> paths = cli::split_list(f.classes);
  if (paths.size() < oc.way)
    throw ApiError(CO_ERR_EPISODE, std::to_string(oc.way) + "-way episodes need at least " + std::to_string(oc.way) +
                                       " class files, got " + std::to_string(paths.size()));
  std::vector<DatasetPtr> owned;
  std::vector<const co_dataset*> classes;
  for (const std::string& p : paths) {
    owned.push_back(load_dataset(p));
    classes.push_back(owned.back().get());
  }

  QueryRows rows;
  rows.os << "episode,seed,query";
  for (std::size_t i = 0; i < oc.way; ++i) rows.os << ",ll_" << i;
  rows.os << ",prediction,truth\n";
  double mean = 0.0, sd = 0.0;
  check(co_oneshot(model.get(), classes.data(), classes.size(), &oc, on_query, &rows, &mean, &sd), "one-shot");

  std::ostringstream os;
  os << "way,k,episodes,mean_accuracy,std_accuracy\n";
  os << oc.way << ',' << oc.chain_length << ',' << oc.episodes << ',' << fmt(mean) << ',' << fmt(sd) << '\n';
  emit(c.out, os.str());
  std::string ep_path = f.episodes_out;
  if (ep_path.empty() && !c.out.empty() && c.out != "-") ep_path = c.out + ".episodes.csv";
  if (!ep_path.empty()) write_text(ep_path, rows.os.str());
  return 0;
}

// ---- gradcheck ------------------------------------------------------------

struct GradcheckFlags {
  std::size_t dim = 4, trials = 20;
  std::string kind = "continuous";
  bool corrupt = false;
};

constexpr double kGradcheckTolerance = 1e-4;

int cmd_gradcheck(const Common& c, const GradcheckFlags& f) {
  const Config cfg = load_config(c);
  const std::uint64_t seed = resolve_seed(c, cfg);
  co_state_kind kind;
  if (f.kind == "continuous")
    kind = CO_CONTINUOUS;
  else if (f.kind == "binary")
    kind = CO_BINARY;
  else
    throw ApiError(CO_ERR_INVALID_ARGUMENT, "--kind must be continuous or binary");
  double err = 0.0;
  check(co_gradcheck(kind, f.dim, f.trials, co_derive_seed(seed, "gradcheck"), f.corrupt ? 1 : 0, &err), "gradcheck");
  const bool pass = err < kGradcheckTolerance;
  std::ostringstream os;
  os << "kind=" << f.kind << " dim=" << f.dim << " trials=" << f.trials << " max_relative_error=" << fmt(err)
     << " status=" << (pass ? "pass" : "fail") << '\n';
  emit(c.out, os.str());
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover generation orders of unordered data with a learned Markov transition operator."};
  app.require_subcommand(1);

  Common common;

  auto* gen = app.add_subcommand("gen", "generate a shuffled synthetic dataset and its truth sidecar");
  add_common(gen, common, true);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "train a transition model with batch-wise permutation training");
  add_common(train, common, true);
  train->add_option("--data", tf.data, "dataset CSV")->required();
  train->add_option("--history", tf.history, "history CSV (default <out>.history.csv)");
  tf.steps_opt = train->add_option("--steps", tf.steps, "total training steps");

  OrderFlags of;
  auto* order = app.add_subcommand("order", "recover the most probable order of a dataset");
  add_common(order, common, true);
  order->add_option("--model", of.model, "model file")->required();
  order->add_option("--data", of.data, "dataset CSV")->required();
  order->add_option("--method", of.method, "greedy | sampled | brute");
  order->add_option("--starts", of.starts, "number of sampled starts");
  order->add_flag("--timing", of.timing, "record wall time in the order file");

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Kendall tau-b of a recovered order against the truth");
  add_common(eval, common, false);
  eval->add_option("--order", ef.order, "order file")->required();
  eval->add_option("--truth", ef.truth, "truth file")->required();
  eval->add_option("--data", ef.data, "dataset CSV, adds the nearest-neighbour baseline row");
  eval->add_option("--name", ef.name, "dataset label for the report");
  eval->add_flag("--timing", ef.timing, "measure the baseline's wall time");

  PropagateFlags pf;
  auto* prop = app.add_subcommand("propagate", "most-probable-successor walk, learned vs Euclidean");
  add_common(prop, common, false);
  prop->add_option("--model", pf.model, "model file")->required();
  prop->add_option("--data", pf.data, "dataset CSV")->required();
  prop->add_option("--start", pf.start, "start index");
  prop->add_option("--steps", pf.steps, "number of moves");
  prop->add_flag("--no-revisit", pf.no_revisit, "never return to a visited instance");

  OneshotFlags osf;
  auto* oneshot = app.add_subcommand("oneshot", "generative one-shot classification benchmark");
  add_common(oneshot, common, false);
  oneshot->add_option("--model", osf.model, "model file")->required();
  oneshot->add_option("--classes", osf.classes, "comma-separated class dataset files")->required();
  osf.way_opt = oneshot->add_option("--way", osf.way, "classes per episode");
  osf.k_opt = oneshot->add_option("--k", osf.k, "chain length");
  osf.episodes_opt = oneshot->add_option("--episodes", osf.episodes, "number of episodes");
  osf.queries_opt = oneshot->add_option("--queries", osf.queries, "queries per class");
  oneshot->add_option("--episodes-out", osf.episodes_out, "per-query CSV (default <out>.episodes.csv)");

  GradcheckFlags gf;
  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the log-transition gradient");
  add_common(grad, common, false);
  grad->add_option("--dim", gf.dim, "state dimension (at most 8)");
  grad->add_option("--kind", gf.kind, "continuous | binary");
  grad->add_option("--trials", gf.trials, "random (model, s, s') triples");
  grad->add_flag("--corrupt", gf.corrupt, "perturb the analytic gradient (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return cmd_gen(common);
    if (*train) return cmd_train(common, tf);
    if (*order) return cmd_order(common, of);
    if (*eval) return cmd_eval(common, ef);
    if (*prop) return cmd_propagate(common, pf);
    if (*oneshot) return cmd_oneshot(common, osf);
    if (*grad) return cmd_gradcheck(common, gf);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
