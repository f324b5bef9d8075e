#include "chainorder/transition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2*pi)

double sigmoid(double x) { return apply_activation(Activation::sigmoid, x); }

bool log_variance_clamped(double raw) { return raw < kLogVarianceMin || raw > kLogVarianceMax; }

double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

void check_kind(const GatedTransitionNet& net, StateView s, const char* what) {
  if (s.kind != net.kind())
    fail(ErrorCode::kind, std::string(what) + " is " + std::string(kind_name(s.kind)) + " but the model is " +
                              std::string(kind_name(net.kind())));
  if (s.dim() != net.state_dim())
    fail(ErrorCode::shape, std::string(what) + " has dimension " + std::to_string(s.dim()) +
                               ", model expects " + std::to_string(net.state_dim()));
}

}  // namespace

GatedTransitionNet::GatedTransitionNet(TransitionArchitecture arch, Rng& rng) : arch_(std::move(arch)) {
  build_layout();
  params_.assign(offsets_[4], 0.0);
  encoder_.init(mutable_block(0), rng);
  gate_.init(mutable_block(1), rng);
  candidate_.init(mutable_block(2), rng);
  if (has_variance_head()) variance_.init(mutable_block(3), rng);
}

GatedTransitionNet::GatedTransitionNet(TransitionArchitecture arch, std::vector<double> params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  build_layout();
  if (params_.size() != offsets_[4])
    fail(ErrorCode::dimension, "parameter vector has " + std::to_string(params_.size()) +
                                   " entries, architecture needs " + std::to_string(offsets_[4]));
}

void GatedTransitionNet::build_layout() {
  if (arch_.state_dim == 0) fail(ErrorCode::shape, "state dimension must be at least 1");
  if (arch_.hidden_sizes.empty()) fail(ErrorCode::shape, "the encoder needs at least one hidden layer");
  std::vector<std::size_t> sizes{arch_.state_dim};
  sizes.insert(sizes.end(), arch_.hidden_sizes.begin(), arch_.hidden_sizes.end());
  // The encoder's last activation is hidden from the whole net's point of view,
  // so dropout covers it as well.
  encoder_ = Mlp::chain(sizes, Activation::relu, Activation::relu, arch_.dropout_rate, true);
  const std::size_t h = encoder_.output_dim();
  const std::size_t p = arch_.state_dim;
  gate_ = Mlp({{h, p, Activation::sigmoid}});
  candidate_ = Mlp({{h, p, Activation::identity}});
  variance_ = has_variance_head() ? Mlp({{h, p, Activation::identity}}) : Mlp();
  offsets_[0] = 0;
  offsets_[1] = offsets_[0] + encoder_.param_count();
  offsets_[2] = offsets_[1] + gate_.param_count();
  offsets_[3] = offsets_[2] + candidate_.param_count();
  offsets_[4] = offsets_[3] + variance_.param_count();
}

std::span<const double> GatedTransitionNet::block(std::size_t which) const {
  return std::span<const double>(params_).subspan(offsets_[which], offsets_[which + 1] - offsets_[which]);
}

std::span<double> GatedTransitionNet::mutable_block(std::size_t which) {
  ++version_;
  return std::span<double>(params_).subspan(offsets_[which], offsets_[which + 1] - offsets_[which]);
}

TransitionStats transition_stats(const GatedTransitionNet& net, StateView s, Mode mode, Rng* rng,
                                 TransitionCache* cache) {
  check_kind(net, s, "source state");
  const std::size_t p = net.state_dim();
  MlpCache* enc_cache = cache ? &cache->encoder : nullptr;
  const std::vector<double> h = net.encoder().forward(net.encoder_params(), s.values, mode, rng, enc_cache);

  TransitionStats st;
  st.kind = net.kind();
  st.gate = net.gate_head().forward(net.gate_params(), h, Mode::eval, nullptr, cache ? &cache->gate : nullptr);
  st.candidate =
      net.candidate_head().forward(net.candidate_params(), h, Mode::eval, nullptr, cache ? &cache->candidate : nullptr);

  if (net.kind() == StateKind::continuous) {
    st.raw_log_variance =
        net.variance_head().forward(net.variance_params(), h, Mode::eval, nullptr, cache ? &cache->variance : nullptr);
    st.mean.resize(p);
    st.variance.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      const double u = st.gate[j];
      st.mean[j] = u * st.candidate[j] + (1.0 - u) * s.values[j];
      st.variance[j] = std::exp(std::clamp(st.raw_log_variance[j], kLogVarianceMin, kLogVarianceMax));
    }
  } else {
    st.prob.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      const double u = st.gate[j];
      st.prob[j] = u * clamp_probability(sigmoid(st.candidate[j])) + (1.0 - u) * clamp_probability(s.values[j]);
    }
  }
  if (cache) {
    cache->net = &net;
    cache->version = net.version();
    cache->source.assign(s.values.begin(), s.values.end());
    cache->stats = st;
  }
  return st;
}

double gaussian_log_density(std::span<const double> mean, std::span<const double> variance,
                            std::span<const double> x) {
  if (mean.size() != variance.size() || mean.size() != x.size())
    fail(ErrorCode::shape, "mean, variance and point must share a dimension");
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = variance[j];
    if (!(v > 0.0)) fail(ErrorCode::domain, "variance component " + std::to_string(j) + " is not positive");
    const double d = x[j] - mean[j];
    total += -0.5 * d * d / v - 0.5 * std::log(v) - 0.5 * kLog2Pi;
  }
  return total;
}

double bernoulli_log_mass(std::span<const double> prob, std::span<const double> x) {
  if (prob.size() != x.size()) fail(ErrorCode::shape, "probabilities and outcome must share a dimension");
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double f = prob[j];
    if (!(f > 0.0 && f < 1.0)) fail(ErrorCode::domain, "probability component " + std::to_string(j) + " is not in (0, 1)");
    if (x[j] == 1.0)
      total += std::log(f);
    else if (x[j] == 0.0)
      total += std::log1p(-f);
    else
      fail(ErrorCode::domain, "binary outcome component " + std::to_string(j) + " is not 0 or 1");
  }
  return total;
}

double log_density_from_stats(const TransitionStats& stats, std::span<const double> next) {
  return stats.kind == StateKind::continuous ? gaussian_log_density(stats.mean, stats.variance, next)
                                             : bernoulli_log_mass(stats.prob, next);
}

double log_transition(const GatedTransitionNet& net, StateView s, StateView next) {
  check_kind(net, next, "next state");
  return log_density_from_stats(transition_stats(net, s), next.values);
}

State sample_next(const GatedTransitionNet& net, StateView s, Rng& rng) {
  const TransitionStats st = transition_stats(net, s);
  std::vector<double> out(net.state_dim());
  if (st.kind == StateKind::continuous) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = st.mean[j] + std::sqrt(st.variance[j]) * rng.normal();
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = rng.bernoulli(st.prob[j]) ? 1.0 : 0.0;
  }
  return State(std::move(out), st.kind);
}

void transition_backward(const GatedTransitionNet& net, const TransitionCache& cache, std::span<const double> next,
                         std::span<double> grad) {
  if (cache.net != &net || cache.version != net.version())
    fail(ErrorCode::cache, "transition activation record is stale or belongs to another model");
  if (grad.size() != net.param_count()) fail(ErrorCode::shape, "gradient buffer does not match the model");
  const TransitionStats& st = cache.stats;
  const std::size_t p = net.state_dim();
  if (next.size() != p) fail(ErrorCode::shape, "next state has the wrong dimension");

  std::vector<double> d_gate(p), d_candidate(p), d_raw_lv;
  if (st.kind == StateKind::continuous) {
    d_raw_lv.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      const double v = st.variance[j];
      const double resid = next[j] - st.mean[j];
      const double d_mean = resid / v;
      d_gate[j] = d_mean * (st.candidate[j] - cache.source[j]);
      d_candidate[j] = d_mean * st.gate[j];
      d_raw_lv[j] = log_variance_clamped(st.raw_log_variance[j]) ? 0.0 : 0.5 * resid * resid / v - 0.5;
    }
  } else {
    for (std::size_t j = 0; j < p; ++j) {
      const double f = st.prob[j];
      const double d_prob = next[j] == 1.0 ? 1.0 / f : -1.0 / (1.0 - f);
      const double sig = sigmoid(st.candidate[j]);
      const double sig_c = clamp_probability(sig);
      d_gate[j] = d_prob * (sig_c - clamp_probability(cache.source[j]));
      const bool clamped = sig != sig_c;
      d_candidate[j] = clamped ? 0.0 : d_prob * st.gate[j] * sig * (1.0 - sig);
    }
  }

  auto sub = [&](std::size_t which) {
    return grad.subspan(net.block_offset(which), net.block_offset(which + 1) - net.block_offset(which));
  };
  std::vector<double> dh = net.gate_head().backward(net.gate_params(), cache.gate, d_gate, sub(1));
  const std::vector<double> dh_c = net.candidate_head().backward(net.candidate_params(), cache.candidate, d_candidate, sub(2));
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dh_c[i];
  if (st.kind == StateKind::continuous) {
    const std::vector<double> dh_v = net.variance_head().backward(net.variance_params(), cache.variance, d_raw_lv, sub(3));
    for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dh_v[i];
  }
  net.encoder().backward(net.encoder_params(), cache.encoder, dh, sub(0));
}

double accumulate_log_transition_grad(const GatedTransitionNet& net, StateView s, StateView next,
                                      std::span<double> grad, Mode mode, Rng* rng) {
  check_kind(net, next, "next state");
  TransitionCache cache;
  const TransitionStats st = transition_stats(net, s, mode, rng, &cache);
  const double value = log_density_from_stats(st, next.values);
  if (!std::isfinite(value)) fail(ErrorCode::numeric, "log transition is not finite");
  transition_backward(net, cache, next.values, grad);
  return value;
}

TransitionGradient log_transition_grad(const GatedTransitionNet& net, StateView s, StateView next) {
  TransitionGradient out;
  out.grad.assign(net.param_count(), 0.0);
  out.log_value = accumulate_log_transition_grad(net, s, next, out.grad);
  for (double g : out.grad)
    if (!std::isfinite(g)) fail(ErrorCode::numeric, "gradient has a non-finite component");
  return out;
}

GradcheckReport transition_gradcheck(StateKind kind, std::size_t dim, std::size_t trials, std::uint64_t seed,
                                     bool corrupt_analytic) {
  if (dim == 0 || dim > 8) fail(ErrorCode::invalid_argument, "gradient check supports 1 <= dim <= 8");
  if (trials == 0) fail(ErrorCode::invalid_argument, "gradient check needs at least one trial");
  Rng rng(derive_seed(seed, "gradcheck"));
  GradcheckReport report;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    TransitionArchitecture arch{kind, dim, {6 + trial % 3, 5}, 0.0};
    GatedTransitionNet net(arch, rng);
    // Non-zero biases so every path carries gradient.
    for (double& w : net.mutable_params()) w += rng.uniform(-0.1, 0.1);

    std::vector<double> s(dim), next(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (kind == StateKind::continuous) {
        s[j] = rng.normal();
        next[j] = rng.normal();
      } else {
        s[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        next[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      }
    }
    const StateView sv{s, kind}, nv{next, kind};
    const ValueAndGradient f = [&](std::span<const double> theta, std::vector<double>* grad) {
      GatedTransitionNet probe(arch, std::vector<double>(theta.begin(), theta.end()));
      if (grad == nullptr) return log_transition(probe, sv, nv);
      TransitionGradient g = log_transition_grad(probe, sv, nv);
      if (corrupt_analytic) g.grad[0] = 1.5 * g.grad[0] + 0.1;
      *grad = std::move(g.grad);
      return g.log_value;
    };
    report.max_relative_error = std::max(report.max_relative_error, grad_check(f, net.params(), 1e-5));
    report.parameters_checked += net.param_count();
  }
  return report;
}

}  // namespace chainorder
