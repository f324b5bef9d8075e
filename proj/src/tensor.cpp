#include "chainorder/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

double apply_activation(Activation a, double pre) {
  switch (a) {
    case Activation::identity:
      return pre;
    case Activation::relu:
      return pre > 0.0 ? pre : 0.0;
    case Activation::sigmoid: {
      // Kept strictly inside (0, 1) even where the exact value rounds to 0 or 1.
      const double y = pre >= 0.0 ? 1.0 / (1.0 + std::exp(-pre)) : std::exp(pre) / (1.0 + std::exp(pre));
      return std::clamp(y, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
    }
  }
  return pre;
}

namespace {

// Derivative of the activation expressed through its output.
double activation_slope(Activation a, double out) {
  switch (a) {
    case Activation::identity:
      return 1.0;
    case Activation::relu:
      return out > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid:
      return out * (1.0 - out);
  }
  return 1.0;
}

}  // namespace

Mlp::Mlp(std::vector<LayerShape> layers, double dropout_rate, bool drop_output)
    : layers_(std::move(layers)), dropout_rate_(dropout_rate), drop_output_(drop_output) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    fail(ErrorCode::invalid_argument, "dropout rate must lie in [0, 1)");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].in == 0 || layers_[i].out == 0)
      fail(ErrorCode::shape, "layer " + std::to_string(i) + " has a zero dimension");
    if (i > 0 && layers_[i - 1].out != layers_[i].in)
      fail(ErrorCode::shape, "layer " + std::to_string(i) + " input does not match previous output");
    offsets_.push_back(param_count_);
    param_count_ += layers_[i].in * layers_[i].out + layers_[i].out;
  }
}

Mlp Mlp::chain(std::span<const std::size_t> sizes, Activation hidden, Activation output,
               double dropout_rate, bool drop_output) {
  if (sizes.size() < 2) fail(ErrorCode::shape, "an Mlp needs at least an input and an output size");
  std::vector<LayerShape> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const bool last = i + 2 == sizes.size();
    layers.push_back({sizes[i], sizes[i + 1], last ? output : hidden});
  }
  return Mlp(std::move(layers), dropout_rate, drop_output);
}

void Mlp::check_params(std::span<const double> params) const {
  if (params.size() != param_count_)
    fail(ErrorCode::shape, "parameter buffer has " + std::to_string(params.size()) +
                               " entries, network needs " + std::to_string(param_count_));
}

DenseLayerView Mlp::layer(std::span<const double> params, std::size_t index) const {
  check_params(params);
  const LayerShape& s = layers_.at(index);
  return {s, params.subspan(weight_offset(index), s.in * s.out), params.subspan(bias_offset(index), s.out)};
}

void Mlp::init(std::span<double> params, Rng& rng) const {
  check_params(params);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    double* w = params.data() + weight_offset(l);
    for (std::size_t k = 0; k < s.in * s.out; ++k) w[k] = rng.uniform(-limit, limit);
    std::fill_n(params.data() + bias_offset(l), s.out, 0.0);
  }
}

std::vector<double> Mlp::forward(std::span<const double> params, std::span<const double> x, Mode mode,
                                 Rng* rng, MlpCache* cache) const {
  check_params(params);
  if (x.size() != input_dim())
    fail(ErrorCode::shape, "input has dimension " + std::to_string(x.size()) + ", expected " +
                               std::to_string(input_dim()));
  const bool dropping = mode == Mode::train && dropout_rate_ > 0.0;
  if (dropping && rng == nullptr) fail(ErrorCode::invalid_argument, "train-mode dropout needs an rng");

  if (cache) {
    cache->owner = this;
    cache->params = params.data();
    cache->mode = mode;
    cache->inputs.assign(layers_.size(), {});
    cache->outputs.assign(layers_.size(), {});
    cache->masks.assign(layers_.size(), {});
  }

  std::vector<double> cur(x.begin(), x.end());
  const double keep_scale = 1.0 / (1.0 - dropout_rate_);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    const double* w = params.data() + weight_offset(l);
    const double* b = params.data() + bias_offset(l);
    std::vector<double> out(s.out);
    for (std::size_t r = 0; r < s.out; ++r) {
      double acc = b[r];
      const double* row = w + r * s.in;
      for (std::size_t c = 0; c < s.in; ++c) acc += row[c] * cur[c];
      out[r] = apply_activation(s.activation, acc);
    }
    if (cache) {
      cache->inputs[l] = std::move(cur);
      cache->outputs[l] = out;
    }
    const bool last = l + 1 == layers_.size();
    if (dropping && (!last || drop_output_)) {
      std::vector<double> mask(s.out);
      for (std::size_t r = 0; r < s.out; ++r) {
        mask[r] = rng->uniform() < dropout_rate_ ? 0.0 : keep_scale;
        out[r] *= mask[r];
      }
      if (cache) cache->masks[l] = std::move(mask);
    }
    cur = std::move(out);
  }
  return cur;
}

std::vector<double> Mlp::backward(std::span<const double> params, const MlpCache& cache,
                                  std::span<const double> dy, std::span<double> grad) const {
  check_params(params);
  if (grad.size() != param_count_) fail(ErrorCode::shape, "gradient buffer does not match parameters");
  if (cache.owner != this || cache.params != params.data() || cache.outputs.size() != layers_.size())
    fail(ErrorCode::cache, "activation record was produced by a different network");
  if (dy.size() != output_dim()) fail(ErrorCode::shape, "upstream gradient has the wrong dimension");

  std::vector<double> delta(dy.begin(), dy.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerShape& s = layers_[li];
    const std::vector<double>& in = cache.inputs[li];
    const std::vector<double>& out = cache.outputs[li];
    if (in.size() != s.in || out.size() != s.out) fail(ErrorCode::cache, "activation record is stale");
    if (!cache.masks[li].empty())
      for (std::size_t r = 0; r < s.out; ++r) delta[r] *= cache.masks[li][r];
    for (std::size_t r = 0; r < s.out; ++r) delta[r] *= activation_slope(s.activation, out[r]);

    const double* w = params.data() + weight_offset(li);
    double* gw = grad.data() + weight_offset(li);
    double* gb = grad.data() + bias_offset(li);
    std::vector<double> dx(s.in, 0.0);
    for (std::size_t r = 0; r < s.out; ++r) {
      const double d = delta[r];
      gb[r] += d;
      if (d == 0.0) continue;
      const double* row = w + r * s.in;
      double* grow = gw + r * s.in;
      for (std::size_t c = 0; c < s.in; ++c) {
        grow[c] += d * in[c];
        dx[c] += d * row[c];
      }
    }
    delta = std::move(dx);
  }
  return delta;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size())
    fail(ErrorCode::shape, "optimizer state, gradients and parameters disagree in size");
  const AdamHyper& h = state.hyper;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = h.beta1 * m + (1.0 - h.beta1) * g;
    v = h.beta2 * v + (1.0 - h.beta2) * g * g;
    params[i] -= h.learning_rate * (m / c1) / (std::sqrt(v / c2) + h.epsilon);
  }
}

double grad_check(const ValueAndGradient& f, std::span<const double> params, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "finite-difference step must be positive");
  std::vector<double> analytic;
  const double base = f(params, &analytic);
  if (!std::isfinite(base)) fail(ErrorCode::numeric, "loss is not finite at the base point");
  if (analytic.size() != params.size()) fail(ErrorCode::shape, "analytic gradient has the wrong size");

  std::vector<double> probe(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = f(probe, nullptr);
    probe[i] = saved - eps;
    const double down = f(probe, nullptr);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      fail(ErrorCode::numeric, "loss is not finite at a perturbed point");
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace chainorder
