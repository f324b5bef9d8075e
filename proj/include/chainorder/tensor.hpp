#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chainorder/rng.hpp"

namespace chainorder {

enum class Activation { identity, relu, sigmoid };
enum class Mode { train, eval };

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::identity;
};

// Read-only view of one dense layer inside a flat parameter buffer.
// Weights are row-major [out x in], followed by the bias [out].
struct DenseLayerView {
  LayerShape shape;
  std::span<const double> weights;
  std::span<const double> bias;

  double weight(std::size_t row, std::size_t col) const { return weights[row * shape.in + col]; }
};

// Activation record produced by Mlp::forward and consumed by Mlp::backward.
struct MlpCache {
  const void* owner = nullptr;
  const double* params = nullptr;
  Mode mode = Mode::eval;
  std::vector<std::vector<double>> inputs;   // input fed to layer i
  std::vector<std::vector<double>> outputs;  // activation of layer i, before dropout
  std::vector<std::vector<double>> masks;    // inverted-dropout scale per unit, empty if none
};

// A stack of dense layers. The Mlp only describes the architecture; its
// parameters live in a caller-owned flat buffer so that several networks can
// share one contiguous parameter vector.
//
// Dropout (inverted scaling) is applied in train mode to the output of every
// layer except the last; `drop_output` extends it to the last layer, which is
// used when the Mlp feeds further layers owned by someone else.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<LayerShape> layers, double dropout_rate = 0.0, bool drop_output = false);

  // sizes = {in, h1, ..., out}; hidden layers use `hidden`, the last `output`.
  static Mlp chain(std::span<const std::size_t> sizes, Activation hidden, Activation output,
                   double dropout_rate = 0.0, bool drop_output = false);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t param_count() const { return param_count_; }
  double dropout_rate() const { return dropout_rate_; }
  bool drops_output() const { return drop_output_; }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layers_[layer].in * layers_[layer].out;
  }

  DenseLayerView layer(std::span<const double> params, std::size_t index) const;

  // Glorot-uniform weights, zero biases.
  void init(std::span<double> params, Rng& rng) const;

  // `rng` is required in train mode when dropout is active. `cache` may be
  // null when no backward pass follows.
  std::vector<double> forward(std::span<const double> params, std::span<const double> x, Mode mode,
                              Rng* rng, MlpCache* cache) const;

  // Accumulates d(loss)/d(params) into `grad` (same layout as params) and
  // returns d(loss)/dx.
  std::vector<double> backward(std::span<const double> params, const MlpCache& cache,
                               std::span<const double> dy, std::span<double> grad) const;

 private:
  void check_params(std::span<const double> params) const;

  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  std::size_t param_count_ = 0;
  double dropout_rate_ = 0.0;
  bool drop_output_ = false;
};

double apply_activation(Activation a, double pre);

struct AdamHyper {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;

  AdamState() = default;
  AdamState(std::size_t param_count, AdamHyper h)
      : hyper(h), first_moment(param_count, 0.0), second_moment(param_count, 0.0) {}
};

// One bias-corrected ADAM update that *descends* along `grads`.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// Evaluates the loss at `params`; when `grad` is non-null it also writes the
// analytic gradient there (resized by the callee).
using ValueAndGradient = std::function<double(std::span<const double> params, std::vector<double>* grad)>;

// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
// numeric by central differences with step `eps`.
double grad_check(const ValueAndGradient& f, std::span<const double> params, double eps);

double l2_norm(std::span<const double> v);

}  // namespace chainorder
