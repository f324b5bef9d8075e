#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chainorder/rng.hpp"
#include "chainorder/tensor.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

inline constexpr double kLogVarianceMin = -10.0;
inline constexpr double kLogVarianceMax = 10.0;
inline constexpr double kProbabilityClamp = 1e-4;

struct TransitionArchitecture {
  StateKind kind = StateKind::continuous;
  std::size_t state_dim = 0;
  std::vector<std::size_t> hidden_sizes{32};  // encoder widths, relu
  double dropout_rate = 0.2;
};

// Per-source outputs of the network. Continuous nets fill mean/variance,
// binary nets fill prob. gate and candidate are kept for inspection.
struct TransitionStats {
  StateKind kind = StateKind::continuous;
  std::vector<double> gate;           // U in (0,1)^p
  std::vector<double> candidate;      // X~, the proposed update
  std::vector<double> mean;           // U*X~ + (1-U)*s
  std::vector<double> variance;       // exp(clamped log-variance)
  std::vector<double> raw_log_variance;
  std::vector<double> prob;           // U*sigmoid(X~) + (1-U)*clamp(s)
};

// Gated transition operator. An encoder maps the current state to a hidden
// code h; three single-layer heads read h and produce the gate U (sigmoid),
// the candidate X~ (identity) and, for continuous states, the log-variance.
// All parameters live in one flat vector in canonical order: encoder layers,
// gate head, candidate head, variance head; within a layer row-major weights
// then bias.
class GatedTransitionNet {
 public:
  GatedTransitionNet() = default;
  GatedTransitionNet(TransitionArchitecture arch, Rng& rng);
  // Adopts an explicit parameter vector (used when loading a model).
  GatedTransitionNet(TransitionArchitecture arch, std::vector<double> params);

  const TransitionArchitecture& architecture() const { return arch_; }
  StateKind kind() const { return arch_.kind; }
  std::size_t state_dim() const { return arch_.state_dim; }
  std::size_t hidden_dim() const { return encoder_.output_dim(); }
  std::size_t param_count() const { return params_.size(); }

  std::span<const double> params() const { return params_; }
  // Mutable access invalidates activation records taken before the call.
  std::span<double> mutable_params() {
    ++version_;
    return params_;
  }
  std::uint64_t version() const { return version_; }

  const Mlp& encoder() const { return encoder_; }
  const Mlp& gate_head() const { return gate_; }
  const Mlp& candidate_head() const { return candidate_; }
  const Mlp& variance_head() const { return variance_; }
  bool has_variance_head() const { return arch_.kind == StateKind::continuous; }

  // Sub-ranges of the flat parameter vector for each block.
  std::span<const double> encoder_params() const { return block(0); }
  std::span<const double> gate_params() const { return block(1); }
  std::span<const double> candidate_params() const { return block(2); }
  std::span<const double> variance_params() const { return block(3); }
  std::span<double> mutable_block(std::size_t which);
  std::size_t block_offset(std::size_t which) const { return offsets_[which]; }

 private:
  void build_layout();
  std::span<const double> block(std::size_t which) const;

  TransitionArchitecture arch_;
  Mlp encoder_, gate_, candidate_, variance_;
  std::size_t offsets_[5] = {0, 0, 0, 0, 0};
  std::vector<double> params_;
  std::uint64_t version_ = 0;
};

// Activation record of one transition forward pass.
struct TransitionCache {
  const GatedTransitionNet* net = nullptr;
  std::uint64_t version = 0;
  std::vector<double> source;
  MlpCache encoder, gate, candidate, variance;
  TransitionStats stats;
};

TransitionStats transition_stats(const GatedTransitionNet& net, StateView s, Mode mode = Mode::eval,
                                 Rng* rng = nullptr, TransitionCache* cache = nullptr);

// Fully normalised diagonal-Gaussian log density.
double gaussian_log_density(std::span<const double> mean, std::span<const double> variance,
                            std::span<const double> x);

// Factorised Bernoulli log mass; every f must lie strictly inside (0, 1).
double bernoulli_log_mass(std::span<const double> prob, std::span<const double> x);

// log T(next | stats) for stats already computed from a source state.
double log_density_from_stats(const TransitionStats& stats, std::span<const double> next);

// log T(next | s; theta) in eval mode. Both branches are proper densities, so
// the per-state normaliser is identically one.
double log_transition(const GatedTransitionNet& net, StateView s, StateView next);

State sample_next(const GatedTransitionNet& net, StateView s, Rng& rng);

// Gradient of log T(next | s) with respect to the flat parameter vector.
struct TransitionGradient {
  double log_value = 0.0;
  std::vector<double> grad;
};

TransitionGradient log_transition_grad(const GatedTransitionNet& net, StateView s, StateView next);

// Accumulating form used by training: adds d log T / d theta into `grad` and
// returns log T. In train mode dropout masks are drawn from `rng`.
double accumulate_log_transition_grad(const GatedTransitionNet& net, StateView s, StateView next,
                                      std::span<double> grad, Mode mode = Mode::eval, Rng* rng = nullptr);

// Backward pass of log T(next | s) through a recorded forward pass; adds into
// `grad`. Throws ErrorCode::cache if the net changed since the forward pass.
void transition_backward(const GatedTransitionNet& net, const TransitionCache& cache,
                         std::span<const double> next, std::span<double> grad);

struct GradcheckReport {
  double max_relative_error = 0.0;
  std::size_t trials = 0;
  std::size_t parameters_checked = 0;
};

// Builds random nets and (s, s') pairs and compares log_transition_grad
// against central differences with step 1e-5. `corrupt_analytic` perturbs the
// analytic gradient and exists as a negative control.
GradcheckReport transition_gradcheck(StateKind kind, std::size_t dim, std::size_t trials, std::uint64_t seed,
                                     bool corrupt_analytic = false);

}  // namespace chainorder
