#include "chainorder/types.hpp"

#include <numeric>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

std::string_view kind_name(StateKind kind) noexcept {
  return kind == StateKind::binary ? "binary" : "continuous";
}

StateKind parse_kind(std::string_view name) {
  if (name == "continuous") return StateKind::continuous;
  if (name == "binary") return StateKind::binary;
  fail(ErrorCode::invalid_argument, "unknown state kind '" + std::string(name) + "'");
}

namespace {

void check_binary(std::span<const double> values) {
  for (double v : values)
    if (v != 0.0 && v != 1.0) fail(ErrorCode::domain, "binary state component is not 0 or 1");
}

}  // namespace

State::State(std::vector<double> values, StateKind kind) : values_(std::move(values)), kind_(kind) {
  if (values_.empty()) fail(ErrorCode::shape, "a state needs at least one component");
  if (kind_ == StateKind::binary) check_binary(values_);
}

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
  if (!is_valid(order_)) fail(ErrorCode::permutation, "order is not a bijection on 0..n-1");
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return Permutation(std::move(order));
}

bool Permutation::is_valid(std::span<const std::size_t> order) {
  std::vector<bool> seen(order.size(), false);
  for (std::size_t v : order) {
    if (v >= order.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation Permutation::reversed() const {
  return Permutation(std::vector<std::size_t>(order_.rbegin(), order_.rend()));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(order_.size());
  for (std::size_t t = 0; t < order_.size(); ++t) inv[order_[t]] = t;
  return Permutation(std::move(inv));
}

Dataset::Dataset(StateKind kind, std::size_t dim, std::vector<double> values)
    : kind_(kind), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) fail(ErrorCode::shape, "dataset dimension must be at least 1");
  if (values_.size() % dim_ != 0) fail(ErrorCode::dimension, "value count is not a multiple of the dimension");
  if (kind_ == StateKind::binary) check_binary(values_);
}

State Dataset::owned_state(std::size_t i) const {
  auto r = row(i);
  return State(std::vector<double>(r.begin(), r.end()), kind_);
}

void Dataset::push_back(StateView s) {
  if (dim_ == 0) dim_ = s.dim();
  if (s.dim() != dim_) fail(ErrorCode::shape, "state dimension does not match the dataset");
  if (!values_.empty() && s.kind != kind_) fail(ErrorCode::kind, "state kind does not match the dataset");
  kind_ = s.kind;
  if (kind_ == StateKind::binary) check_binary(s.values);
  values_.insert(values_.end(), s.values.begin(), s.values.end());
  truth_.reset();
}

void Dataset::set_truth(Permutation truth) {
  if (truth.size() != size()) fail(ErrorCode::size, "truth length does not match the dataset size");
  truth_ = std::move(truth);
}

Dataset Dataset::reordered(std::span<const std::size_t> order) const {
  std::vector<double> out;
  out.reserve(order.size() * dim_);
  for (std::size_t i : order) {
    if (i >= size()) fail(ErrorCode::invalid_argument, "index " + std::to_string(i) + " out of range");
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return Dataset(kind_, dim_, std::move(out));
}

}  // namespace chainorder
