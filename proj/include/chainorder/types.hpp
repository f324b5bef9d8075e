#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace chainorder {

enum class StateKind { continuous, binary };

std::string_view kind_name(StateKind kind) noexcept;
StateKind parse_kind(std::string_view name);

// Non-owning view of one state vector.
struct StateView {
  std::span<const double> values;
  StateKind kind = StateKind::continuous;

  std::size_t dim() const { return values.size(); }
};

// One data instance: a fixed-dimension real or 0/1 feature vector.
class State {
 public:
  State() = default;
  // Throws if `values` is empty or, for binary states, not 0/1.
  State(std::vector<double> values, StateKind kind);

  std::span<const double> values() const { return values_; }
  StateKind kind() const { return kind_; }
  std::size_t dim() const { return values_.size(); }
  StateView view() const { return {values_, kind_}; }
  operator StateView() const { return view(); }  // NOLINT(google-explicit-constructor)

  bool operator==(const State&) const = default;

 private:
  std::vector<double> values_;
  StateKind kind_ = StateKind::continuous;
};

// A bijection on {0, ..., n-1}; order[t] is the index of the instance
// generated at step t.
class Permutation {
 public:
  Permutation() = default;
  // Throws ErrorCode::permutation unless `order` is a bijection.
  explicit Permutation(std::vector<std::size_t> order);

  static Permutation identity(std::size_t n);
  static bool is_valid(std::span<const std::size_t> order);

  std::size_t size() const { return order_.size(); }
  std::size_t operator[](std::size_t t) const { return order_[t]; }
  const std::vector<std::size_t>& order() const { return order_; }
  auto begin() const { return order_.begin(); }
  auto end() const { return order_.end(); }

  Permutation reversed() const;
  Permutation inverse() const;
  // Position of each item: ranks()[item] = t such that order[t] == item.
  std::vector<std::size_t> ranks() const { return inverse().order_; }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> order_;
};

// Row-major collection of n states of equal dimension and kind, optionally
// carrying the ground-truth generation order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(StateKind kind, std::size_t dim, std::vector<double> values);

  StateKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  StateView state(std::size_t i) const { return {row(i), kind_}; }
  State owned_state(std::size_t i) const;
  const std::vector<double>& values() const { return values_; }

  void push_back(StateView s);

  const std::optional<Permutation>& truth() const { return truth_; }
  void set_truth(Permutation truth);
  void clear_truth() { truth_.reset(); }

  // Instances in the given order (a new dataset without truth).
  Dataset reordered(std::span<const std::size_t> order) const;
  Dataset subset(std::span<const std::size_t> indices) const { return reordered(indices); }

  bool operator==(const Dataset&) const = default;

 private:
  StateKind kind_ = StateKind::continuous;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::optional<Permutation> truth_;
};

}  // namespace chainorder
