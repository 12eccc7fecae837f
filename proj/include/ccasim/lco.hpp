#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ccasim {

enum class LcoOp : std::uint8_t { Sum, Min, Max, Overwrite };

template <class T>
T apply(LcoOp op, const T& acc, const T& value) {
  switch (op) {
    case LcoOp::Sum: return acc + value;
    case LcoOp::Min: return std::min(acc, value);
    case LcoOp::Max: return std::max(acc, value);
    case LcoOp::Overwrite: return value;
  }
  return value;
}

/// Counting gate: fires once when set `arity` times, yielding the op-fold of
/// the contributions, then resets.
///
/// Contributions are folded in contributor-key order rather than arrival
/// order, so every replica of a gate that receives the same keyed values
/// produces a bit-identical result regardless of delivery interleaving.
template <class T>
class AndGateLCO {
 public:
  AndGateLCO(std::uint32_t arity, LcoOp op) : arity_(arity), op_(op) {
    if (arity == 0) throw std::invalid_argument("AND gate arity must be positive");
    contributions_.reserve(std::min<std::uint32_t>(arity, 64));
  }

  std::uint32_t arity() const { return arity_; }
  std::uint32_t count() const { return static_cast<std::uint32_t>(contributions_.size()); }
  LcoOp op() const { return op_; }
  std::uint64_t fired() const { return fired_; }

  /// Keyed set; returns the folded value if this set completed the gate.
  std::optional<T> set(T value, std::uint32_t contributor) {
    contributions_.emplace_back(contributor, std::move(value));
    if (contributions_.size() < arity_) return std::nullopt;
    T result = accumulated();
    contributions_.clear();
    ++fired_;
    return result;
  }

  /// Unkeyed set; arrival order is the key.
  std::optional<T> set(T value) { return set(std::move(value), count()); }

  /// Fold of the contributions received since the last reset.
  T accumulated() const {
    if (contributions_.empty()) throw std::logic_error("empty AND gate has no value");
    auto sorted = contributions_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    T acc = sorted.front().second;
    for (std::size_t i = 1; i < sorted.size(); ++i) acc = apply(op_, acc, sorted[i].second);
    return acc;
  }

 private:
  std::uint32_t arity_;
  LcoOp op_;
  std::uint64_t fired_ = 0;
  std::vector<std::pair<std::uint32_t, T>> contributions_;
};

}  // namespace ccasim
