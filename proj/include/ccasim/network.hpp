#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ccasim/geometry.hpp"
#include "ccasim/message.hpp"

namespace ccasim {

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

/// Bounded FIFO for one virtual channel. Admission is decided against the
/// occupancy seen at the start of the cycle plus whatever was admitted
/// since; departures free space only from the next cycle on.
class VirtualChannel {
 public:
  explicit VirtualChannel(std::size_t capacity = 4);

  std::size_t capacity() const { return ring_.size(); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t high_water() const { return high_water_; }

  bool has_space(std::uint64_t cycle);
  void push(ActionMessage msg, std::uint64_t cycle);
  const ActionMessage& front() const { return ring_[head_]; }
  ActionMessage pop(std::uint64_t cycle);

 private:
  void sync(std::uint64_t cycle);

  std::vector<ActionMessage> ring_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::size_t high_water_ = 0;
  std::uint64_t stamp_ = kNever;
  std::size_t snapshot_ = 0;
  std::size_t admitted_ = 0;
};

/// One outgoing physical link of a cell with its VC buffers.
struct ChannelLink {
  Direction direction = Direction::North;
  std::vector<VirtualChannel> vcs;
  std::uint64_t contention_cycles = 0;
  std::uint64_t last_refusal = kNever;
  std::uint64_t prior_refusal = kNever;
  std::uint32_t rr_next = 0;

  ChannelLink() = default;
  ChannelLink(Direction dir, std::int32_t vc_count, std::int32_t capacity);

  bool refused_in(std::uint64_t cycle) const {
    return last_refusal == cycle || prior_refusal == cycle;
  }
  std::size_t occupancy() const;
};

void record_refusal(ChannelLink& link, std::uint64_t cycle);

/// Appends to the chosen VC if it has room; otherwise records one
/// contention cycle for the link (at most once per cycle).
bool try_enqueue(ChannelLink& link, ActionMessage msg, std::int32_t vc, std::uint64_t cycle);

/// All links of the chip plus per-cycle message advancement.
class Network {
 public:
  explicit Network(const ChipConfig& cfg);

  const ChipConfig& config() const { return cfg_; }

  ChannelLink& link(CellId cell, Direction d) { return links_[cell * 4 + static_cast<std::size_t>(d)]; }
  const ChannelLink& link(CellId cell, Direction d) const {
    return links_[cell * 4 + static_cast<std::size_t>(d)];
  }

  /// Stages a fresh message from `from` toward `msg.target.cell`. Returns
  /// false (message dropped by the caller's retry) when the first-hop VC is full.
  bool inject(CellId from, ActionMessage msg, std::uint64_t cycle);

  /// Moves every in-flight message at most one hop. Arrivals are appended
  /// to `delivered`. Returns the number of messages that moved or arrived.
  std::size_t advance(std::uint64_t cycle, std::vector<std::pair<CellId, ActionMessage>>& delivered);

  /// Any of `cell`'s outgoing links refused an enqueue during `cycle`.
  bool refused_in(CellId cell, std::uint64_t cycle) const;

  std::size_t in_flight() const { return in_flight_; }
  std::size_t in_flight_at(CellId cell) const { return per_cell_[cell]; }
  std::uint64_t total_hops() const { return total_hops_; }
  std::size_t peak_occupancy() const { return peak_occupancy_; }
  std::uint64_t total_contention() const;

  /// Sum over every VC buffer of its own high-water mark.
  std::uint64_t vc_high_water_sum() const;

  /// Checks the capacity bound of every buffer; throws on violation.
  void assert_buffer_safety() const;

 private:
  ChipConfig cfg_;
  std::vector<ChannelLink> links_;
  std::vector<std::size_t> per_cell_;
  std::size_t in_flight_ = 0;
  std::size_t peak_occupancy_ = 0;
  std::uint64_t total_hops_ = 0;
};

}  // namespace ccasim
