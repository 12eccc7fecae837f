#include "ccasim/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ccasim {

VirtualChannel::VirtualChannel(std::size_t capacity) : ring_(capacity) {}

void VirtualChannel::sync(std::uint64_t cycle) {
  if (stamp_ == cycle) return;
  stamp_ = cycle;
  snapshot_ = size_;
  admitted_ = 0;
}

bool VirtualChannel::has_space(std::uint64_t cycle) {
  sync(cycle);
  return snapshot_ + admitted_ < ring_.size();
}

void VirtualChannel::push(ActionMessage msg, std::uint64_t cycle) {
  sync(cycle);
  if (size_ == ring_.size()) throw std::logic_error("virtual channel overflow");
  ring_[(head_ + size_) % ring_.size()] = std::move(msg);
  ++size_;
  ++admitted_;
  high_water_ = std::max(high_water_, size_);
}

ActionMessage VirtualChannel::pop(std::uint64_t cycle) {
  sync(cycle);
  ActionMessage out = std::move(ring_[head_]);
  head_ = (head_ + 1) % ring_.size();
  --size_;
  return out;
}

ChannelLink::ChannelLink(Direction dir, std::int32_t vc_count, std::int32_t capacity)
    : direction(dir) {
  vcs.reserve(static_cast<std::size_t>(vc_count));
  for (std::int32_t i = 0; i < vc_count; ++i) vcs.emplace_back(static_cast<std::size_t>(capacity));
}

std::size_t ChannelLink::occupancy() const {
  std::size_t n = 0;
  for (const auto& vc : vcs) n += vc.size();
  return n;
}

void record_refusal(ChannelLink& link, std::uint64_t cycle) {
  if (link.last_refusal == cycle) return;
  ++link.contention_cycles;
  link.prior_refusal = link.last_refusal;
  link.last_refusal = cycle;
}

bool try_enqueue(ChannelLink& link, ActionMessage msg, std::int32_t vc, std::uint64_t cycle) {
  auto& buffer = link.vcs.at(static_cast<std::size_t>(vc));
  if (buffer.has_space(cycle)) {
    buffer.push(std::move(msg), cycle);
    return true;
  }
  record_refusal(link, cycle);
  return false;
}

Network::Network(const ChipConfig& cfg) : cfg_(cfg), per_cell_(cfg.cell_count(), 0) {
  cfg_.validate();
  links_.reserve(static_cast<std::size_t>(cfg.cell_count()) * 4);
  for (CellId c = 0; c < cfg.cell_count(); ++c)
    for (Direction d : kDirections) links_.emplace_back(d, cfg.vc_count, cfg.vc_buffer_capacity);
}

bool Network::inject(CellId from, ActionMessage msg, std::uint64_t cycle) {
  const Coordinate here = cfg_.coord_of(from);
  msg.route = RouteState{here, msg.target.cell, 0, 0, std::nullopt};
  msg.hops = 0;
  const Hop hop = route_next_hop(here, msg.route, cfg_);
  msg.route = hop.state;
  msg.moved_at = cycle;
  if (!try_enqueue(link(from, hop.direction), std::move(msg), hop.state.current_vc, cycle)) return false;
  ++per_cell_[from];
  ++in_flight_;
  peak_occupancy_ = std::max(peak_occupancy_, in_flight_);
  return true;
}

std::size_t Network::advance(std::uint64_t cycle,
                             std::vector<std::pair<CellId, ActionMessage>>& delivered) {
  std::size_t moved = 0;
  const auto vc_count = static_cast<std::uint32_t>(cfg_.vc_count);
  for (CellId cell = 0; cell < cfg_.cell_count(); ++cell) {
    if (per_cell_[cell] == 0) continue;
    const Coordinate here = cfg_.coord_of(cell);
    for (Direction d : kDirections) {
      ChannelLink& out = link(cell, d);
      // One flit per physical link per cycle; VCs are served round-robin.
      for (std::uint32_t i = 0; i < vc_count; ++i) {
        const std::uint32_t v = (out.rr_next + i) % vc_count;
        VirtualChannel& buffer = out.vcs[v];
        if (buffer.empty() || buffer.front().moved_at == cycle) continue;
        const Coordinate next = *neighbor(here, d, cfg_);
        const CellId next_id = cfg_.id_of(next);
        const ActionMessage& head = buffer.front();
        if (next == head.target.cell) {
          ActionMessage msg = buffer.pop(cycle);
          ++msg.hops;
          msg.moved_at = cycle;
          --per_cell_[cell];
          --in_flight_;
          ++total_hops_;
          delivered.emplace_back(next_id, std::move(msg));
        } else {
          const Hop hop = route_next_hop(next, head.route, cfg_);
          ChannelLink& downstream = link(next_id, hop.direction);
          if (!downstream.vcs[static_cast<std::size_t>(hop.state.current_vc)].has_space(cycle)) {
            record_refusal(downstream, cycle);
            continue;
          }
          ActionMessage msg = buffer.pop(cycle);
          ++msg.hops;
          msg.moved_at = cycle;
          msg.route = hop.state;
          try_enqueue(downstream, std::move(msg), hop.state.current_vc, cycle);
          --per_cell_[cell];
          ++per_cell_[next_id];
          ++total_hops_;
        }
        ++moved;
        out.rr_next = (v + 1) % vc_count;
        break;
      }
    }
  }
  return moved;
}

bool Network::refused_in(CellId cell, std::uint64_t cycle) const {
  for (Direction d : kDirections)
    if (link(cell, d).refused_in(cycle)) return true;
  return false;
}

std::uint64_t Network::total_contention() const {
  std::uint64_t total = 0;
  for (const auto& l : links_) total += l.contention_cycles;
  return total;
}

std::uint64_t Network::vc_high_water_sum() const {
  std::uint64_t total = 0;
  for (const auto& l : links_)
    for (const auto& vc : l.vcs) total += vc.high_water();
  return total;
}

void Network::assert_buffer_safety() const {
  for (const auto& l : links_)
    for (const auto& vc : l.vcs)
      if (vc.size() > vc.capacity())
        throw std::logic_error("buffer safety violated: " + std::to_string(vc.size()) + " > " +
                               std::to_string(vc.capacity()));
}

}  // namespace ccasim
