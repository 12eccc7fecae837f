#include "ccasim/runtime.hpp"

#include <algorithm>

namespace ccasim {

void GlobalReduction::configure(std::uint32_t arity, std::uint32_t iterations) {
  arity_ = arity;
  slots_.assign(iterations + 1, Slot{});
  pending_.clear();
}

void GlobalReduction::contribute(std::uint32_t iteration, std::uint32_t key, double value) {
  if (iteration >= slots_.size()) slots_.resize(iteration + 1);
  auto& parts = slots_[iteration].parts;
  if (parts.size() >= arity_) throw SimulationFault("global reduction over-contributed");
  parts.emplace_back(key, value);
}

bool GlobalReduction::complete(std::uint32_t iteration) const {
  if (arity_ == 0) return true;
  return iteration < slots_.size() && slots_[iteration].parts.size() == arity_;
}

double GlobalReduction::value(std::uint32_t iteration) const {
  if (iteration >= slots_.size()) return 0.0;
  auto parts = slots_[iteration].parts;
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double acc = 0.0;
  for (const auto& p : parts) acc += p.second;
  return acc;
}

void GlobalReduction::defer(std::uint32_t iteration, CellId cell, ActionMessage msg) {
  pending_.push_back(Deferred{iteration, cell, std::move(msg)});
}

std::vector<std::pair<CellId, ActionMessage>> GlobalReduction::release() {
  std::vector<std::pair<CellId, ActionMessage>> out;
  if (pending_.empty()) return out;
  std::vector<Deferred> keep;
  for (auto& d : pending_) {
    if (complete(d.iteration))
      out.emplace_back(d.cell, std::move(d.msg));
    else
      keep.push_back(std::move(d));
  }
  pending_ = std::move(keep);
  return out;
}

CellCounters& CellCounters::operator+=(const CellCounters& o) {
  messages_delivered += o.messages_delivered;
  actions_delivered += o.actions_delivered;
  actions_invoked += o.actions_invoked;
  actions_predicate_true += o.actions_predicate_true;
  actions_predicate_false += o.actions_predicate_false;
  actions_overlapped += o.actions_overlapped;
  diffusions_created += o.diffusions_created;
  diffusions_pruned += o.diffusions_pruned;
  propagates_staged += o.propagates_staged;
  filter_evaluations += o.filter_evaluations;
  work_cycles += o.work_cycles;
  compute_cycles_busy += o.compute_cycles_busy;
  sram_word_accesses += o.sram_word_accesses;
  lco_sets += o.lco_sets;
  action_queue_hwm = std::max(action_queue_hwm, o.action_queue_hwm);
  diffuse_queue_hwm = std::max(diffuse_queue_hwm, o.diffuse_queue_hwm);
  return *this;
}

char status_letter(CellStatus s) {
  switch (s) {
    case CellStatus::Idle: return 'I';
    case CellStatus::Computing: return 'C';
    case CellStatus::Staging: return 'S';
    case CellStatus::Throttled: return 'T';
    case CellStatus::Congested: return 'X';
  }
  return '?';
}

std::uint32_t scope_size(const VertexObject& o, std::uint8_t scope) {
  std::size_t n = 0;
  if (scope & kScopeEdges) n += o.local_edges.size();
  if (scope & kScopeGhosts) n += o.ghost_links.size();
  if (scope & kScopeRhizomes) n += o.rhizome_links.size();
  return static_cast<std::uint32_t>(n);
}

std::optional<DiffuseTarget> scope_target(const VertexObject& o, std::uint8_t scope,
                                          std::uint32_t index) {
  std::size_t i = index;
  if (scope & kScopeEdges) {
    if (i < o.local_edges.size())
      return DiffuseTarget{TargetClass::Edge, o.local_edges[i].target, o.local_edges[i].weight};
    i -= o.local_edges.size();
  }
  if (scope & kScopeGhosts) {
    if (i < o.ghost_links.size()) return DiffuseTarget{TargetClass::Ghost, o.ghost_links[i], 1.0};
    i -= o.ghost_links.size();
  }
  if (scope & kScopeRhizomes) {
    if (i < o.rhizome_links.size())
      return DiffuseTarget{TargetClass::Rhizome, o.rhizome_links[i], 1.0};
  }
  return std::nullopt;
}

void CellContext::diffuse(DiffuseClosure closure) {
  if (scope_size(sim_.store_.at(closure.origin), closure.scope) == 0) return;
  if (immediate_)
    sim_.enqueue_closure(cell_, std::move(closure));
  else
    cell_.held_closures.push_back(std::move(closure));
}

void CellContext::local_action(ActionMessage msg) {
  if (immediate_)
    sim_.enqueue_action(cell_, std::move(msg));
  else
    cell_.held_locals.push_back(std::move(msg));
}

GlobalReduction& CellContext::reduction() { return sim_.reduction_; }

void CellContext::defer_on_reduction(std::uint32_t iteration, ActionMessage msg) {
  sim_.reduction_.defer(iteration, cell_.id, std::move(msg));
}

void CellContext::sram(std::uint32_t words) { cell_.counters.sram_word_accesses += words; }

std::uint64_t CellContext::cycle() const { return sim_.cycle_; }

GraphStore& CellContext::store() { return sim_.store_; }

void rhizome_collapse(CellContext& ctx, const VertexObject& origin, AndGateLCO<double>& gate,
                      double partial, Payload share, const std::function<void(double)>& on_fire) {
  share.value = partial;
  share.rank = origin.rank;
  DiffuseClosure closure;
  closure.origin = ctx.self();
  closure.kind = ActionKind::LcoSet;
  closure.captured = share;
  closure.scope = kScopeRhizomes;
  ctx.diffuse(closure);
  if (auto total = gate.set(partial, origin.rank)) on_fire(*total);
}

Simulator::Simulator(const ChipConfig& chip, GraphStore& store, ActionRegistry registry,
                     RuntimeOptions options)
    : chip_(chip),
      store_(store),
      registry_(std::move(registry)),
      options_(options),
      network_(chip),
      throttle_period_(throttle_period(chip)) {
  auto& lco = registry_[static_cast<std::size_t>(ActionKind::LcoSet)];
  if (!lco.emit)
    lco.emit = [](const VertexObject&, const Payload& p, const DiffuseTarget&) {
      return std::optional<Emission>(Emission{ActionKind::LcoSet, p});
    };
  cells_.resize(chip.cell_count());
  for (CellId id = 0; id < chip.cell_count(); ++id) {
    cells_[id].id = id;
    cells_[id].coord = chip.coord_of(id);
  }
}

void Simulator::enqueue_action(ComputeCell& cell, ActionMessage msg) {
  cell.action_queue.push_back(std::move(msg));
  ++cell.counters.sram_word_accesses;
  cell.counters.action_queue_hwm = std::max(cell.counters.action_queue_hwm, cell.action_queue.size());
}

void Simulator::enqueue_closure(ComputeCell& cell, DiffuseClosure c) {
  cell.diffuse_queue.push_back(std::move(c));
  ++cell.counters.diffusions_created;
  cell.counters.diffuse_queue_hwm =
      std::max(cell.counters.diffuse_queue_hwm, cell.diffuse_queue.size());
}

void Simulator::germinate(Address target, ActionKind kind, Payload payload) {
  ActionMessage msg;
  msg.target = target;
  msg.kind = kind;
  msg.payload = payload;
  ++messages_created_;
  deliver(chip_.id_of(target.cell), std::move(msg));
}

void Simulator::deliver(CellId id, ActionMessage msg) {
  ComputeCell& cell = cells_[id];
  if (msg.target.cell != cell.coord)
    throw SimulationFault("message for another cell delivered to cell " + std::to_string(id));
  if (!store_.resolves(msg.target))
    throw SimulationFault("message addressed to unknown slot " + std::to_string(msg.target.slot) +
                          " on cell " + std::to_string(id));
  ++messages_delivered_;
  ++cell.counters.messages_delivered;
  if (msg.kind == ActionKind::LcoSet && !options_.lco_set_charged) {
    apply_lco_set(cell, msg);
    return;
  }
  ++cell.counters.actions_delivered;
  enqueue_action(cell, std::move(msg));
}

void Simulator::apply_lco_set(ComputeCell& cell, const ActionMessage& msg) {
  const ActionSpec& spec = registry_[static_cast<std::size_t>(ActionKind::LcoSet)];
  if (!spec.work) throw SimulationFault("no LcoSet handler registered");
  CellContext ctx(*this, cell, msg.target, true);
  VertexObject& obj = store_.at(msg.target);
  spec.work(obj, msg.payload, ctx);
  if (on_work) on_work(msg.target, obj, msg.kind, msg.payload);
  ++cell.counters.lco_sets;
  ++cell.counters.sram_word_accesses;
  ++cell.state_epoch;
}

void Simulator::use_slot(ComputeCell& cell) {
  if (cell.slot_cycle == cycle_)
    throw SimulationFault("one-slot rule violated on cell " + std::to_string(cell.id));
  cell.slot_cycle = cycle_;
  ++cell.counters.compute_cycles_busy;
}

void Simulator::finish_action(ComputeCell& cell) {
  for (auto& c : cell.held_closures) enqueue_closure(cell, std::move(c));
  cell.held_closures.clear();
  for (auto& m : cell.held_locals) enqueue_action(cell, std::move(m));
  cell.held_locals.clear();
}

void Simulator::pickup(ComputeCell& cell) {
  ActionMessage msg = std::move(cell.action_queue.front());
  cell.action_queue.pop_front();
  ++cell.counters.sram_word_accesses;
  use_slot(cell);
  const ActionSpec& spec = registry_[static_cast<std::size_t>(msg.kind)];
  if (!spec.work)
    throw SimulationFault("no handler registered for action kind " + std::string(to_string(msg.kind)));
  VertexObject& obj = store_.at(msg.target);
  const std::optional<bool> pred = spec.predicate ? spec.predicate(obj, msg.payload) : std::nullopt;
  if (pred && !*pred) {
    ++cell.counters.actions_predicate_false;
    return;
  }
  if (pred) ++cell.counters.actions_predicate_true;
  CellContext ctx(*this, cell, msg.target, false);
  const std::uint32_t work = std::max<std::uint32_t>(1, spec.work(obj, msg.payload, ctx));
  ++cell.counters.actions_invoked;
  ++cell.state_epoch;
  cell.counters.work_cycles += work;
  if (on_work) on_work(msg.target, obj, msg.kind, msg.payload);
  // With an inline predicate the pickup cycle was spent evaluating it.
  cell.busy_remaining = pred ? work : work - 1;
  if (cell.busy_remaining == 0) finish_action(cell);
}

bool Simulator::closure_live(const DiffuseClosure& c) const {
  const ActionSpec& spec = registry_[static_cast<std::size_t>(c.kind)];
  if (!spec.diffuse_predicate) return true;
  return spec.diffuse_predicate(store_.at(c.origin), c.captured);
}

bool Simulator::halted(ComputeCell& cell) {
  if (!chip_.throttling_enabled) return false;
  if (cycle_ >= cell.halted_until && cycle_ > 0 && network_.refused_in(cell.id, cycle_ - 1))
    cell.halted_until = cycle_ + throttle_period_;
  return cycle_ < cell.halted_until;
}

bool Simulator::try_stage(ComputeCell& cell) {
  if (halted(cell)) return false;
  DiffuseClosure& head = cell.diffuse_queue.front();
  const VertexObject& obj = store_.at(head.origin);
  const ActionSpec& spec = registry_[static_cast<std::size_t>(head.kind)];
  const std::uint32_t n = scope_size(obj, head.scope);
  while (head.cursor < n) {
    const DiffuseTarget target = *scope_target(obj, head.scope, head.cursor);
    const std::optional<Emission> em = spec.emit(obj, head.captured, target);
    if (!em) {
      ++head.cursor;
      continue;
    }
    ActionMessage msg;
    msg.target = target.address;
    msg.kind = em->kind;
    msg.payload = em->payload;
    if (target.address.cell == cell.coord) {
      cell.local_inbox.push_back(std::move(msg));
    } else if (!network_.inject(cell.id, std::move(msg), cycle_)) {
      return false;
    }
    use_slot(cell);
    ++messages_created_;
    ++cell.counters.propagates_staged;
    if (++head.cursor >= n) cell.diffuse_queue.pop_front();
    return true;
  }
  cell.diffuse_queue.pop_front();
  return true;
}

bool Simulator::filter_pass(ComputeCell& cell) {
  for (std::size_t i = 1; i < cell.diffuse_queue.size(); ++i) {
    DiffuseClosure& c = cell.diffuse_queue[i];
    if (c.checked_epoch == cell.state_epoch) continue;
    use_slot(cell);
    ++cell.counters.filter_evaluations;
    if (!closure_live(c)) {
      cell.diffuse_queue.erase(cell.diffuse_queue.begin() + static_cast<std::ptrdiff_t>(i));
      ++cell.counters.diffusions_pruned;
    } else {
      c.checked_epoch = cell.state_epoch;
    }
    return true;
  }
  return false;
}

void Simulator::schedule_cycle(ComputeCell& cell) {
  cell.status = CellStatus::Idle;
  if (cell.busy_remaining > 0) {
    use_slot(cell);
    cell.status = CellStatus::Computing;
    if (--cell.busy_remaining == 0) finish_action(cell);
    return;
  }
  bool blocked = false;
  if (!cell.diffuse_queue.empty()) {
    if (!closure_live(cell.diffuse_queue.front())) {
      cell.diffuse_queue.pop_front();
      ++cell.counters.diffusions_pruned;
      ++cell.counters.filter_evaluations;
      use_slot(cell);
      cell.status = CellStatus::Computing;
      return;
    }
    if (try_stage(cell)) {
      cell.status = CellStatus::Staging;
      return;
    }
    blocked = true;
  }
  if (!cell.action_queue.empty()) {
    if (blocked) ++cell.counters.actions_overlapped;
    pickup(cell);
    cell.status = CellStatus::Computing;
    return;
  }
  if (blocked && filter_pass(cell)) cell.status = CellStatus::Computing;
}

void Simulator::step() {
  arrivals_.clear();
  moves_last_cycle_ = network_.advance(cycle_, arrivals_);
  for (auto& [id, msg] : arrivals_) {
    audited_hops_ += msg.hops;
    deliver(id, std::move(msg));
  }
  std::vector<ActionMessage> inbox;
  for (auto& cell : cells_) {
    if (cell.local_inbox.empty()) continue;
    inbox.swap(cell.local_inbox);
    for (auto& msg : inbox) deliver(cell.id, std::move(msg));
    inbox.clear();
  }
  for (auto& cell : cells_) {
    if (cell.busy_remaining == 0 && cell.action_queue.empty() && cell.diffuse_queue.empty()) {
      cell.status = CellStatus::Idle;
      continue;
    }
    schedule_cycle(cell);
  }
  for (auto& [id, msg] : reduction_.release()) enqueue_action(cells_[id], std::move(msg));
  if (options_.frames_stride > 0 && cycle_ % options_.frames_stride == 0) capture_frame();
  ++cycle_;
}

void Simulator::capture_frame() {
  CongestionFrame frame{cycle_, chip_.dim_x, chip_.dim_y, std::string(cells_.size(), 'I')};
  for (const auto& cell : cells_) {
    CellStatus s = cell.status;
    if (std::any_of(kDirections.begin(), kDirections.end(), [&](Direction d) {
          return network_.link(cell.id, d).last_refusal == cycle_;
        }))
      s = CellStatus::Congested;
    else if (chip_.throttling_enabled && cycle_ < cell.halted_until)
      s = CellStatus::Throttled;
    frame.cells[cell.id] = status_letter(s);
  }
  frames_.push_back(std::move(frame));
}

bool Simulator::done() const {
  if (network_.in_flight() != 0 || reduction_.pending() != 0) return false;
  return std::all_of(cells_.begin(), cells_.end(), [](const ComputeCell& c) { return c.quiescent(); });
}

void Simulator::run(std::uint64_t cycle_cap) {
  while (!done()) {
    if (cycle_ >= cycle_cap) throw CycleCapExceeded(cycle_cap);
    step();
  }
}

std::uint64_t Simulator::local_in_flight() const {
  std::uint64_t n = 0;
  for (const auto& c : cells_) n += c.local_inbox.size();
  return n;
}

CellCounters Simulator::totals() const {
  CellCounters total;
  for (const auto& c : cells_) total += c.counters;
  return total;
}

}  // namespace ccasim
