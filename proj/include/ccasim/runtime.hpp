#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ccasim/geometry.hpp"
#include "ccasim/graph_store.hpp"
#include "ccasim/message.hpp"
#include "ccasim/network.hpp"

namespace ccasim {

/// Internal consistency failure (e.g. a message addressed to a dangling slot).
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleCapExceeded : public std::runtime_error {
 public:
  CycleCapExceeded(std::uint64_t cap)
      : std::runtime_error("cycle cap of " + std::to_string(cap) + " exceeded"), cap_(cap) {}
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
};

enum class TargetClass : std::uint8_t { Edge, Ghost, Rhizome };

enum ScopeFlags : std::uint8_t { kScopeEdges = 1, kScopeGhosts = 2, kScopeRhizomes = 4 };

struct DiffuseTarget {
  TargetClass cls = TargetClass::Edge;
  Address address;
  double weight = 1.0;
};

struct Emission {
  ActionKind kind;
  Payload payload;
};

/// Deferred propagation over the origin's links, evaluated lazily.
struct DiffuseClosure {
  Address origin;
  ActionKind kind = ActionKind::BFS;  // handler set supplying the predicate and emitter
  Payload captured;
  std::uint8_t scope = kScopeEdges;
  std::uint32_t cursor = 0;
  std::uint64_t checked_epoch = kNever;
};

class CellContext;

/// Handler triplet for one action kind.
struct ActionSpec {
  // Inline predicate; nullopt means the target has no predicate (always runs).
  std::function<std::optional<bool>(const VertexObject&, const Payload&)> predicate;
  // Mutates the target and returns the work cycles to charge.
  std::function<std::uint32_t(VertexObject&, const Payload&, CellContext&)> work;
  std::function<bool(const VertexObject&, const Payload&)> diffuse_predicate;
  std::function<std::optional<Emission>(const VertexObject&, const Payload&, const DiffuseTarget&)>
      emit;
};

using ActionRegistry = std::array<ActionSpec, kActionKindCount>;

/// Chip-level per-iteration reduction used for the dangling-mass term.
/// Modelled as zero-cost hardware, like termination signalling.
class GlobalReduction {
 public:
  void configure(std::uint32_t arity, std::uint32_t iterations);
  std::uint32_t arity() const { return arity_; }
  void contribute(std::uint32_t iteration, std::uint32_t key, double value);
  bool complete(std::uint32_t iteration) const;
  double value(std::uint32_t iteration) const;

  void defer(std::uint32_t iteration, CellId cell, ActionMessage msg);
  /// Pending actions whose iteration is now complete, in deferral order.
  std::vector<std::pair<CellId, ActionMessage>> release();
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Slot {
    std::vector<std::pair<std::uint32_t, double>> parts;
  };
  std::uint32_t arity_ = 0;
  std::vector<Slot> slots_;
  struct Deferred {
    std::uint32_t iteration;
    CellId cell;
    ActionMessage msg;
  };
  std::vector<Deferred> pending_;
};

struct CellCounters {
  std::uint64_t messages_delivered = 0;
  std::uint64_t actions_delivered = 0;
  std::uint64_t actions_invoked = 0;
  std::uint64_t actions_predicate_true = 0;
  std::uint64_t actions_predicate_false = 0;
  std::uint64_t actions_overlapped = 0;
  std::uint64_t diffusions_created = 0;
  std::uint64_t diffusions_pruned = 0;
  std::uint64_t propagates_staged = 0;
  std::uint64_t filter_evaluations = 0;
  std::uint64_t work_cycles = 0;
  std::uint64_t compute_cycles_busy = 0;
  std::uint64_t sram_word_accesses = 0;
  std::uint64_t lco_sets = 0;
  std::size_t action_queue_hwm = 0;
  std::size_t diffuse_queue_hwm = 0;

  CellCounters& operator+=(const CellCounters& o);
};

enum class CellStatus : std::uint8_t { Idle, Computing, Staging, Throttled, Congested };

char status_letter(CellStatus s);

struct ComputeCell {
  CellId id = 0;
  Coordinate coord;
  std::deque<ActionMessage> action_queue;
  std::deque<DiffuseClosure> diffuse_queue;
  std::vector<ActionMessage> local_inbox;  // same-cell propagates, delivered next cycle
  std::uint32_t busy_remaining = 0;
  std::vector<DiffuseClosure> held_closures;
  std::vector<ActionMessage> held_locals;
  std::uint64_t halted_until = 0;
  std::uint64_t state_epoch = 0;
  std::uint64_t slot_cycle = kNever;  // last cycle whose execution slot was used
  CellStatus status = CellStatus::Idle;
  CellCounters counters;

  bool quiescent() const {
    return busy_remaining == 0 && action_queue.empty() && diffuse_queue.empty() &&
           local_inbox.empty() && held_closures.empty() && held_locals.empty();
  }
};

struct RuntimeOptions {
  bool lco_set_charged = false;  // charge LcoSet one action cycle instead of applying at delivery
  std::uint64_t frames_stride = 0;
};

struct CongestionFrame {
  std::uint64_t cycle = 0;
  std::int32_t dim_x = 0;
  std::int32_t dim_y = 0;
  std::string cells;  // row-major status letters
};

class Simulator;

/// Handle passed to work rules for side effects on the owning cell.
class CellContext {
 public:
  CellContext(Simulator& sim, ComputeCell& cell, Address self, bool immediate)
      : sim_(sim), cell_(cell), self_(self), immediate_(immediate) {}

  void diffuse(DiffuseClosure closure);
  void local_action(ActionMessage msg);
  GlobalReduction& reduction();
  void defer_on_reduction(std::uint32_t iteration, ActionMessage msg);
  void sram(std::uint32_t words);
  std::uint64_t cycle() const;
  Address self() const { return self_; }
  GraphStore& store();

 private:
  Simulator& sim_;
  ComputeCell& cell_;
  Address self_;
  bool immediate_;
};

/// Number of targets a closure with `scope` would visit on `o`.
std::uint32_t scope_size(const VertexObject& o, std::uint8_t scope);
std::optional<DiffuseTarget> scope_target(const VertexObject& o, std::uint8_t scope,
                                          std::uint32_t index);

/// All-reduce across a vertex's rhizome: ships `partial` to every sibling as
/// an LcoSet and folds it into the local gate; `on_fire` runs if this set
/// completed the gate.
void rhizome_collapse(CellContext& ctx, const VertexObject& origin, AndGateLCO<double>& gate,
                      double partial, Payload share, const std::function<void(double)>& on_fire);

/// Cycle-level chip model: network, cells and the handler registry.
class Simulator {
 public:
  Simulator(const ChipConfig& chip, GraphStore& store, ActionRegistry registry,
            RuntimeOptions options = {});

  const ChipConfig& chip() const { return chip_; }
  GraphStore& store() { return store_; }
  const GraphStore& store() const { return store_; }
  Network& network() { return network_; }
  const Network& network() const { return network_; }
  GlobalReduction& reduction() { return reduction_; }
  const std::vector<ComputeCell>& cells() const { return cells_; }
  ComputeCell& cell(CellId id) { return cells_.at(id); }

  /// Host-side injection before cycle 0; charged no hops.
  void germinate(Address target, ActionKind kind, Payload payload);

  void step();
  bool done() const;
  /// Runs until termination; throws CycleCapExceeded past `cycle_cap`.
  void run(std::uint64_t cycle_cap);

  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t messages_created() const { return messages_created_; }
  std::uint64_t messages_delivered() const { return messages_delivered_; }
  std::uint64_t local_in_flight() const;
  std::uint64_t audited_hops() const { return audited_hops_; }
  std::uint64_t moves_last_cycle() const { return moves_last_cycle_; }
  CellCounters totals() const;
  const std::vector<CongestionFrame>& frames() const { return frames_; }
  std::uint32_t throttle_window() const { return throttle_period_; }

  /// Evaluates the throttle rule for `cell` at the current cycle and
  /// reports whether it is halted.
  bool throttle_check(CellId cell) { return halted(cells_.at(cell)); }

  /// Observer called after each work application; tests use it to audit
  /// label monotonicity and message counts.
  std::function<void(Address, const VertexObject&, ActionKind, const Payload&)> on_work;

 private:
  friend class CellContext;

  void deliver(CellId cell, ActionMessage msg);
  void apply_lco_set(ComputeCell& cell, const ActionMessage& msg);
  void schedule_cycle(ComputeCell& cell);
  void use_slot(ComputeCell& cell);
  void pickup(ComputeCell& cell);
  void finish_action(ComputeCell& cell);
  bool closure_live(const DiffuseClosure& c) const;
  bool try_stage(ComputeCell& cell);
  bool halted(ComputeCell& cell);
  bool filter_pass(ComputeCell& cell);
  void enqueue_action(ComputeCell& cell, ActionMessage msg);
  void enqueue_closure(ComputeCell& cell, DiffuseClosure c);
  void capture_frame();

  ChipConfig chip_;
  GraphStore& store_;
  ActionRegistry registry_;
  RuntimeOptions options_;
  Network network_;
  GlobalReduction reduction_;
  std::vector<ComputeCell> cells_;
  std::uint32_t throttle_period_;
  std::uint64_t cycle_ = 0;
  std::uint64_t messages_created_ = 0;
  std::uint64_t messages_delivered_ = 0;
  std::uint64_t audited_hops_ = 0;
  std::uint64_t moves_last_cycle_ = 0;
  std::vector<std::pair<CellId, ActionMessage>> arrivals_;
  std::vector<CongestionFrame> frames_;
};

}  // namespace ccasim
