#include <doctest.h>

#include <algorithm>
#include <array>
#include <vector>

#include "ccasim/lco.hpp"
#include "support.hpp"

using namespace ccasim;
using ccasim::testing::chip;

namespace {

VertexObject root_object(VertexId v) {
  VertexObject o;
  o.vertex_id = v;
  return o;
}

DiffuseClosure closure(Address origin, ActionKind kind, std::int64_t level, std::uint8_t scope = kScopeEdges) {
  DiffuseClosure c;
  c.origin = origin;
  c.kind = kind;
  c.captured.level = level;
  c.scope = scope;
  return c;
}

Payload level_payload(std::int64_t l) {
  Payload p;
  p.level = l;
  return p;
}

// 4x4 mesh with one VC of depth one, throttling off, and two objects:
// `a` on (0,0) with an edge to `b` on (2,0).
struct Toy {
  ChipConfig cfg;
  GraphStore store;
  Address a, b;
  std::unique_ptr<Simulator> sim;

  explicit Toy(AppKind app = AppKind::BFS, Coordinate b_cell = {2, 0}) : cfg(make_cfg()), store(cfg) {
    b = store.allocate(b_cell, root_object(1));
    VertexObject ao = root_object(0);
    ao.local_edges.push_back(Edge{b, 1.0});
    ao.out_degree = 1;
    a = store.allocate({0, 0}, ao);
    AppParams p;
    p.app = app;
    sim = std::make_unique<Simulator>(cfg, store, make_registry(p, store));
  }

  static ChipConfig make_cfg() {
    ChipConfig c = chip(4);
    c.vc_count = 1;
    c.vc_buffer_capacity = 1;
    c.throttling_enabled = false;
    return c;
  }

  void block_east() {
    ActionMessage m;
    m.target = b;
    sim->network().link(0, Direction::East).vcs[0].push(m, 0);
  }
  ComputeCell& cell0() { return sim->cell(0); }
};

}  // namespace

TEST_SUITE("cc-runtime") {
  TEST_CASE("AND gate fires once per fill and resets") {
    AndGateLCO<double> g(3, LcoOp::Sum);
    CHECK_FALSE(g.set(1.0).has_value());
    CHECK_FALSE(g.set(2.0).has_value());
    CHECK(g.count() == 2);
    const auto fired = g.set(4.0);
    REQUIRE(fired.has_value());
    CHECK(*fired == 7.0);
    CHECK(g.count() == 0);
    CHECK(g.fired() == 1);
    CHECK_FALSE(g.set(1.0).has_value());
    CHECK(g.fired() == 1);
  }

  TEST_CASE("AND gate arity must be positive") { CHECK_THROWS(AndGateLCO<double>(0, LcoOp::Sum)); }

  TEST_CASE("keyed AND gate is interleaving-independent") {
    const std::array<double, 4> vals{0.1, 0.7, 1e-17, 0.3};
    std::array<std::uint32_t, 4> order{0, 1, 2, 3};
    std::optional<double> first;
    do {
      AndGateLCO<double> g(4, LcoOp::Sum);
      std::optional<double> out;
      int fires = 0;
      for (auto k : order)
        if (auto r = g.set(vals[k], k)) {
          out = r;
          ++fires;
        }
      REQUIRE(fires == 1);
      if (!first) first = out;
      CHECK(*out == *first);
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(*first == ((0.1 + 0.7) + 1e-17) + 0.3);
  }

  TEST_CASE("gate operators") {
    AndGateLCO<double> mn(2, LcoOp::Min), mx(2, LcoOp::Max), ow(2, LcoOp::Overwrite);
    mn.set(4.0, 0);
    CHECK(*mn.set(2.0, 1) == 2.0);
    mx.set(4.0, 0);
    CHECK(*mx.set(2.0, 1) == 4.0);
    ow.set(4.0, 1);
    CHECK(*ow.set(2.0, 0) == 4.0);  // highest key is folded last
  }

  TEST_CASE("delivery appends to the action queue") {
    Toy t;
    t.sim->germinate(t.a, ActionKind::BFS, level_payload(3));
    CHECK(t.cell0().action_queue.size() == 1);
    CHECK(t.cell0().counters.actions_delivered == 1);
  }

  TEST_CASE("delivery to an unknown slot is a simulation fault") {
    Toy t;
    CHECK_THROWS_AS(t.sim->germinate(Address{{0, 0}, 42}, ActionKind::BFS, level_payload(0)), SimulationFault);
  }

  TEST_CASE("LcoSet applies at delivery and the trigger is enqueued locally") {
    const ChipConfig cfg = chip(4);
    GraphStore store(cfg);
    const Address x = store.allocate({1, 1}, root_object(0));
    ActionRegistry reg;
    reg[static_cast<std::size_t>(ActionKind::LcoSet)].work = [](VertexObject& o, const Payload& p,
                                                                  CellContext& ctx) -> std::uint32_t {
      auto& g = o.app.score_gate.try_emplace(0, 3, LcoOp::Sum).first->second;
      if (auto total = g.set(p.value)) {
        ActionMessage m;
        m.target = ctx.self();
        m.kind = ActionKind::BFS;
        m.payload.value = *total;
        ctx.local_action(m);
      }
      return 1;
    };
    Simulator sim(cfg, store, reg);
    Payload p;
    p.value = 1.0;
    sim.germinate(x, ActionKind::LcoSet, p);
    sim.germinate(x, ActionKind::LcoSet, p);
    const CellId id = cfg.id_of({1, 1});
    CHECK(sim.cell(id).action_queue.empty());
    sim.germinate(x, ActionKind::LcoSet, p);
    REQUIRE(sim.cell(id).action_queue.size() == 1);
    CHECK(sim.cell(id).action_queue.front().payload.value == 3.0);
    CHECK(store.at(x).app.score_gate.at(0).count() == 0);
    CHECK(sim.cell(id).counters.lco_sets == 3);
    CHECK(sim.cell(id).counters.compute_cycles_busy == 0);
  }

  TEST_CASE("a queued action starts with an empty diffuse queue") {
    Toy t;
    t.sim->germinate(t.a, ActionKind::BFS, level_payload(0));
    t.sim->step();
    CHECK(t.cell0().counters.actions_invoked == 1);
    CHECK(t.cell0().busy_remaining == 2);  // predicate cycle spent, two work cycles left
    CHECK(t.store.at(t.a).app.level == 0);
    t.sim->step();
    t.sim->step();
    CHECK(t.cell0().busy_remaining == 0);
    CHECK(t.cell0().diffuse_queue.size() == 1);  // released on completion
    CHECK(t.cell0().counters.work_cycles == 2);
    CHECK(t.cell0().counters.compute_cycles_busy == 3);
  }

  TEST_CASE("a false inline predicate costs one cycle and changes nothing") {
    Toy t;
    t.store.at(t.a).app.level = 2;
    t.sim->germinate(t.a, ActionKind::BFS, level_payload(4));
    t.sim->step();
    CHECK(t.cell0().counters.actions_predicate_false == 1);
    CHECK(t.cell0().busy_remaining == 0);
    CHECK(t.store.at(t.a).app.level == 2);
    CHECK(t.cell0().diffuse_queue.empty());
  }

  TEST_CASE("blocked diffuse head overlaps with an action") {
    Toy t;
    t.store.at(t.a).app.level = 0;
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 0));
    t.block_east();
    t.sim->germinate(t.a, ActionKind::BFS, level_payload(7));
    t.sim->step();
    CHECK(t.cell0().counters.actions_overlapped == 1);
    CHECK(t.cell0().counters.propagates_staged == 0);
    CHECK(t.cell0().diffuse_queue.front().cursor == 0);  // refused, cursor unchanged
    CHECK(t.sim->network().link(0, Direction::East).contention_cycles == 1);
  }

  TEST_CASE("filter pass prunes a stale closure behind a blocked head") {
    Toy t;
    t.store.at(t.a).app.level = 2;
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 2));
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 4));
    t.block_east();
    t.sim->step();
    CHECK(t.cell0().counters.filter_evaluations == 1);
    CHECK(t.cell0().counters.diffusions_pruned == 1);
    CHECK(t.cell0().diffuse_queue.size() == 1);
  }

  TEST_CASE("a stale diffuse head is pruned when it reaches the front") {
    Toy t;
    t.store.at(t.a).app.level = 2;
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 4));
    t.sim->step();
    CHECK(t.cell0().counters.diffusions_pruned == 1);
    CHECK(t.cell0().counters.propagates_staged == 0);
    CHECK(t.cell0().diffuse_queue.empty());
  }

  TEST_CASE("PageRank closures are never pruned and are checked once per state change") {
    Toy t(AppKind::PageRank);
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::PageRank, 0));
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::PageRank, 0));
    t.block_east();
    t.sim->step();
    t.sim->step();
    t.sim->step();
    CHECK(t.cell0().counters.filter_evaluations == 1);
    CHECK(t.cell0().counters.diffusions_pruned == 0);
    CHECK(t.cell0().diffuse_queue.size() == 2);
  }

  TEST_CASE("same-cell propagate bypasses the network and lands next cycle") {
    Toy t(AppKind::BFS, {0, 0});
    t.store.at(t.a).app.level = 0;
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 0));
    t.sim->step();
    CHECK(t.cell0().counters.propagates_staged == 1);
    CHECK(t.cell0().local_inbox.size() == 1);
    CHECK(t.cell0().counters.messages_delivered == 0);
    CHECK(t.sim->network().in_flight() == 0);
    t.sim->step();
    CHECK(t.cell0().counters.messages_delivered == 1);
    CHECK(t.sim->network().total_hops() == 0);
  }

  TEST_CASE("a throttled cell stages nothing even with buffer space") {
    Toy t;
    t.sim.reset();
    t.cfg.throttling_enabled = true;
    AppParams p;
    t.sim = std::make_unique<Simulator>(t.cfg, t.store, make_registry(p, t.store));
    t.store.at(t.a).app.level = 0;
    t.cell0().diffuse_queue.push_back(closure(t.a, ActionKind::BFS, 0));
    t.cell0().halted_until = 5;
    for (int i = 0; i < 5; ++i) t.sim->step();
    CHECK(t.cell0().counters.propagates_staged == 0);
    t.sim->step();
    CHECK(t.cell0().counters.propagates_staged == 1);
  }

  TEST_CASE("termination detection") {
    Toy t;
    CHECK(t.sim->done());
    ActionMessage m;
    m.target = t.b;
    REQUIRE(t.sim->network().inject(0, m, 0));
    CHECK_FALSE(t.sim->done());
    for (int i = 0; i < 3; ++i) t.sim->step();
    CHECK(t.sim->network().in_flight() == 0);
    CHECK(t.sim->cell(t.cfg.id_of(t.b.cell)).counters.messages_delivered == 1);
  }

  TEST_CASE("rhizome collapse folds every member to the same value") {
    struct Case {
      std::vector<double> partials;
      LcoOp op;
      double expect;
    };
    const std::vector<Case> cases{{{0.7}, LcoOp::Sum, 0.7},
                                  {{0.2, 0.3, 0.5}, LcoOp::Sum, 1.0},
                                  {{4.0, 2.0}, LcoOp::Min, 2.0}};
    for (const auto& c : cases) {
      const ChipConfig cfg = chip(4);
      GraphStore store(cfg);
      std::vector<Address> members;
      const auto r = static_cast<std::uint16_t>(c.partials.size());
      for (std::uint16_t i = 0; i < r; ++i) {
        VertexObject o = root_object(0);
        o.rank = i;
        o.rhizome_size = r;
        members.push_back(store.allocate(cfg.coord_of(static_cast<CellId>(i * 5)), o));
      }
      for (const auto& m : members)
        for (const auto& n : members)
          if (m != n) store.at(m).rhizome_links.push_back(n);
      const LcoOp op = c.op;
      auto gate = [op](VertexObject& o) -> AndGateLCO<double>& {
        return o.app.score_gate.try_emplace(0, o.rhizome_size, op).first->second;
      };
      ActionRegistry reg;
      reg[static_cast<std::size_t>(ActionKind::Germinate)].work = [gate](VertexObject& o, const Payload& p,
                                                                          CellContext& ctx) -> std::uint32_t {
        rhizome_collapse(ctx, o, gate(o), p.value, Payload{}, [&o](double total) { o.app.score = total; });
        return 1;
      };
      reg[static_cast<std::size_t>(ActionKind::LcoSet)].work = [gate](VertexObject& o, const Payload& p,
                                                                        CellContext&) -> std::uint32_t {
        if (auto total = gate(o).set(p.value, p.rank)) o.app.score = *total;
        return 1;
      };
      Simulator sim(cfg, store, reg);
      for (std::size_t i = 0; i < members.size(); ++i) {
        Payload p;
        p.value = c.partials[i];
        sim.germinate(members[i], ActionKind::Germinate, p);
      }
      sim.run(10'000);
      for (const auto& m : members) {
        CHECK(store.at(m).app.score == c.expect);
        CHECK(store.at(m).app.score_gate.at(0).fired() == 1);
      }
    }
  }
}
