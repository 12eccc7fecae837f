#include "ccasim/apps.hpp"

#include <algorithm>
#include <string>

namespace ccasim {

std::string_view to_string(AppKind a) {
  switch (a) {
    case AppKind::BFS: return "bfs";
    case AppKind::SSSP: return "sssp";
    case AppKind::PageRank: return "pagerank";
  }
  return "?";
}

AppKind parse_app(std::string_view text) {
  if (text == "bfs" || text == "BFS") return AppKind::BFS;
  if (text == "sssp" || text == "SSSP") return AppKind::SSSP;
  if (text == "pagerank" || text == "PageRank" || text == "pr") return AppKind::PageRank;
  throw ConfigError("unknown application '" + std::string(text) + "'");
}

namespace {

constexpr std::uint8_t kAllLinks = kScopeEdges | kScopeGhosts | kScopeRhizomes;
constexpr std::uint8_t kTreeLinks = kScopeEdges | kScopeGhosts;
constexpr std::uint32_t kLabelWork = 2;
constexpr std::uint32_t kContributionWork = 3;
constexpr std::uint8_t kContribution = 0;
constexpr std::uint8_t kTrigger = 1;

DiffuseClosure closure_for(Address origin, ActionKind kind, Payload captured, std::uint8_t scope) {
  DiffuseClosure c;
  c.origin = origin;
  c.kind = kind;
  c.captured = captured;
  c.scope = scope;
  return c;
}

// BFS and SSSP differ only in the label slot and the edge relaxation.
struct LevelLabel {
  static bool better(const VertexObject& o, const Payload& p) { return p.level < o.app.level; }
  static void set(VertexObject& o, const Payload& p) { o.app.level = std::min(o.app.level, p.level); }
  static bool current(const VertexObject& o, const Payload& p) { return o.app.level == p.level; }
  static Payload relax(Payload p, double) {
    p.level += 1;
    return p;
  }
};

struct DistanceLabel {
  static bool better(const VertexObject& o, const Payload& p) { return p.value < o.app.distance; }
  static void set(VertexObject& o, const Payload& p) {
    o.app.distance = std::min(o.app.distance, p.value);
  }
  static bool current(const VertexObject& o, const Payload& p) { return o.app.distance == p.value; }
  static Payload relax(Payload p, double w) {
    p.value += w;
    return p;
  }
};

template <class Label>
ActionRegistry monotone_registry(ActionKind kind) {
  ActionRegistry reg;
  const auto emit = [kind](const VertexObject&, const Payload& p,
                           const DiffuseTarget& t) -> std::optional<Emission> {
    switch (t.cls) {
      case TargetClass::Edge: return Emission{kind, Label::relax(p, t.weight)};
      case TargetClass::Ghost: return Emission{kind, p};
      case TargetClass::Rhizome: return Emission{ActionKind::RhizomeShare, p};
    }
    return std::nullopt;
  };
  const auto predicate = [](const VertexObject& o, const Payload& p) -> std::optional<bool> {
    if (!o.is_root) return std::nullopt;
    return Label::better(o, p);
  };
  const auto diffuse_predicate = [](const VertexObject& o, const Payload& p) {
    return !o.is_root || Label::current(o, p);
  };

  ActionSpec& main = reg[static_cast<std::size_t>(kind)];
  main.predicate = predicate;
  main.work = [kind](VertexObject& o, const Payload& p, CellContext& ctx) -> std::uint32_t {
    if (o.is_root) {
      Label::set(o, p);
      ctx.sram(2);
      ctx.diffuse(closure_for(ctx.self(), kind, p, kAllLinks));
    } else {
      ctx.diffuse(closure_for(ctx.self(), kind, p, kTreeLinks));
    }
    return kLabelWork;
  };
  main.diffuse_predicate = diffuse_predicate;
  main.emit = emit;

  // Sibling shares and germination update the label but never re-share.
  for (ActionKind k : {ActionKind::RhizomeShare, ActionKind::Germinate}) {
    ActionSpec& s = reg[static_cast<std::size_t>(k)];
    s.predicate = predicate;
    s.work = [k](VertexObject& o, const Payload& p, CellContext& ctx) -> std::uint32_t {
      Label::set(o, p);
      ctx.sram(2);
      ctx.diffuse(closure_for(ctx.self(), k, p, kTreeLinks));
      return kLabelWork;
    };
    s.diffuse_predicate = diffuse_predicate;
    s.emit = emit;
  }
  return reg;
}

struct PageRankRules {
  double n;
  std::uint32_t k_max;
  double damping;

  void try_trigger(CellContext& ctx, VertexObject& o) const {
    AppSlots& a = o.app;
    if (a.trigger_outstanding || a.iteration >= k_max) return;
    auto it = a.collapsed.find(a.iteration);
    if (it == a.collapsed.end()) return;
    ActionMessage msg;
    msg.target = ctx.self();
    msg.kind = ActionKind::PageRank;
    msg.payload.value = it->second;
    msg.payload.iteration = a.iteration;
    msg.payload.aux = kTrigger;
    a.collapsed.erase(it);
    a.trigger_outstanding = true;
    if (ctx.reduction().complete(msg.payload.iteration))
      ctx.local_action(msg);
    else
      ctx.defer_on_reduction(msg.payload.iteration, msg);
  }

  void on_collapsed(CellContext& ctx, VertexObject& o, std::uint32_t tag, double total) const {
    o.app.collapsed[tag] = total;
    try_trigger(ctx, o);
  }

  AndGateLCO<double>& score_gate(VertexObject& o, std::uint32_t tag) const {
    return o.app.score_gate.try_emplace(tag, o.rhizome_size, LcoOp::Sum).first->second;
  }

  void collapse(CellContext& ctx, VertexObject& o, std::uint32_t tag, double partial) const {
    auto& gate = score_gate(o, tag);
    Payload share;
    share.iteration = tag;
    bool fired = false;
    double total = 0.0;
    rhizome_collapse(ctx, o, gate, partial, share, [&](double t) {
      fired = true;
      total = t;
    });
    if (fired) {
      o.app.score_gate.erase(tag);
      on_collapsed(ctx, o, tag, total);
    }
  }

  // Emits this member's share of iteration `tag` and opens its gates.
  void open_iteration(CellContext& ctx, VertexObject& o, std::uint32_t tag) const {
    if (o.out_degree > 0) {
      Payload c;
      c.value = o.app.score / static_cast<double>(o.out_degree);
      c.iteration = tag;
      c.aux = kContribution;
      ctx.diffuse(closure_for(ctx.self(), ActionKind::PageRank, c, kTreeLinks));
    } else if (o.rank == 0) {
      ctx.reduction().contribute(tag, o.vertex_id, o.app.score);
    }
    if (o.app.local_in_degree == 0) collapse(ctx, o, tag, 0.0);
  }

  std::uint32_t contribution(VertexObject& o, const Payload& p, CellContext& ctx) const {
    auto& gate = o.app.msg_count.try_emplace(p.iteration, o.app.local_in_degree, LcoOp::Sum)
                     .first->second;
    ctx.sram(2);
    if (auto total = gate.set(p.value)) {
      o.app.msg_count.erase(p.iteration);
      collapse(ctx, o, p.iteration, *total);
    }
    return kContributionWork;
  }

  std::uint32_t trigger(VertexObject& o, const Payload& p, CellContext& ctx) const {
    AppSlots& a = o.app;
    if (a.iteration != p.iteration)
      throw SimulationFault("PageRank trigger for iteration " + std::to_string(p.iteration) +
                            " on a member at iteration " + std::to_string(a.iteration));
    const double dangling = ctx.reduction().value(p.iteration);
    a.score = (1.0 - damping) / n + damping * (p.value + dangling / n);
    a.iteration = p.iteration + 1;
    a.trigger_outstanding = false;
    ctx.sram(2);
    if (a.iteration < k_max) open_iteration(ctx, o, a.iteration);
    try_trigger(ctx, o);
    return std::min<std::uint32_t>(kPageRankCostCap, 3 + o.rhizome_size);
  }
};

ActionRegistry pagerank_registry(const PageRankRules rules) {
  ActionRegistry reg;
  const auto no_predicate = [](const VertexObject&, const Payload&) -> std::optional<bool> {
    return std::nullopt;
  };

  ActionSpec& pr = reg[static_cast<std::size_t>(ActionKind::PageRank)];
  pr.predicate = no_predicate;
  pr.work = [rules](VertexObject& o, const Payload& p, CellContext& ctx) -> std::uint32_t {
    if (!o.is_root) {
      ctx.diffuse(closure_for(ctx.self(), ActionKind::PageRank, p, kTreeLinks));
      return kLabelWork;
    }
    return p.aux == kTrigger ? rules.trigger(o, p, ctx) : rules.contribution(o, p, ctx);
  };
  pr.emit = [](const VertexObject&, const Payload& p, const DiffuseTarget& t) -> std::optional<Emission> {
    if (t.cls == TargetClass::Rhizome) return std::nullopt;
    return Emission{ActionKind::PageRank, p};
  };

  ActionSpec& lco = reg[static_cast<std::size_t>(ActionKind::LcoSet)];
  lco.predicate = no_predicate;
  lco.work = [rules](VertexObject& o, const Payload& p, CellContext& ctx) -> std::uint32_t {
    auto& gate = rules.score_gate(o, p.iteration);
    if (auto total = gate.set(p.value, p.rank)) {
      o.app.score_gate.erase(p.iteration);
      rules.on_collapsed(ctx, o, p.iteration, *total);
    }
    return 1;
  };

  ActionSpec& germ = reg[static_cast<std::size_t>(ActionKind::Germinate)];
  germ.predicate = no_predicate;
  germ.work = [rules](VertexObject& o, const Payload&, CellContext& ctx) -> std::uint32_t {
    o.app.score = 1.0 / rules.n;
    o.app.iteration = 0;
    ctx.sram(2);
    if (rules.k_max > 0) rules.open_iteration(ctx, o, 0);
    return 1;
  };
  return reg;
}

}  // namespace

ActionRegistry make_registry(const AppParams& params, const GraphStore& store) {
  switch (params.app) {
    case AppKind::BFS: return monotone_registry<LevelLabel>(ActionKind::BFS);
    case AppKind::SSSP: return monotone_registry<DistanceLabel>(ActionKind::SSSP);
    case AppKind::PageRank:
      if (params.damping < 0.0 || params.damping > 1.0)
        throw ConfigError("damping must lie in [0, 1]");
      return pagerank_registry(
          PageRankRules{static_cast<double>(store.vertex_count()), params.iterations, params.damping});
  }
  throw ConfigError("unknown application");
}

void germinate(Simulator& sim, const AppParams& params) {
  const GraphStore& store = sim.store();
  if (params.app == AppKind::PageRank) {
    std::uint32_t dangling = 0;
    for (const auto& rz : store.rhizomes())
      if (store.at(rz.members.front()).out_degree == 0) ++dangling;
    sim.reduction().configure(dangling, params.iterations);
    for (const auto& rz : store.rhizomes())
      for (const Address& m : rz.members) sim.germinate(m, ActionKind::Germinate, Payload{});
    return;
  }
  if (params.source >= store.vertex_count())
    throw ConfigError("source vertex " + std::to_string(params.source) + " is not in the graph");
  Payload p;
  p.level = 0;
  p.value = 0.0;
  for (const Address& m : store.members(params.source)) sim.germinate(m, ActionKind::Germinate, p);
}

AppResult extract_result(const GraphStore& store, AppKind app) {
  AppResult r;
  const VertexId n = store.vertex_count();
  for (VertexId v = 0; v < n; ++v) {
    const AppSlots& a = store.at(store.members(v).front()).app;
    switch (app) {
      case AppKind::BFS: r.level.push_back(a.level); break;
      case AppKind::SSSP: r.distance.push_back(a.distance); break;
      case AppKind::PageRank: r.score.push_back(a.score); break;
    }
  }
  return r;
}

bool rhizomes_consistent(const GraphStore& store, AppKind app) {
  for (const auto& rz : store.rhizomes()) {
    const AppSlots& first = store.at(rz.members.front()).app;
    for (const Address& m : rz.members) {
      const AppSlots& a = store.at(m).app;
      const bool same = app == AppKind::BFS    ? a.level == first.level
                        : app == AppKind::SSSP ? a.distance == first.distance
                                               : a.score == first.score;
      if (!same) return false;
    }
  }
  return true;
}

}  // namespace ccasim
