#include "tpanet/cli.hpp"

#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "tpanet/denotational.hpp"

namespace tpanet {

std::string to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Ok: return "ok";
    case Verdict::Status::Witness: return "witness";
    case Verdict::Status::Error: return "error";
  }
  return "?";
}

namespace {

std::string escape(const std::string& v) {
  std::string out;
  for (char c : v) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ExplosionGuard: return 3;
    case ErrorCode::SyntaxError:
    case ErrorCode::NameError:
    case ErrorCode::TypeError:
    case ErrorCode::Configuration: return 2;
    default: return 1;
  }
}

struct Session {
  NetworkDescription net;
  Expr target;
  std::size_t horizon = 3;
  std::optional<std::size_t> bound;
  std::uint64_t seed = 1;
  ExploreOptions explore;
  EnumerationOptions enumeration;
  ComposeOptions compose;
};

Session open_session(const std::string& text, const CommandOptions& opts) {
  Session s;
  s.net = parse_network(text);
  const auto& cfg = s.net.config;
  s.horizon = opts.horizon.value_or(cfg.horizon.value_or(3));
  s.bound = opts.bound ? opts.bound : cfg.bound;
  s.seed = opts.seed.value_or(cfg.seed.value_or(1));
  if (auto budget = opts.budget ? opts.budget : cfg.budget) {
    s.explore.node_budget = *budget;
    s.enumeration.run_budget = *budget;
  }
  if (s.bound) s.explore.bounds = InputBounds{*s.bound, {}};
  s.compose.horizon = s.horizon;
  s.compose.explore = s.explore;

  if (opts.net) {
    if (!s.net.find_net(*opts.net) && !s.net.find_automaton(*opts.net))
      throw Error(ErrorCode::NameError, "no net or automaton named '" + *opts.net + "'");
    s.target.name = *opts.net;
  } else if (!s.net.nets.empty()) {
    s.target.name = s.net.nets.back().name;
  } else if (!s.net.automata.empty()) {
    s.target.name = s.net.automata.back().name;
  } else {
    throw Error(ErrorCode::Configuration, "the description declares nothing to run");
  }
  return s;
}

// Follows net references and hides down to the nearest composition.
const Expr* find_compose(const NetworkDescription& net, const Expr& e) {
  if (e.kind == Expr::Kind::Compose) return &e;
  if (e.kind == Expr::Kind::Hide) return find_compose(net, e.children[0]);
  if (const NetDecl* n = net.find_net(e.name)) return find_compose(net, n->expr);
  return nullptr;
}

const Expr& unfold(const NetworkDescription& net, const Expr& e) {
  if (e.kind == Expr::Kind::Ref)
    if (const NetDecl* n = net.find_net(e.name)) return unfold(net, n->expr);
  return e;
}

class Report {
 public:
  void line(const std::string& text) { text_ += text + "\n"; }
  void field(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }
  void both(const std::string& key, const std::string& value) {
    line(key + ": " + value);
    field(key, value);
  }

  Verdict finish(const std::string& command, Verdict::Status status, int code) {
    return Verdict{command, status, code, std::move(fields_), std::move(text_)};
  }

 private:
  std::string text_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string pulse_text(const PulseVerdict& v) {
  if (v.ok) return "ok (" + std::to_string(v.inputs_checked) + " inputs)";
  return "fails at n=" + std::to_string(v.witness->n) + " iota=" +
         escape(render(v.witness->iota)) + " kappa=" + escape(render(v.witness->kappa));
}

Verdict cmd_check(const Session& s) {
  Report r;
  bool witness = false;
  std::size_t index = 0;
  std::set<std::string> done;
  PulseOptions pulse;
  pulse.explore = s.explore;

  std::function<void(const Expr&)> visit = [&](const Expr& raw) {
    const Expr& e = unfold(s.net, raw);
    for (const auto& c : e.children) visit(c);
    const std::string label = render(e);
    if (!done.insert(label).second) return;
    const std::string key = "node." + std::to_string(index++);
    r.line("node " + label);
    r.field(key + ".expr", label);
    auto say = [&](const std::string& what, const std::string& value) {
      r.line("  " + what + ": " + value);
      r.field(key + "." + what, value);
    };
    say("signature", render(signature_of(s.net, e)));
    if (e.kind == Expr::Kind::Compose) {
      try {
        const auto left = elaborate(s.net, e.children[0], s.compose);
        const auto right = elaborate(s.net, e.children[1], s.compose);
        const auto verdict = check_compose_precondition(left, right, s.horizon, pulse);
        say("compose", verdict.to_string());
        if (!verdict.well_defined()) witness = true;
      } catch (const Error& err) {
        say("compose", err.what());
        witness = true;
        return;
      }
    }
    std::optional<Automaton> elaborated;
    try {
      elaborated = elaborate(s.net, e, s.compose);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::ExplosionGuard) throw;
      say("elaborate", err.what());
      witness = true;
      return;
    }
    const Automaton& a = *elaborated;
    const auto reactive = check_reactive(a, s.horizon, s.explore);
    if (!reactive.ok) {
      say("reactive", reactive.describe(a));
      say("weak-pulse", "skipped (not reactive)");
      say("strong-pulse", "skipped (not reactive)");
      witness = true;
      return;
    }
    say("reactive", "ok (" + std::to_string(reactive.states_checked) + " states within T=" +
                        std::to_string(s.horizon) + ")");
    say("weak-pulse", pulse_text(check_weak_pulse(a, s.horizon, pulse)));
    say("strong-pulse", pulse_text(check_strong_pulse(a, s.horizon, pulse)));
  };
  visit(s.target);
  return witness ? r.finish("check", Verdict::Status::Witness, 1)
                 : r.finish("check", Verdict::Status::Ok, 0);
}

// Reachable part of the product within the horizon, one line per transition.
void render_table(Report& r, const Automaton& a, const Session& s) {
  const auto inputs =
      enumerate_slices(a.signature().inputs, a.signature().alphabet,
                       s.explore.bounds.value_or(InputBounds{a.input_bound(), {}}));
  std::set<State> seen{a.start()};
  std::deque<std::pair<State, std::size_t>> queue{{a.start(), 0}};
  std::size_t lines = 0;
  while (!queue.empty()) {
    auto [st, depth] = queue.front();
    queue.pop_front();
    if (depth >= s.horizon) continue;
    for (const auto& in : inputs) {
      for (const auto& t : a.step(st, in)) {
        if (++lines > s.explore.node_budget)
          throw Error(ErrorCode::ExplosionGuard, "product table exceeds the budget");
        r.line("  trans " + a.render_state(st) + " -> " + a.render_state(t.target) + " " +
               render(t.action));
        if (seen.insert(t.target).second) queue.emplace_back(t.target, depth + 1);
      }
    }
  }
  r.both("reachable-states", std::to_string(seen.size()));
  r.both("transitions", std::to_string(lines));
}

Verdict cmd_compose(const Session& s) {
  Report r;
  const Expr* node = find_compose(s.net, s.target);
  if (!node) throw Error(ErrorCode::Configuration, render(s.target) + " is not a composition");
  const auto left = elaborate(s.net, node->children[0], s.compose);
  const auto right = elaborate(s.net, node->children[1], s.compose);
  r.both("expr", render(unfold(s.net, s.target)));
  r.both("signature", render(signature_of(s.net, s.target)));
  std::optional<Composition> detailed;
  try {
    detailed = compose_detailed(left, right, s.compose);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EmptyComposition) throw;
    r.both("result", err.what());
    return r.finish("compose", Verdict::Status::Witness, 1);
  }
  const Composition& c = *detailed;
  r.both("verdict", c.verdict.to_string());
  r.both("schedule", render(c.schedule));
  if (c.schedule == Schedule::JointSearch) r.both("joint-bound", std::to_string(c.joint_bound));
  const Automaton flat = elaborate(s.net, s.target, s.compose);
  r.line("product " + flat.name() + " start " + flat.render_state(flat.start()));
  render_table(r, flat, s);
  return r.finish("compose", Verdict::Status::Ok, 0);
}

Verdict cmd_run(const Session& s) {
  Report r;
  const Automaton a = elaborate(s.net, s.target, s.compose);
  const auto& sig = a.signature();
  History input = s.net.input.value_or(History::silent(sig.inputs, s.horizon));
  if (input.domain() != sig.inputs)
    throw Error(ErrorCode::TypeError, "input script binds " + input.domain().to_string() +
                                          ", " + a.name() + " reads " + sig.inputs.to_string());
  std::mt19937_64 rng(s.seed);
  State st = a.start();
  History trace(sig.all());
  r.field("seed", std::to_string(s.seed));
  for (std::size_t k = 0; k < input.size(); ++k) {
    r.line("# state=" + a.render_state(st));
    const auto options = a.step(st, input.tick(k));
    if (options.empty()) {
      r.line("# blocked on " + render(input.tick(k)));
      r.field("blocked", a.render_state(st) + " " + render(input.tick(k)));
      return r.finish("run", Verdict::Status::Witness, 1);
    }
    const Transition& t = options[rng() % options.size()];
    std::string body = render(t.action);
    r.line("t=" + std::to_string(k) + (body.empty() ? "" : " " + body));
    r.field("tick." + std::to_string(k), a.render_state(st) + " " + body);
    trace.push_back(t.action);
    st = t.target;
  }
  r.line("# state=" + a.render_state(st));
  r.field("final", a.render_state(st));
  return r.finish("run", Verdict::Status::Ok, 0);
}

Verdict cmd_behaviors(const Session& s) {
  Report r;
  const Automaton a = elaborate(s.net, s.target, s.compose);
  const auto behs = behaviors(a, s.horizon, s.explore);
  r.line("# " + std::to_string(behs.size()) + " behaviors of " + a.name() + " at T=" +
         std::to_string(s.horizon));
  r.field("count", std::to_string(behs.size()));
  std::size_t k = 0;
  for (const auto& b : behs) {
    r.line("---");
    r.line(render(b).substr(0, render(b).size() - (b.empty() ? 0 : 1)));
    r.field("behavior." + std::to_string(k++), render(b));
  }
  return r.finish("behaviors", Verdict::Status::Ok, 0);
}

Verdict cmd_equiv(const Session& s) {
  Report r;
  const Expr* node = find_compose(s.net, s.target);
  if (!node) throw Error(ErrorCode::Configuration, render(s.target) + " is not a composition");
  if (node != &unfold(s.net, s.target)) r.line("# hidden channels above the composition are ignored");
  const auto left = elaborate(s.net, node->children[0], s.compose);
  const auto right = elaborate(s.net, node->children[1], s.compose);
  EquivalenceOptions eo;
  eo.compose = s.compose;
  eo.enumeration = s.enumeration;
  eo.bound = s.bound;
  const auto rep = check_equivalence(left, right, s.horizon, eo);
  r.line(rep.to_string());
  r.field("result", rep.status == EquivalenceReport::Status::Equivalent ? "equivalent"
                    : rep.status == EquivalenceReport::Status::Counterexample
                        ? "counterexample"
                        : "no-counterexample-found");
  r.field("inputs", std::to_string(rep.inputs_checked));
  r.field("schedule", rep.schedule);
  if (rep.input) r.field("input", render(*rep.input));
  return rep.ok() ? r.finish("equiv", Verdict::Status::Ok, 0)
                  : r.finish("equiv", Verdict::Status::Witness, 1);
}

Verdict cmd_dist(const std::vector<std::string>& texts) {
  if (texts.size() != 2) throw Error(ErrorCode::Configuration, "dist needs exactly two trace files");
  Report r;
  const auto d = baire_distance(parse_history(texts[0]), parse_history(texts[1]));
  r.both("distance", d.to_string());
  return r.finish("dist", Verdict::Status::Ok, 0);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Configuration, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string Verdict::render(bool machine) const {
  if (!machine) return text + "verdict: " + command + " " + to_string(status) + "\n";
  std::string out = "command=" + command + "\nstatus=" + to_string(status) +
                    "\nexit=" + std::to_string(exit_code) + "\n";
  for (const auto& [k, v] : fields) out += k + "=" + escape(v) + "\n";
  return out;
}

Verdict run_command_on_text(const std::string& command, const std::vector<std::string>& texts,
                            const CommandOptions& opts) {
  static const std::set<std::string> known{"check", "compose", "run", "behaviors", "equiv", "dist"};
  try {
    if (!known.count(command))
      throw Error(ErrorCode::Configuration, "unknown command '" + command + "'");
    if (command == "dist") return cmd_dist(texts);
    if (texts.size() != 1)
      throw Error(ErrorCode::Configuration, command + " takes exactly one network file");
    const Session s = open_session(texts[0], opts);
    if (command == "check") return cmd_check(s);
    if (command == "compose") return cmd_compose(s);
    if (command == "run") return cmd_run(s);
    if (command == "behaviors") return cmd_behaviors(s);
    return cmd_equiv(s);
  } catch (const Error& err) {
    const int code = exit_code_for(err.code());
    Verdict v{command, code == 1 ? Verdict::Status::Witness : Verdict::Status::Error, code, {}, ""};
    v.fields.emplace_back("error", std::string(to_string(err.code())));
    v.fields.emplace_back("message", err.what());
    v.text = std::string(err.what()) + "\n";
    return v;
  }
}

Verdict run_command(const std::string& command, const std::vector<std::string>& files,
                    const CommandOptions& opts) {
  std::vector<std::string> texts;
  try {
    for (const auto& f : files) texts.push_back(slurp(f));
  } catch (const Error& err) {
    return Verdict{command, Verdict::Status::Error, 2,
                   {{"error", "Configuration"}, {"message", err.what()}},
                   std::string(err.what()) + "\n"};
  }
  return run_command_on_text(command, texts, opts);
}

}  // namespace tpanet
