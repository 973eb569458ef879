#include "tpanet/automaton.hpp"

#include <algorithm>
#include <deque>
#include <utility>

namespace tpanet {

void check_signature(const PortSignature& sig) {
  auto clash = [](const ChannelSet& a, const ChannelSet& b, const char* what) {
    auto common = a.intersect(b);
    if (!common.empty())
      throw Error(ErrorCode::OverlapError,
                  "channel '" + common.names().front() + "' is " + what);
  };
  clash(sig.inputs, sig.outputs, "both input and output");
  clash(sig.inputs, sig.hidden, "both input and hidden");
  clash(sig.outputs, sig.hidden, "both output and hidden");
}

std::string render(const PortSignature& sig) {
  std::string d = "{";
  for (std::size_t k = 0; k < sig.alphabet.symbols().size(); ++k) {
    if (k) d += ',';
    d += sig.alphabet.symbols()[k];
  }
  d += "}";
  return "(D=" + d + ", I=" + sig.inputs.to_string() + ", O=" + sig.outputs.to_string() +
         ", H=" + sig.hidden.to_string() + ")";
}

std::size_t InputBounds::bound_for(const std::string& channel) const {
  auto it = per_channel.find(channel);
  return it == per_channel.end() ? fallback : it->second;
}

std::vector<Slice> enumerate_slices(const ChannelSet& channels, const Alphabet& alphabet,
                                    const InputBounds& bounds) {
  std::vector<std::vector<Seq>> choices;
  for (const auto& c : channels)
    choices.push_back(enumerate_sequences(alphabet, bounds.bound_for(c)));

  std::vector<Slice> out;
  std::vector<std::size_t> digit(choices.size(), 0);
  while (true) {
    std::map<std::string, Seq> entries;
    for (std::size_t k = 0; k < choices.size(); ++k)
      entries.emplace(channels.names()[k], choices[k][digit[k]]);
    out.emplace_back(std::move(entries));
    // Odometer with the first channel as the most significant digit.
    std::size_t k = choices.size();
    while (k > 0) {
      --k;
      if (++digit[k] < choices[k].size()) break;
      digit[k] = 0;
      if (k == 0) return out;
    }
    if (choices.empty()) return out;
  }
}

std::vector<Slice> enumerate_inputs(const PortSignature& sig, std::size_t bound) {
  return enumerate_slices(sig.inputs, sig.alphabet, InputBounds{bound, {}});
}

std::vector<History> enumerate_histories(const ChannelSet& domain,
                                         const std::vector<Slice>& slices, std::size_t length) {
  std::vector<History> out{History(domain)};
  for (std::size_t t = 0; t < length; ++t) {
    std::vector<History> next;
    next.reserve(out.size() * slices.size());
    for (const auto& h : out) {
      for (const auto& s : slices) {
        History e = h;
        e.push_back(s);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

std::string render_atom_state(const State& s) {
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ',';
    out += s[k];
  }
  return s.size() == 1 ? out : "(" + out + ")";
}

class TableModel final : public AutomatonModel {
 public:
  explicit TableModel(TableSpec spec) : spec_(std::move(spec)), start_{spec_.start} {
    check_signature(spec_.signature);
    std::vector<std::string> sorted = spec_.states;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
      throw Error(ErrorCode::Configuration, spec_.name + ": duplicate state '" + *dup + "'");
    auto known = [&](const std::string& s) {
      return std::binary_search(sorted.begin(), sorted.end(), s);
    };
    if (!known(spec_.start))
      throw Error(ErrorCode::UnknownState, spec_.name + ": start state '" + spec_.start +
                                               "' is not a declared state");
    const auto all = spec_.signature.all();
    for (const auto& t : spec_.transitions) {
      if (!known(t.source) || !known(t.target))
        throw Error(ErrorCode::UnknownState,
                    spec_.name + ": transition " + t.source + " -> " + t.target +
                        " uses an undeclared state");
      if (t.action.domain() != all)
        throw Error(ErrorCode::DomainMismatch, spec_.name + ": transition action over " +
                                                   t.action.domain().to_string() +
                                                   ", expected " + all.to_string());
      for (const auto& [c, seq] : t.action.entries())
        for (const auto& m : seq)
          if (!spec_.signature.alphabet.contains(m))
            throw Error(ErrorCode::AlphabetViolation,
                        spec_.name + ": message '" + m + "' on " + c + " not in alphabet");
      by_source_[t.source].push_back(Transition{t.action, State{t.target}});
    }
    for (const auto& s : spec_.states) by_source_[s];
  }

  const std::string& name() const override { return spec_.name; }
  const PortSignature& signature() const override { return spec_.signature; }
  const State& start() const override { return start_; }
  std::size_t input_bound() const override { return spec_.input_bound; }
  const TableSpec* table() const override { return &spec_; }
  std::string render_state(const State& s) const override { return render_atom_state(s); }

  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    if (s.size() != 1) throw Error(ErrorCode::UnknownState, spec_.name + ": malformed state");
    auto it = by_source_.find(s.front());
    if (it == by_source_.end())
      throw Error(ErrorCode::UnknownState, spec_.name + ": unknown state '" + s.front() + "'");
    std::vector<Transition> out;
    for (const auto& t : it->second)
      if (project(t.action, spec_.signature.inputs) == input) out.push_back(t);
    return out;
  }

 private:
  TableSpec spec_;
  State start_;
  std::map<std::string, std::vector<Transition>> by_source_;
};

class ResponderModel final : public AutomatonModel {
 public:
  ResponderModel(std::string name, PortSignature sig, State start, Responder responder,
                 std::size_t bound, StateRenderer renderer)
      : name_(std::move(name)),
        sig_(std::move(sig)),
        start_(std::move(start)),
        responder_(std::move(responder)),
        bound_(bound),
        renderer_(std::move(renderer)) {
    check_signature(sig_);
  }

  const std::string& name() const override { return name_; }
  const PortSignature& signature() const override { return sig_; }
  const State& start() const override { return start_; }
  std::size_t input_bound() const override { return bound_; }
  std::string render_state(const State& s) const override {
    return renderer_ ? renderer_(s) : render_atom_state(s);
  }
  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    return responder_(s, input);
  }

 private:
  std::string name_;
  PortSignature sig_;
  State start_;
  Responder responder_;
  std::size_t bound_;
  StateRenderer renderer_;
};

class RebindModel final : public AutomatonModel {
 public:
  RebindModel(std::shared_ptr<const AutomatonModel> inner, std::size_t bound, std::string name)
      : inner_(std::move(inner)), bound_(bound), name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  const PortSignature& signature() const override { return inner_->signature(); }
  const State& start() const override { return inner_->start(); }
  std::size_t input_bound() const override { return bound_; }
  std::string render_state(const State& s) const override { return inner_->render_state(s); }
  const TableSpec* table() const override { return inner_->table(); }
  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    return inner_->transitions(s, input);
  }

 private:
  std::shared_ptr<const AutomatonModel> inner_;
  std::size_t bound_;
  std::string name_;
};

}  // namespace

Automaton::Automaton(std::shared_ptr<const AutomatonModel> model) : model_(std::move(model)) {
  if (!model_) throw Error(ErrorCode::Configuration, "null automaton model");
}

Automaton Automaton::from_table(TableSpec spec) {
  return Automaton(std::make_shared<TableModel>(std::move(spec)));
}

Automaton Automaton::from_responder(std::string name, PortSignature sig, State start,
                                    Responder responder, std::size_t input_bound,
                                    StateRenderer renderer) {
  return Automaton(std::make_shared<ResponderModel>(std::move(name), std::move(sig),
                                                    std::move(start), std::move(responder),
                                                    input_bound, std::move(renderer)));
}

Automaton Automaton::with_input_bound(std::size_t bound) const {
  return Automaton(std::make_shared<RebindModel>(model_, bound, name()));
}

Automaton Automaton::with_name(std::string name) const {
  return Automaton(std::make_shared<RebindModel>(model_, input_bound(), std::move(name)));
}

std::vector<Transition> Automaton::step(const State& s, const Slice& input) const {
  const auto& sig = signature();
  if (input.domain() != sig.inputs)
    throw Error(ErrorCode::DomainMismatch, name() + ": input slice over " +
                                               input.domain().to_string() + ", expected " +
                                               sig.inputs.to_string());
  auto out = model_->transitions(s, input);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  const auto all = sig.all();
  for (const auto& t : out) {
    if (t.action.domain() != all || project(t.action, sig.inputs) != input)
      throw Error(ErrorCode::Configuration,
                  name() + ": responder produced an action that does not match its input");
  }
  return out;
}

// ------------------------------------------------------------- exploration

namespace {

InputBounds bounds_of(const Automaton& a, const ExploreOptions& opts) {
  return opts.bounds ? *opts.bounds : InputBounds{a.input_bound(), {}};
}

Error not_reactive(const Automaton& a, const State& s, const Slice& input) {
  return Error(ErrorCode::NotReactive, a.name() + " has no transition at state=" +
                                           a.render_state(s) + " input=" + render(input));
}

// Depth-first walk over all runs of `horizon` ticks; `inputs_at(depth)`
// supplies the input slices explored at each depth.
template <class InputsAt, class Sink>
void walk(const Automaton& a, std::size_t horizon, std::size_t budget, InputsAt&& inputs_at,
          Sink&& sink) {
  std::vector<State> states{a.start()};
  std::vector<Slice> actions;
  std::size_t nodes = 0;
  auto rec = [&](auto& self, std::size_t depth) -> void {
    if (depth == horizon) {
      sink(states, actions);
      return;
    }
    for (const auto& input : inputs_at(depth)) {
      auto ts = a.step(states.back(), input);
      if (ts.empty()) throw not_reactive(a, states.back(), input);
      for (auto& t : ts) {
        if (++nodes > budget)
          throw Error(ErrorCode::ExplosionGuard, a.name() + ": more than " +
                                                     std::to_string(budget) +
                                                     " nodes explored at horizon " +
                                                     std::to_string(horizon));
        states.push_back(std::move(t.target));
        actions.push_back(std::move(t.action));
        self(self, depth + 1);
        states.pop_back();
        actions.pop_back();
      }
    }
  };
  rec(rec, 0);
}

template <class Sink>
void walk_all(const Automaton& a, std::size_t horizon, const ExploreOptions& opts, Sink&& sink) {
  auto inputs = enumerate_slices(a.signature().inputs, a.signature().alphabet, bounds_of(a, opts));
  walk(a, horizon, opts.node_budget,
       [&](std::size_t) -> const std::vector<Slice>& { return inputs; },
       std::forward<Sink>(sink));
}

History history_of(const ChannelSet& domain, const std::vector<Slice>& actions) {
  History h(domain);
  for (const auto& s : actions) h.push_back(project(s, domain));
  return h;
}

}  // namespace

std::set<Execution> executions(const Automaton& a, std::size_t horizon,
                               const ExploreOptions& opts) {
  std::set<Execution> out;
  const auto all = a.signature().all();
  walk_all(a, horizon, opts, [&](const std::vector<State>& states, const std::vector<Slice>& acts) {
    out.insert(Execution{states, history_of(all, acts)});
  });
  return out;
}

std::set<History> schedules(const Automaton& a, std::size_t horizon, const ExploreOptions& opts) {
  std::set<History> out;
  const auto all = a.signature().all();
  walk_all(a, horizon, opts, [&](const std::vector<State>&, const std::vector<Slice>& acts) {
    out.insert(history_of(all, acts));
  });
  return out;
}

BehaviorSet behaviors(const Automaton& a, std::size_t horizon, const ExploreOptions& opts) {
  BehaviorSet out;
  const auto ext = a.signature().external();
  walk_all(a, horizon, opts, [&](const std::vector<State>&, const std::vector<Slice>& acts) {
    out.insert(history_of(ext, acts));
  });
  return out;
}

BehaviorSet behaviors_for_input(const Automaton& a, const History& input,
                                const ExploreOptions& opts) {
  if (input.domain() != a.signature().inputs)
    throw Error(ErrorCode::DomainMismatch, a.name() + ": input history over " +
                                               input.domain().to_string() + ", expected " +
                                               a.signature().inputs.to_string());
  BehaviorSet out;
  const auto ext = a.signature().external();
  std::vector<std::vector<Slice>> per_tick;
  for (const auto& s : input.ticks()) per_tick.push_back({s});
  walk(a, input.size(), opts.node_budget,
       [&](std::size_t depth) -> const std::vector<Slice>& { return per_tick[depth]; },
       [&](const std::vector<State>&, const std::vector<Slice>& acts) {
         out.insert(history_of(ext, acts));
       });
  return out;
}

// ------------------------------------------------------------- reactivity

std::string ReactiveVerdict::describe(const Automaton& a) const {
  if (ok)
    return "reactive over inputs with bound " + std::to_string(bound) + " (" +
           std::to_string(states_checked) + " reachable states)";
  return "not reactive: state=" + a.render_state(*state) + " input=" + render(*input) +
         " bound=" + std::to_string(bound);
}

ReactiveVerdict check_reactive(const Automaton& a, std::optional<std::size_t> horizon,
                               const ExploreOptions& opts) {
  const auto bounds = bounds_of(a, opts);
  const auto inputs = enumerate_slices(a.signature().inputs, a.signature().alphabet, bounds);
  ReactiveVerdict verdict;
  verdict.bound = bounds.fallback;

  std::map<State, std::size_t> depth_of{{a.start(), 0}};
  std::deque<State> queue{a.start()};
  std::optional<std::pair<State, std::size_t>> first_failure;
  std::size_t nodes = 0;
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    const std::size_t depth = depth_of.at(s);
    if (horizon && depth >= *horizon) continue;
    ++verdict.states_checked;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      auto ts = a.step(s, inputs[k]);
      if (ts.empty()) {
        if (!first_failure || std::pair(s, k) < *first_failure) first_failure = {s, k};
        continue;
      }
      for (auto& t : ts) {
        if (++nodes > opts.node_budget)
          throw Error(ErrorCode::ExplosionGuard,
                      a.name() + ": reachability exceeded " + std::to_string(opts.node_budget));
        if (depth_of.emplace(t.target, depth + 1).second) queue.push_back(std::move(t.target));
      }
    }
  }
  if (first_failure) {
    verdict.ok = false;
    verdict.state = first_failure->first;
    verdict.input = inputs[first_failure->second];
  }
  return verdict;
}

void require_reactive(const Automaton& a, std::optional<std::size_t> horizon,
                      const ExploreOptions& opts) {
  auto v = check_reactive(a, horizon, opts);
  if (!v.ok) throw Error(ErrorCode::NotReactive, a.name() + " " + v.describe(a));
}

// ------------------------------------------------------- pulse-drivenness

namespace {

using PulseKey = std::pair<History, History>;

struct PulseCheck {
  // Part of the input that must agree entirely / through the hypothesis depth.
  ChannelSet whole;
  ChannelSet prefixed;
  // Channels the conclusion compares.
  ChannelSet observed;
  // Conclusion depth = n + lead; hypothesis depth = n (+1 for InputInclusive).
  std::size_t lead = 0;
};

PulseVerdict run_pulse_check(const Automaton& a, std::size_t horizon, const PulseOptions& opts,
                             const PulseCheck& check) {
  require_reactive(a, horizon, opts.explore);
  const auto& sig = a.signature();
  const auto bounds = bounds_of(a, opts.explore);
  const auto slices = enumerate_slices(sig.inputs, sig.alphabet, bounds);
  double count = 1;
  for (std::size_t t = 0; t < horizon; ++t) count *= static_cast<double>(slices.size());
  if (count > static_cast<double>(opts.input_budget))
    throw Error(ErrorCode::ExplosionGuard, a.name() + ": " + std::to_string(count) +
                                               " input histories exceed the budget");
  const auto inputs = enumerate_histories(sig.inputs, slices, horizon);

  std::vector<BehaviorSet> observed;
  observed.reserve(inputs.size());
  for (const auto& iota : inputs)
    observed.push_back(project_set(behaviors_for_input(a, iota, opts.explore), check.observed));

  PulseVerdict verdict;
  verdict.inputs_checked = inputs.size();
  const std::size_t shift = opts.reading == PrefixReading::InputInclusive ? 1 : 0;
  for (std::size_t n = 0; n + check.lead <= horizon && n + shift <= horizon; ++n) {
    std::map<PulseKey, std::pair<std::size_t, BehaviorSet>> seen;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      PulseKey key{project(inputs[k], check.whole),
                   prefix(project(inputs[k], check.prefixed), n + shift)};
      auto concl = prefix_set(observed[k], n + check.lead);
      auto [it, fresh] = seen.try_emplace(std::move(key), k, concl);
      if (!fresh && it->second.second != concl) {
        verdict.ok = false;
        verdict.witness = PulseWitness{inputs[it->second.first], inputs[k], n};
        return verdict;
      }
    }
  }
  return verdict;
}

}  // namespace

PulseVerdict check_weak_pulse(const Automaton& a, std::size_t horizon, const PulseOptions& opts) {
  const auto& sig = a.signature();
  return run_pulse_check(a, horizon, opts, {ChannelSet{}, sig.inputs, sig.external(), 0});
}

PulseVerdict check_strong_pulse(const Automaton& a, std::size_t horizon,
                                const PulseOptions& opts) {
  const auto& sig = a.signature();
  return run_pulse_check(a, horizon, opts, {ChannelSet{}, sig.inputs, sig.outputs, 1});
}

PulseVerdict check_strong_pulse_modulo(const Automaton& a, const ChannelSet& j,
                                       const ChannelSet& p, std::size_t horizon,
                                       const PulseOptions& opts) {
  const auto& sig = a.signature();
  if (!j.subset_of(sig.inputs) || !p.subset_of(sig.outputs))
    throw Error(ErrorCode::PrecondViolated, a.name() + ": need J=" + j.to_string() +
                                                " within inputs and P=" + p.to_string() +
                                                " within outputs");
  return run_pulse_check(a, horizon, opts, {sig.inputs.minus(j), j, p, 1});
}

}  // namespace tpanet
