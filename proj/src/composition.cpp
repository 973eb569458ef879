#include "tpanet/composition.hpp"

#include <algorithm>
#include <iterator>

namespace tpanet {

std::optional<std::string> incompatibility(const PortSignature& a, const PortSignature& b) {
  if (auto c = a.outputs.intersect(b.outputs); !c.empty())
    return "O1 n O2 contains '" + c.names().front() + "' (shared writer)";
  if (auto c = a.hidden.intersect(b.all()); !c.empty())
    return "H1 n C2 contains '" + c.names().front() + "' (hidden channel not private)";
  if (auto c = b.hidden.intersect(a.all()); !c.empty())
    return "H2 n C1 contains '" + c.names().front() + "' (hidden channel not private)";
  return std::nullopt;
}

void check_compatible(const PortSignature& a, const PortSignature& b) {
  if (auto why = incompatibility(a, b)) throw Error(ErrorCode::IncompatibleSignatures, *why);
}

PortSignature compose_signatures(const PortSignature& a, const PortSignature& b) {
  check_compatible(a, b);
  std::vector<std::string> symbols = a.alphabet.symbols();
  symbols.insert(symbols.end(), b.alphabet.symbols().begin(), b.alphabet.symbols().end());
  PortSignature out{Alphabet(std::move(symbols)),
                    a.inputs.minus(b.outputs).unite(b.inputs.minus(a.outputs)),
                    a.outputs.unite(b.outputs), a.hidden.unite(b.hidden)};
  check_signature(out);
  return out;
}

Feedback feedback_of(const PortSignature& a, const PortSignature& b) {
  return {a.inputs.intersect(b.outputs), b.inputs.intersect(a.outputs)};
}

std::string render(Schedule s) {
  switch (s) {
    case Schedule::LeftFirst: return "left-first";
    case Schedule::RightFirst: return "right-first";
    case Schedule::JointSearch: return "joint-search";
  }
  return "?";
}

Schedule ComposeVerdict::schedule() const {
  if (left_strong) return Schedule::LeftFirst;
  if (right_strong) return Schedule::RightFirst;
  return Schedule::JointSearch;
}

std::string ComposeVerdict::to_string() const {
  const std::string jp = "(J=" + feedback.j.to_string() + ",P=" + feedback.p.to_string() + ")";
  if (trivial) return "WELL-DEFINED trivially " + jp;
  if (left_strong) return "WELL-DEFINED via A1 strong mod " + jp;
  if (right_strong) return "WELL-DEFINED via A2 strong mod " + jp;
  return "NOT-ESTABLISHED neither side strong mod " + jp + " at T=" + std::to_string(horizon);
}

ComposeVerdict check_compose_precondition(const Automaton& a, const Automaton& b,
                                          std::size_t horizon, const PulseOptions& opts) {
  check_compatible(a.signature(), b.signature());
  ComposeVerdict v;
  v.feedback = feedback_of(a.signature(), b.signature());
  v.horizon = horizon;
  v.trivial = v.feedback.j.empty() || v.feedback.p.empty();
  if (v.trivial) {
    v.left_strong = v.right_strong = true;
    return v;
  }
  auto left = check_strong_pulse_modulo(a, v.feedback.j, v.feedback.p, horizon, opts);
  auto right = check_strong_pulse_modulo(b, v.feedback.p, v.feedback.j, horizon, opts);
  v.left_strong = left.ok;
  v.right_strong = right.ok;
  v.left_witness = left.witness;
  v.right_witness = right.witness;
  return v;
}

namespace {

std::string render_input(const Slice& s) {
  auto r = render(s);
  return r.empty() ? "{}" : r;
}

State concat(const State& a, const State& b) {
  State out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class ProductModel final : public AutomatonModel {
 public:
  ProductModel(Automaton a, Automaton b, Schedule schedule, std::size_t joint_bound)
      : a_(std::move(a)),
        b_(std::move(b)),
        sig_(compose_signatures(a_.signature(), b_.signature())),
        start_(concat(a_.start(), b_.start())),
        name_("(" + a_.name() + " (x) " + b_.name() + ")"),
        fb_(feedback_of(a_.signature(), b_.signature())),
        schedule_(schedule),
        joint_bound_(joint_bound),
        left_arity_(a_.start().size()),
        c1_(a_.signature().all()),
        c2_only_(b_.signature().all().minus(c1_)) {}

  const std::string& name() const override { return name_; }
  const PortSignature& signature() const override { return sig_; }
  const State& start() const override { return start_; }
  std::size_t input_bound() const override {
    return std::max(a_.input_bound(), b_.input_bound());
  }

  std::string render_state(const State& s) const override {
    auto [s1, s2] = split(s);
    return "(" + a_.render_state(s1) + "," + b_.render_state(s2) + ")";
  }

  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    auto [s1, s2] = split(s);
    const Slice ext1 = project(input, a_.signature().inputs);
    const Slice ext2 = project(input, b_.signature().inputs);
    std::vector<Transition> out;
    switch (schedule_) {
      case Schedule::LeftFirst:
        leader_first(a_, s1, ext1, fb_.j, fb_.p, b_, s2, ext2, true, out);
        break;
      case Schedule::RightFirst:
        leader_first(b_, s2, ext2, fb_.p, fb_.j, a_, s1, ext1, false, out);
        break;
      case Schedule::JointSearch:
        joint_search(s1, ext1, s2, ext2, out);
        break;
    }
    return out;
  }

 private:
  std::pair<State, State> split(const State& s) const {
    if (s.size() != start_.size())
      throw Error(ErrorCode::UnknownState, name_ + ": state of wrong arity");
    return {State(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(left_arity_)),
            State(s.begin() + static_cast<std::ptrdiff_t>(left_arity_), s.end())};
  }

  Transition combine(const Transition& t1, const Transition& t2) const {
    return Transition{sum(t1.action, project(t2.action, c2_only_)), concat(t1.target, t2.target)};
  }

  static std::set<Slice> outputs_on(const std::vector<Transition>& ts, const ChannelSet& chans) {
    std::set<Slice> out;
    for (const auto& t : ts) out.insert(project(t.action, chans));
    return out;
  }

  // `leader` never lets its `feed` outputs depend on the `reads` inputs of
  // the current tick: fix those outputs first, step the follower on them,
  // then complete the leader with the follower's answer.
  void leader_first(const Automaton& leader, const State& ls, const Slice& lext,
                    const ChannelSet& reads, const ChannelSet& feed, const Automaton& follower,
                    const State& fs, const Slice& fext, bool leader_is_left,
                    std::vector<Transition>& out) const {
    const auto probe = leader.step(ls, sum(lext, Slice::silent(reads)));
    const auto feed_options = outputs_on(probe, feed);
    std::map<Slice, std::vector<Transition>> completed;
    for (const auto& p : feed_options) {
      for (const auto& tf : follower.step(fs, sum(fext, p))) {
        Slice j = project(tf.action, reads);
        auto it = completed.find(j);
        if (it == completed.end()) {
          auto ts = leader.step(ls, sum(lext, j));
          if (outputs_on(ts, feed) != feed_options)
            throw Error(ErrorCode::PrecondViolated,
                        name_ + ": " + leader.name() + "'s output on " + feed.to_string() +
                            " depends on its current input " + render_input(j) + " at state " +
                            leader.render_state(ls));
          it = completed.emplace(j, std::move(ts)).first;
        }
        for (const auto& tl : it->second) {
          if (project(tl.action, feed) != p) continue;
          out.push_back(leader_is_left ? combine(tl, tf) : combine(tf, tl));
        }
      }
    }
  }

  void joint_search(const State& s1, const Slice& ext1, const State& s2, const Slice& ext2,
                    std::vector<Transition>& out) const {
    const auto candidates =
        enumerate_slices(fb_.j, sig_.alphabet, InputBounds{joint_bound_, {}});
    for (const auto& j : candidates) {
      for (const auto& t1 : a_.step(s1, sum(ext1, j))) {
        const Slice p = project(t1.action, fb_.p);
        for (const auto& t2 : b_.step(s2, sum(ext2, p))) {
          if (project(t2.action, fb_.j) == j) out.push_back(combine(t1, t2));
        }
      }
    }
  }

  Automaton a_, b_;
  PortSignature sig_;
  State start_;
  std::string name_;
  Feedback fb_;
  Schedule schedule_;
  std::size_t joint_bound_;
  std::size_t left_arity_;
  ChannelSet c1_, c2_only_;
};

class HideModel final : public AutomatonModel {
 public:
  HideModel(Automaton inner, const ChannelSet& p) : inner_(std::move(inner)) {
    const auto& s = inner_.signature();
    for (const auto& c : p)
      if (!s.outputs.contains(c))
        throw Error(ErrorCode::NotAnOutput, "'" + c + "' is not an output of " + inner_.name());
    sig_ = PortSignature{s.alphabet, s.inputs, s.outputs.minus(p), s.hidden.unite(p)};
    name_ = "hide" + p.to_string() + "(" + inner_.name() + ")";
  }

  const std::string& name() const override { return name_; }
  const PortSignature& signature() const override { return sig_; }
  const State& start() const override { return inner_.start(); }
  std::size_t input_bound() const override { return inner_.input_bound(); }
  std::string render_state(const State& s) const override { return inner_.render_state(s); }
  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    return inner_.step(s, input);
  }

 private:
  Automaton inner_;
  PortSignature sig_;
  std::string name_;
};

class RenameModel final : public AutomatonModel {
 public:
  RenameModel(Automaton inner, std::map<std::string, std::string> mapping)
      : inner_(std::move(inner)), forward_(std::move(mapping)) {
    const auto& s = inner_.signature();
    for (const auto& [from, to] : forward_) {
      if (!s.all().contains(from))
        throw Error(ErrorCode::NameError, inner_.name() + " has no channel '" + from + "'");
      if (!backward_.emplace(to, from).second)
        throw Error(ErrorCode::OverlapError, "two channels renamed to '" + to + "'");
    }
    auto map_set = [&](const ChannelSet& cs) {
      std::vector<std::string> names;
      for (const auto& c : cs) names.push_back(apply(forward_, c));
      return ChannelSet::checked(std::move(names));
    };
    sig_ = PortSignature{s.alphabet, map_set(s.inputs), map_set(s.outputs), map_set(s.hidden)};
    check_signature(sig_);
    if (sig_.all().size() != s.all().size())
      throw Error(ErrorCode::OverlapError, inner_.name() + ": renaming merges channels");
    name_ = inner_.name();
  }

  const std::string& name() const override { return name_; }
  const PortSignature& signature() const override { return sig_; }
  const State& start() const override { return inner_.start(); }
  std::size_t input_bound() const override { return inner_.input_bound(); }
  std::string render_state(const State& s) const override { return inner_.render_state(s); }
  std::vector<Transition> transitions(const State& s, const Slice& input) const override {
    auto ts = inner_.step(s, translate(backward_, input));
    for (auto& t : ts) t.action = translate(forward_, t.action);
    return ts;
  }

 private:
  static const std::string& apply(const std::map<std::string, std::string>& m,
                                  const std::string& c) {
    auto it = m.find(c);
    return it == m.end() ? c : it->second;
  }
  static Slice translate(const std::map<std::string, std::string>& m, const Slice& s) {
    std::map<std::string, Seq> out;
    for (const auto& [c, seq] : s.entries()) out.emplace(apply(m, c), seq);
    return Slice(std::move(out));
  }

  Automaton inner_;
  std::map<std::string, std::string> forward_, backward_;
  PortSignature sig_;
  std::string name_;
};

std::size_t longest_start_output(const Automaton& a) {
  std::size_t longest = 0;
  for (const auto& in : enumerate_inputs(a.signature(), a.input_bound()))
    for (const auto& t : a.step(a.start(), in))
      longest = std::max(longest, project(t.action, a.signature().outputs).max_length());
  return longest;
}

}  // namespace

Composition compose_detailed(const Automaton& a, const Automaton& b, const ComposeOptions& opts) {
  check_compatible(a.signature(), b.signature());
  PulseOptions pulse;
  pulse.explore = opts.explore;
  Composition out{a, {}, Schedule::JointSearch, 0};
  out.verdict = check_compose_precondition(a, b, opts.horizon, pulse);
  out.schedule = opts.force_joint_search ? Schedule::JointSearch : out.verdict.schedule();
  out.joint_bound = opts.joint_bound.value_or(
      std::max({a.input_bound(), b.input_bound(), longest_start_output(a),
                longest_start_output(b)}));
  out.product = Automaton(std::make_shared<ProductModel>(a, b, out.schedule, out.joint_bound));
  if (opts.verify_reactive) {
    auto r = check_reactive(out.product, std::max<std::size_t>(opts.horizon, 1), opts.explore);
    if (!r.ok)
      throw Error(ErrorCode::EmptyComposition,
                  "EMPTY-COMPOSITION at state=" + out.product.render_state(*r.state) +
                      " input=" + render_input(*r.input) +
                      " bound=" + std::to_string(out.joint_bound));
  }
  return out;
}

Automaton compose(const Automaton& a, const Automaton& b, const ComposeOptions& opts) {
  return compose_detailed(a, b, opts).product;
}

Automaton hide(const Automaton& a, const ChannelSet& p) {
  if (p.empty()) return a;
  return Automaton(std::make_shared<HideModel>(a, p));
}

Automaton rename(const Automaton& a, const std::map<std::string, std::string>& mapping) {
  if (mapping.empty()) return a;
  return Automaton(std::make_shared<RenameModel>(a, mapping));
}

// --------------------------------------------------------- decomposition

std::string DecompositionReport::to_string() const {
  if (ok)
    return "ok: execs=" + std::to_string(product_size[0]) +
           " scheds=" + std::to_string(product_size[1]) +
           " behs=" + std::to_string(product_size[2]) +
           " feedback-bound=" + std::to_string(feedback_bound);
  return "counterexample in " + claim + " (" + direction + "):\n" + offending;
}

namespace {

std::string render_execution(const Automaton& a, const Execution& e) {
  std::string out;
  for (std::size_t k = 0; k < e.actions.size(); ++k)
    out += "state=" + a.render_state(e.states[k]) + "  t=" + std::to_string(k) + " " +
           render(e.actions.tick(k)) + "\n";
  if (!e.states.empty()) out += "state=" + a.render_state(e.states.back()) + "\n";
  return out;
}

template <class T, class Render>
bool compare_sets(const std::set<T>& product, const std::set<T>& joined, const std::string& claim,
                  Render&& render_item, DecompositionReport& report) {
  std::vector<T> diff;
  std::set_difference(product.begin(), product.end(), joined.begin(), joined.end(),
                      std::back_inserter(diff));
  if (!diff.empty()) {
    report = {false, claim, "product-only", render_item(diff.front())};
    return false;
  }
  std::set_difference(joined.begin(), joined.end(), product.begin(), product.end(),
                      std::back_inserter(diff));
  if (!diff.empty()) {
    report = {false, claim, "projection-only", render_item(diff.front())};
    return false;
  }
  return true;
}

// Pairs histories of the two factors that agree on `shared`.
std::set<History> join_histories(const std::set<History>& left, const std::set<History>& right,
                                 const ChannelSet& shared, const ChannelSet& right_only) {
  std::map<History, std::vector<const History*>> index;
  for (const auto& r : right) index[project(r, shared)].push_back(&r);
  std::set<History> out;
  for (const auto& l : left) {
    auto it = index.find(project(l, shared));
    if (it == index.end()) continue;
    for (const History* r : it->second) out.insert(sum(l, project(*r, right_only)));
  }
  return out;
}

}  // namespace

DecompositionReport decomposition_oracle(const Automaton& a, const Automaton& b,
                                         const Automaton& product, std::size_t horizon,
                                         const ExploreOptions& opts) {
  const auto& sa = a.signature();
  const auto& sb = b.signature();
  const auto c1 = sa.all();
  const auto c2 = sb.all();
  const auto shared = c1.intersect(c2);

  ExploreOptions popts = opts;
  const std::size_t outer = popts.bounds ? popts.bounds->fallback : product.input_bound();
  popts.bounds = InputBounds{outer, {}};
  const auto product_execs = executions(product, horizon, popts);

  // Feedback channels are driven by the other factor, so they are explored
  // up to the longest value the product actually carries on them.
  std::size_t fb = outer;
  for (const auto& e : product_execs) {
    const History carried = project(e.actions, shared);
    for (const auto& s : carried.ticks()) fb = std::max(fb, s.max_length());
  }

  auto factor_opts = [&](const PortSignature& sig) {
    ExploreOptions o = opts;
    InputBounds bounds{outer, {}};
    for (const auto& c : sig.inputs.intersect(shared)) bounds.per_channel[c] = fb;
    o.bounds = bounds;
    return o;
  };
  const auto oa = factor_opts(sa);
  const auto ob = factor_opts(sb);

  DecompositionReport report;
  report.feedback_bound = fb;

  // execs: pair executions, pairing states coordinate-wise.
  std::set<Execution> joined_execs;
  {
    const auto ea = executions(a, horizon, oa);
    const auto eb = executions(b, horizon, ob);
    std::map<History, std::vector<const Execution*>> index;
    for (const auto& e : eb) index[project(e.actions, shared)].push_back(&e);
    const auto c2_only = c2.minus(c1);
    for (const auto& l : ea) {
      auto it = index.find(project(l.actions, shared));
      if (it == index.end()) continue;
      for (const Execution* r : it->second) {
        Execution e;
        for (std::size_t k = 0; k < l.states.size(); ++k)
          e.states.push_back(concat(l.states[k], r->states[k]));
        e.actions = sum(l.actions, project(r->actions, c2_only));
        joined_execs.insert(std::move(e));
      }
    }
  }
  if (!compare_sets(product_execs, joined_execs, "execs",
                    [&](const Execution& e) { return render_execution(product, e); }, report))
    return report;

  std::set<History> product_scheds, product_behs;
  const auto ext = product.signature().external();
  for (const auto& e : product_execs) {
    product_scheds.insert(e.actions);
    product_behs.insert(project(e.actions, ext));
  }
  auto render_history = [](const History& h) { return render(h); };

  const auto joined_scheds =
      join_histories(schedules(a, horizon, oa), schedules(b, horizon, ob), shared, c2.minus(c1));
  if (!compare_sets(product_scheds, joined_scheds, "scheds", render_history, report))
    return report;

  const auto ext1 = sa.external();
  const auto ext2 = sb.external();
  const auto joined_behs = join_histories(behaviors(a, horizon, oa), behaviors(b, horizon, ob),
                                          ext1.intersect(ext2), ext2.minus(ext1));
  if (!compare_sets(product_behs, joined_behs, "behs", render_history, report)) return report;

  report.product_size[0] = product_execs.size();
  report.product_size[1] = product_scheds.size();
  report.product_size[2] = product_behs.size();
  return report;
}

DecompositionReport decomposition_oracle(const Automaton& a, const Automaton& b,
                                         std::size_t horizon, const ExploreOptions& opts) {
  ComposeOptions co;
  co.horizon = horizon;
  co.explore = opts;
  return decomposition_oracle(a, b, compose(a, b, co), horizon, opts);
}

}  // namespace tpanet
