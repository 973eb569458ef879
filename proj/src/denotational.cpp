#include "tpanet/denotational.hpp"

#include <algorithm>
#include <utility>

namespace tpanet {

// ------------------------------------------------------------------ modes

bool PulseMode::covers(const ChannelSet& jj, const ChannelSet& pp) const {
  if (jj.empty() || pp.empty()) return true;
  switch (kind) {
    case PulseKind::Strong: return true;
    case PulseKind::StrongModulo: return jj.subset_of(j) && pp.subset_of(p);
    case PulseKind::Weak: return false;
  }
  return false;
}

std::string PulseMode::to_string() const {
  switch (kind) {
    case PulseKind::Weak: return "weak";
    case PulseKind::Strong: return "strong";
    case PulseKind::StrongModulo:
      return "strong mod (" + j.to_string() + "," + p.to_string() + ")";
  }
  return "?";
}

// ------------------------------------------------------------------- views

InputView::InputView(const History& input, std::size_t tick, ChannelSet masked)
    : input_(input), tick_(tick), masked_(std::move(masked)) {
  if (tick_ >= input_.size())
    throw Error(ErrorCode::HorizonExceeded, "emission at tick " + std::to_string(tick_) +
                                                " of an input with " +
                                                std::to_string(input_.size()) + " ticks");
}

bool InputView::readable(std::size_t k, const std::string& channel) const {
  if (!input_.domain().contains(channel)) return false;
  return k < tick_ || (k == tick_ && !masked_.contains(channel));
}

const Seq& InputView::at(std::size_t k, const std::string& channel) const {
  if (!readable(k, channel))
    throw Error(ErrorCode::CausalityViolation, "read of " + channel + " at tick " +
                                                   std::to_string(k) + " while emitting tick " +
                                                   std::to_string(tick_));
  return input_.tick(k).at(channel);
}

Slice InputView::slice(std::size_t k) const {
  for (const auto& c : input_.domain()) (void)at(k, c);
  return input_.tick(k);
}

Slice InputView::visible(std::size_t k) const {
  if (k > tick_)
    throw Error(ErrorCode::CausalityViolation, "read of tick " + std::to_string(k) +
                                                   " while emitting tick " +
                                                   std::to_string(tick_));
  return k < tick_ ? input_.tick(k) : project(input_.tick(k), input_.domain().minus(masked_));
}

History InputView::prefix(std::size_t k) const {
  History out(input_.domain());
  for (std::size_t t = 0; t < k; ++t) out.push_back(slice(t));
  return out;
}

// ---------------------------------------------------------------- StepFun

StepFun::StepFun(ChannelSet inputs, ChannelSet outputs, PulseMode mode, Emitter emit,
                 std::string name)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      mode_(std::move(mode)),
      emit_(std::move(emit)),
      name_(std::move(name)) {
  if (mode_.kind == PulseKind::StrongModulo &&
      (!mode_.j.subset_of(inputs_) || !mode_.p.subset_of(outputs_)))
    throw Error(ErrorCode::PrecondViolated,
                name_ + ": mode " + mode_.to_string() + " does not fit the interface");
}

Slice StepFun::emit(const InputView& view) const { return emit_(view); }

Slice StepFun::emit_at(const History& input, std::size_t n, const ChannelSet& extra_mask) const {
  ChannelSet mask = mode_.kind == PulseKind::Strong ? inputs_.unite(extra_mask) : extra_mask;
  return emit_(InputView(input, n, std::move(mask)));
}

History StepFun::apply(const History& input) const {
  if (input.domain() != inputs_)
    throw Error(ErrorCode::DomainMismatch, name_ + ": input over " +
                                               input.domain().to_string() + ", expected " +
                                               inputs_.to_string());
  History out(outputs_);
  const bool guard_feed = mode_.kind == PulseKind::StrongModulo && !mode_.j.empty() &&
                          !mode_.p.empty();
  for (std::size_t n = 0; n < input.size(); ++n) {
    Slice s = emit_at(input, n);
    if (s.domain() != outputs_)
      throw Error(ErrorCode::DomainMismatch, name_ + ": emitted " + s.domain().to_string() +
                                                 ", expected " + outputs_.to_string());
    if (guard_feed) {
      Slice early = emit_at(input, n, mode_.j);
      if (project(early, mode_.p) != project(s, mode_.p))
        throw Error(ErrorCode::CausalityViolation,
                    name_ + ": output on " + mode_.p.to_string() + " at tick " +
                        std::to_string(n) + " depends on " + mode_.j.to_string());
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace stepfuns {

namespace {
std::pair<ChannelSet, ChannelSet> ends(const std::map<std::string, std::string>& wiring) {
  std::vector<std::string> from, to;
  for (const auto& [a, b] : wiring) {
    from.push_back(a);
    to.push_back(b);
  }
  return {ChannelSet::checked(std::move(from)), ChannelSet::checked(std::move(to))};
}
}  // namespace

StepFun copy(const std::map<std::string, std::string>& wiring) {
  auto [in, out] = ends(wiring);
  return StepFun(in, out, PulseMode::weak(), [wiring](const InputView& v) {
    std::map<std::string, Seq> e;
    for (const auto& [from, to] : wiring) e.emplace(to, v.at(v.tick(), from));
    return Slice(std::move(e));
  }, "copy");
}

StepFun unit_delay(const std::map<std::string, std::string>& wiring, std::optional<Slice> first) {
  auto [in, out] = ends(wiring);
  Slice head = first.value_or(Slice::silent(out));
  if (head.domain() != out)
    throw Error(ErrorCode::DomainMismatch, "unit_delay: first slice must cover the outputs");
  return StepFun(in, out, PulseMode::strong(), [wiring, head](const InputView& v) {
    if (v.tick() == 0) return head;
    std::map<std::string, Seq> e;
    for (const auto& [from, to] : wiring) e.emplace(to, v.at(v.tick() - 1, from));
    return Slice(std::move(e));
  }, "unit_delay");
}

StepFun constant(const History& value) {
  return StepFun(ChannelSet{}, value.domain(), PulseMode::strong(),
                 [value](const InputView& v) { return value.tick(v.tick()); }, "constant");
}

}  // namespace stepfuns

// -------------------------------------------------------------- resolvers

std::size_t ScriptedResolver::choose(const std::string& key, std::size_t options) {
  if (options == 0) throw Error(ErrorCode::NotReactive, "no alternatives at choice " + key);
  if (auto it = memo_.find(key); it != memo_.end()) {
    if (it->second >= options)
      throw Error(ErrorCode::Configuration, "choice " + key + " changed its alternatives");
    return it->second;
  }
  std::size_t c = 0;
  if (used_ < script_.size()) {
    c = script_[used_];
    if (c >= options)
      throw Error(ErrorCode::Configuration, "choice script does not fit choice " + key);
  } else {
    script_.push_back(0);
  }
  arity_.push_back(options);
  ++used_;
  memo_.emplace(key, c);
  return c;
}

std::optional<std::vector<std::size_t>> ScriptedResolver::next_script() const {
  std::vector<std::size_t> next(script_.begin(), script_.begin() + static_cast<std::ptrdiff_t>(used_));
  for (std::size_t k = used_; k-- > 0;) {
    if (next[k] + 1 < arity_[k]) {
      ++next[k];
      next.resize(k + 1);
      return next;
    }
  }
  return std::nullopt;
}

std::size_t RandomResolver::choose(const std::string& key, std::size_t options) {
  if (options == 0) throw Error(ErrorCode::NotReactive, "no alternatives at choice " + key);
  auto [it, fresh] = memo_.try_emplace(key, 0);
  if (fresh) it->second = static_cast<std::size_t>(rng_() % options);
  return it->second;
}

// ------------------------------------------------------------- components

Component::Component(ChannelSet inputs, ChannelSet outputs, PulseMode mode, MemberBuilder builder,
                     std::string name)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      mode_(std::move(mode)),
      builder_(std::move(builder)),
      name_(std::move(name)) {}

Component Component::of(std::vector<StepFun> members, PulseMode mode) {
  if (members.empty())
    throw Error(ErrorCode::PrecondViolated, "a component needs at least one member");
  for (const auto& m : members)
    if (m.inputs() != members.front().inputs() || m.outputs() != members.front().outputs())
      throw Error(ErrorCode::DomainMismatch, "component members disagree on their interface");
  auto in = members.front().inputs();
  auto out = members.front().outputs();
  auto name = members.front().name();
  return Component(std::move(in), std::move(out), std::move(mode),
                   [members = std::move(members)](std::shared_ptr<Resolver> r) {
                     return members[r->choose("member", members.size())];
                   },
                   "{" + name + ",...}");
}

OutputSet Component::outputs_for(const History& input, const EnumerationOptions& opts) const {
  OutputSet out;
  std::vector<std::size_t> script;
  while (true) {
    auto r = std::make_shared<ScriptedResolver>(script);
    out.outputs.insert(build(r).apply(input));
    ++out.runs;
    auto next = r->next_script();
    if (!next) return out;
    if (out.runs >= opts.run_budget) break;
    script = std::move(*next);
  }
  if (!opts.allow_sampling)
    throw Error(ErrorCode::ExplosionGuard, name_ + ": more than " +
                                               std::to_string(opts.run_budget) +
                                               " resolver runs for one input");
  OutputSet sampled;
  sampled.exhaustive = false;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    auto r = std::make_shared<RandomResolver>(opts.seed + s);
    sampled.outputs.insert(build(r).apply(input));
    ++sampled.runs;
  }
  return sampled;
}

std::vector<StepFun> Component::members(std::size_t horizon, const Alphabet& alphabet,
                                        std::size_t bound, const EnumerationOptions& opts) const {
  const auto inputs =
      enumerate_histories(inputs_, enumerate_slices(inputs_, alphabet, {bound, {}}), horizon);
  std::set<std::vector<History>> seen;
  std::vector<StepFun> out;
  std::vector<std::size_t> script;
  std::size_t runs = 0;
  while (true) {
    auto r = std::make_shared<ScriptedResolver>(script);
    StepFun f = build(r);
    std::vector<History> graph;
    graph.reserve(inputs.size());
    for (const auto& in : inputs) graph.push_back(f.apply(in));
    if (seen.insert(std::move(graph)).second) out.push_back(std::move(f));
    auto next = r->next_script();
    if (!next) return out;
    if (++runs >= opts.run_budget)
      throw Error(ErrorCode::ExplosionGuard,
                  name_ + ": member enumeration exceeded " + std::to_string(opts.run_budget));
    script = std::move(*next);
  }
}

namespace {

// The members of a composition evaluated over `len` ticks of `input`.
struct ScheduleRun {
  History left;
  History right;
};

struct Wiring {
  bool left_leads = true;
  ChannelSet j;  // left reads from right
  ChannelSet p;  // right reads from left
};

History input_for(const ChannelSet& inputs, const History& outer, const History& fed) {
  return project(sum(outer, fed), inputs);
}

ScheduleRun run_schedule(const StepFun& f1, const StepFun& f2, const Wiring& w,
                         const History& outer) {
  const StepFun& lead = w.left_leads ? f1 : f2;
  const StepFun& follow = w.left_leads ? f2 : f1;
  const ChannelSet& reads = w.left_leads ? w.j : w.p;  // leader's feedback inputs
  const ChannelSet& feed = w.left_leads ? w.p : w.j;   // leader's feedback outputs

  History lead_out(lead.outputs());
  History follow_out(follow.outputs());
  for (std::size_t t = 0; t < outer.size(); ++t) {
    const History outer_t = prefix(outer, t + 1);

    // Leader's feed outputs with the follower's current tick still unknown.
    History follow_guess = follow_out;
    follow_guess.push_back(Slice::silent(follow.outputs()));
    const History lead_in_guess = input_for(lead.inputs(), outer_t, follow_guess);
    const Slice fed = project(lead.emit_at(lead_in_guess, t, reads), feed);

    History lead_partial = lead_out;
    lead_partial.push_back(sum(fed, Slice::silent(lead.outputs().minus(feed))));
    const Slice follow_now = follow.emit_at(input_for(follow.inputs(), outer_t, lead_partial), t);
    if (follow_now.domain() != follow.outputs())
      throw Error(ErrorCode::DomainMismatch, follow.name() + ": incomplete emission");

    History follow_next = follow_out;
    follow_next.push_back(follow_now);
    const Slice lead_now = lead.emit_at(input_for(lead.inputs(), outer_t, follow_next), t);
    if (project(lead_now, feed) != fed)
      throw Error(ErrorCode::FixpointInconsistent,
                  lead.name() + ": feedback output at tick " + std::to_string(t) +
                      " changed once its feedback input arrived");
    lead_out.push_back(lead_now);
    follow_out = std::move(follow_next);
  }
  return w.left_leads ? ScheduleRun{lead_out, follow_out} : ScheduleRun{follow_out, lead_out};
}

}  // namespace

Component compose_components(const Component& left, const Component& right) {
  const auto &i1 = left.inputs(), &o1 = left.outputs(), &i2 = right.inputs(),
             &o2 = right.outputs();
  if (!i1.disjoint(o1) || !i2.disjoint(o2) || !o1.disjoint(o2))
    throw Error(ErrorCode::PrecondViolated,
                "components need I1 n O1 = I2 n O2 = O1 n O2 = {}");
  Wiring w{true, i1.intersect(o2), i2.intersect(o1)};
  if (w.j.empty()) {
    w.left_leads = true;
  } else if (w.p.empty()) {
    w.left_leads = false;
  } else if (left.mode().covers(w.j, w.p)) {
    w.left_leads = true;
  } else if (right.mode().covers(w.p, w.j)) {
    w.left_leads = false;
  } else {
    throw Error(ErrorCode::PrecondViolated,
                "neither " + left.name() + " is " +
                    PulseMode::strong_modulo(w.j, w.p).to_string() + " nor " + right.name() +
                    " is " + PulseMode::strong_modulo(w.p, w.j).to_string());
  }
  const ChannelSet inputs = i1.minus(o2).unite(i2.minus(o1));
  const ChannelSet outputs = o1.unite(o2);
  const bool strong =
      left.mode().kind == PulseKind::Strong && right.mode().kind == PulseKind::Strong;
  const PulseMode mode = strong ? PulseMode::strong() : PulseMode::weak();

  auto builder = [left, right, w, inputs, outputs, mode](std::shared_ptr<Resolver> r) {
    StepFun f1 = left.build(std::make_shared<ScopedResolver>(r, "1/"));
    StepFun f2 = right.build(std::make_shared<ScopedResolver>(r, "2/"));
    auto emit = [f1, f2, w, inputs](const InputView& v) {
      const std::size_t n = v.tick();
      History outer = v.prefix(n);
      outer.push_back(sum(v.visible(n), Slice::silent(v.masked().intersect(inputs))));
      auto run = run_schedule(f1, f2, w, outer);
      // Both defining equations must hold on the computed prefix.
      if (f1.apply(input_for(f1.inputs(), outer, run.right)) != run.left ||
          f2.apply(input_for(f2.inputs(), outer, run.left)) != run.right)
        throw Error(ErrorCode::FixpointInconsistent,
                    "composed outputs do not solve the feedback equations at tick " +
                        std::to_string(n));
      return sum(run.left.tick(n), run.right.tick(n));
    };
    return StepFun(inputs, outputs, mode, emit, "(" + f1.name() + " (x) " + f2.name() + ")");
  };
  return Component(inputs, outputs, mode, builder,
                   "(" + left.name() + " (x) " + right.name() + ")");
}

Component hide_component(const Component& f, const ChannelSet& p) {
  for (const auto& c : p)
    if (!f.outputs().contains(c))
      throw Error(ErrorCode::NotAnOutput, "'" + c + "' is not an output of " + f.name());
  const ChannelSet kept = f.outputs().minus(p);
  PulseMode mode = f.mode();
  if (mode.kind == PulseKind::StrongModulo) mode.p = mode.p.minus(p);
  auto builder = [f, kept, mode](std::shared_ptr<Resolver> r) {
    StepFun g = f.build(std::move(r));
    return StepFun(g.inputs(), kept, mode,
                   [g, kept](const InputView& v) { return project(g.emit(v), kept); },
                   "hide(" + g.name() + ")");
  };
  return Component(f.inputs(), kept, mode, builder, "hide" + p.to_string() + "(" + f.name() + ")");
}

Component automaton_to_component(const Automaton& a, PulseMode mode) {
  const auto& sig = a.signature();
  if (mode.kind == PulseKind::StrongModulo &&
      (!mode.j.subset_of(sig.inputs) || !mode.p.subset_of(sig.outputs)))
    throw Error(ErrorCode::PrecondViolated, a.name() + ": " + mode.to_string() +
                                                " does not fit the signature");
  const bool staged = mode.kind == PulseKind::Strong ||
                      (mode.kind == PulseKind::StrongModulo && !mode.j.empty() && !mode.p.empty());
  const ChannelSet reads = mode.kind == PulseKind::Strong ? sig.inputs : mode.j;
  const ChannelSet feed = mode.kind == PulseKind::Strong ? sig.outputs : mode.p;
  const ChannelSet free_inputs = sig.inputs.minus(reads);

  auto builder = [a, mode, staged, reads, feed, free_inputs](std::shared_ptr<Resolver> r) {
    auto emit = [a, staged, reads, feed, free_inputs, r](const InputView& v) {
      const auto& s = a.signature();
      // Feed options depend on the state and the non-feedback input only.
      auto choose_feed = [&](const State& st, const std::string& key, const Slice& free) {
        std::set<Slice> options;
        for (const auto& t : a.step(st, sum(free, Slice::silent(reads))))
          options.insert(project(t.action, feed));
        if (options.empty())
          throw Error(ErrorCode::NotReactive, a.name() + " blocked at " + a.render_state(st));
        auto it = options.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(r->choose("P" + key, options.size())));
        return *it;
      };
      auto choose_step = [&](const State& st, const std::string& key, const Slice& in) {
        auto ts = a.step(st, in);
        if (staged) {
          const Slice fed = choose_feed(st, key, project(in, free_inputs));
          std::erase_if(ts, [&](const Transition& t) { return project(t.action, feed) != fed; });
          if (ts.empty())
            throw Error(ErrorCode::PrecondViolated,
                        a.name() + ": output on " + feed.to_string() + " depends on " +
                            reads.to_string() + " at " + a.render_state(st));
        }
        if (ts.empty())
          throw Error(ErrorCode::NotReactive,
                      a.name() + " blocked at " + a.render_state(st) + " on " + render(in));
        return ts[r->choose("T" + key + render(in), ts.size())];
      };

      State st = a.start();
      std::string key;
      const std::size_t n = v.tick();
      for (std::size_t k = 0; k < n; ++k) {
        const Slice in = v.slice(k);
        st = choose_step(st, key + "#" + render(project(in, free_inputs)) + "|", in).target;
        key += render(in) + ";";
      }
      const std::string here = key + "#";
      if (staged && !v.current_complete()) {
        Slice free;
        {
          std::map<std::string, Seq> e;
          for (const auto& c : free_inputs) e.emplace(c, v.at(n, c));
          free = Slice(std::move(e));
        }
        const Slice fed = choose_feed(st, here + render(free) + "|", free);
        return sum(fed, Slice::silent(s.outputs.minus(feed)));
      }
      const Slice in = v.slice(n);
      return project(choose_step(st, here + render(project(in, free_inputs)) + "|", in).action,
                     s.outputs);
    };
    return StepFun(a.signature().inputs, a.signature().outputs, mode, emit, a.name());
  };
  return Component(sig.inputs, sig.outputs, mode, builder, "[" + a.name() + "]");
}

// --------------------------------------------------------------- analysis

std::string to_string(PulseClass c) {
  switch (c) {
    case PulseClass::Strong: return "strong";
    case PulseClass::Weak: return "weak";
    case PulseClass::None: return "none";
  }
  return "?";
}

namespace {

std::vector<History> all_inputs(const ChannelSet& in, std::size_t horizon, const Alphabet& alphabet,
                                std::size_t bound, std::size_t budget) {
  const auto slices = enumerate_slices(in, alphabet, {bound, {}});
  double count = 1;
  for (std::size_t t = 0; t < horizon; ++t) count *= static_cast<double>(slices.size());
  if (count > static_cast<double>(budget))
    throw Error(ErrorCode::ExplosionGuard,
                std::to_string(count) + " input histories exceed the budget");
  return enumerate_histories(in, slices, horizon);
}

std::optional<PulseWitness> first_failure(const std::vector<History>& inputs,
                                          const std::vector<History>& outputs,
                                          std::size_t horizon, std::size_t lead) {
  for (std::size_t j = 0; j + lead <= horizon; ++j) {
    std::map<History, std::size_t> seen;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      auto [it, fresh] = seen.try_emplace(prefix(inputs[k], j), k);
      if (!fresh && prefix(outputs[it->second], j + lead) != prefix(outputs[k], j + lead))
        return PulseWitness{inputs[it->second], inputs[k], j};
    }
  }
  return std::nullopt;
}

}  // namespace

PulseClassification classify_pulse(const StepFun& f, std::size_t horizon,
                                   const Alphabet& alphabet, std::size_t bound,
                                   std::size_t input_budget) {
  const auto inputs = all_inputs(f.inputs(), horizon, alphabet, bound, input_budget);
  std::vector<History> outputs;
  outputs.reserve(inputs.size());
  for (const auto& in : inputs) outputs.push_back(f.apply(in));
  PulseClassification out;
  out.inputs_checked = inputs.size();
  auto strong = first_failure(inputs, outputs, horizon, 1);
  if (!strong) {
    out.cls = PulseClass::Strong;
    return out;
  }
  auto weak = first_failure(inputs, outputs, horizon, 0);
  out.cls = weak ? PulseClass::None : PulseClass::Weak;
  out.witness = weak ? weak : strong;
  return out;
}

LipschitzReport check_lipschitz(const StepFun& f, std::size_t horizon, const Alphabet& alphabet,
                                std::size_t bound, std::size_t shift) {
  const auto inputs = all_inputs(f.inputs(), horizon, alphabet, bound, 50'000);
  std::vector<History> outputs;
  outputs.reserve(inputs.size());
  for (const auto& in : inputs) outputs.push_back(f.apply(in));
  LipschitzReport rep;
  for (std::size_t x = 0; x < inputs.size(); ++x) {
    for (std::size_t y = x + 1; y < inputs.size(); ++y) {
      ++rep.pairs;
      const auto din = baire_distance(inputs[x], inputs[y]);
      const auto dout = baire_distance(outputs[x], outputs[y]);
      // Inputs differ, so din is exact. An upper-bound output distance is at
      // most 2^-horizon, which never exceeds 2^-(din + shift) for shift <= 1.
      if (dout.kind == DyadicDistance::Kind::UpperBound) {
        if (horizon < din.exponent + shift) {
          ++rep.violations;
          if (!rep.first_violation) rep.first_violation = {inputs[x], inputs[y]};
        }
        continue;
      }
      if (dout.exponent < din.exponent + shift) {
        ++rep.violations;
        if (!rep.first_violation) rep.first_violation = {inputs[x], inputs[y]};
      } else if (dout.exponent == din.exponent + shift) {
        ++rep.tight_pairs;
      }
    }
  }
  return rep;
}

// ----------------------------------------------------------- fixed points

FixResult banach_fix(const StepFun& f, const FixConfig& cfg, const History& params) {
  const ChannelSet& loop = f.outputs();
  if (!loop.subset_of(f.inputs()))
    throw Error(ErrorCode::PrecondViolated, f.name() + ": outputs " + loop.to_string() +
                                                " are not all fed back as inputs");
  if (!f.mode().covers(loop, loop))
    throw Error(ErrorCode::NotContractive,
                f.name() + " is declared " + f.mode().to_string() + ", not strong on " +
                    loop.to_string());
  const std::size_t horizon = cfg.horizon;
  const ChannelSet param_domain = f.inputs().minus(loop);
  History p = params;
  if (p.domain().empty() && p.empty()) p = History::silent(param_domain, horizon);
  if (p.domain() != param_domain || p.size() != horizon)
    throw Error(ErrorCode::DomainMismatch, f.name() + ": parameters must cover " +
                                               param_domain.to_string() + " for " +
                                               std::to_string(horizon) + " ticks");
  History z = cfg.seed.value_or(History::silent(loop, horizon));
  if (z.domain() != loop || z.size() != horizon)
    throw Error(ErrorCode::DomainMismatch, "seed must cover " + loop.to_string() + " for " +
                                               std::to_string(horizon) + " ticks");
  const std::size_t max_it = cfg.max_iterations.value_or(horizon + 1);
  if (max_it == 0) throw Error(ErrorCode::Configuration, "max_iterations must be >= 1");
  // Iterate k is f applied k times to the seed; it is returned once f maps
  // it to itself.
  for (std::size_t it = 0; it <= max_it; ++it) {
    History next = f.apply(sum(z, p));
    if (next == z) {
      auto residual = baire_distance(z, next);
      return FixResult{std::move(z), it, residual};
    }
    if (it == max_it) break;
    z = std::move(next);
  }
  throw Error(ErrorCode::NoConvergence, f.name() + " not stable after " + std::to_string(max_it) +
                                            " iterations");
}

StepFun fixpoint_function(const StepFun& f) {
  const ChannelSet loop = f.outputs();
  if (!loop.subset_of(f.inputs()))
    throw Error(ErrorCode::PrecondViolated, f.name() + ": outputs are not fed back");
  if (!f.mode().covers(loop, loop))
    throw Error(ErrorCode::NotContractive, f.name() + " is not strong on its loop");
  const ChannelSet params = f.inputs().minus(loop);
  const PulseMode mode =
      f.mode().kind == PulseKind::Strong ? PulseMode::strong() : PulseMode::weak();
  return StepFun(params, loop, mode, [f, params](const InputView& v) {
    const std::size_t n = v.tick();
    History p = v.prefix(n);
    p.push_back(sum(v.visible(n), Slice::silent(v.masked().intersect(params))));
    return banach_fix(f, FixConfig{n + 1, {}, {}}, p).value.tick(n);
  }, "mu(" + f.name() + ")");
}

// ------------------------------------------------------------ equivalence

std::string EquivalenceReport::to_string() const {
  std::string head;
  switch (status) {
    case Status::Equivalent:
      return "EQUIVALENT over " + std::to_string(inputs_checked) + " inputs [" + schedule + "]";
    case Status::NoCounterexampleFound:
      return "NO-COUNTEREXAMPLE-FOUND (sampled) over " + std::to_string(inputs_checked) +
             " inputs [" + schedule + "]";
    case Status::Counterexample: head = "COUNTEREXAMPLE"; break;
  }
  auto block = [](const std::set<History>& hs) {
    std::string out;
    for (const auto& h : hs) out += "  ---\n" + render(h);
    return out;
  };
  std::set<History> only_left, only_right;
  std::set_difference(left_outputs.begin(), left_outputs.end(), right_outputs.begin(),
                      right_outputs.end(), std::inserter(only_left, only_left.end()));
  std::set_difference(right_outputs.begin(), right_outputs.end(), left_outputs.begin(),
                      left_outputs.end(), std::inserter(only_right, only_right.end()));
  return head + " input:\n" + render(*input) + "composed automaton outputs:\n" +
         block(left_outputs) + "composed component outputs:\n" + block(right_outputs) +
         "only in composed automaton:\n" + block(only_left) +
         "only in composed components:\n" + block(only_right);
}

namespace {

using Reference = std::function<std::set<History>(const History&)>;

EquivalenceReport compare_impl(const Component& left, const Component& right,
                               std::size_t horizon, const Alphabet& alphabet, std::size_t bound,
                               const EnumerationOptions& opts, const Reference& reference) {
  if (left.inputs() != right.inputs() || left.outputs() != right.outputs())
    throw Error(ErrorCode::DomainMismatch, left.name() + " and " + right.name() +
                                               " have different interfaces");
  EquivalenceReport rep;
  const auto inputs = all_inputs(left.inputs(), horizon, alphabet, bound, 200'000);
  for (const auto& in : inputs) {
    ++rep.inputs_checked;
    auto l = left.outputs_for(in, opts);
    auto r = right.outputs_for(in, opts);
    bool bad = false;
    if (l.exhaustive && r.exhaustive) {
      bad = l.outputs != r.outputs;
    } else {
      rep.status = EquivalenceReport::Status::NoCounterexampleFound;
      auto within = [](const std::set<History>& part, const std::set<History>& whole) {
        return std::includes(whole.begin(), whole.end(), part.begin(), part.end());
      };
      if (l.exhaustive) bad = !within(r.outputs, l.outputs);
      if (r.exhaustive) bad = bad || !within(l.outputs, r.outputs);
      if (reference) {
        auto ref = reference(in);
        bad = bad || !within(l.outputs, ref) || !within(r.outputs, ref);
      }
    }
    if (bad) {
      rep.status = EquivalenceReport::Status::Counterexample;
      rep.input = in;
      rep.left_outputs = std::move(l.outputs);
      rep.right_outputs = std::move(r.outputs);
      return rep;
    }
  }
  return rep;
}

}  // namespace

EquivalenceReport compare_components(const Component& left, const Component& right,
                                     std::size_t horizon, const Alphabet& alphabet,
                                     std::size_t bound, const EnumerationOptions& opts) {
  return compare_impl(left, right, horizon, alphabet, bound, opts, {});
}

EquivalenceReport check_equivalence(const Automaton& a, const Automaton& b,
                                    const Automaton& product, std::size_t horizon,
                                    const EquivalenceOptions& opts) {
  PulseOptions pulse;
  pulse.explore = opts.compose.explore;
  const auto verdict = check_compose_precondition(a, b, horizon, pulse);
  if (!verdict.well_defined())
    throw Error(ErrorCode::PrecondViolated, verdict.to_string());
  PulseMode mode_a = PulseMode::weak();
  PulseMode mode_b = PulseMode::weak();
  if (!verdict.trivial) {
    if (verdict.schedule() == Schedule::LeftFirst)
      mode_a = PulseMode::strong_modulo(verdict.feedback.j, verdict.feedback.p);
    else
      mode_b = PulseMode::strong_modulo(verdict.feedback.p, verdict.feedback.j);
  }
  const Component lhs = automaton_to_component(product);
  const Component rhs =
      compose_components(automaton_to_component(a, mode_a), automaton_to_component(b, mode_b));
  const std::size_t bound = opts.bound.value_or(product.input_bound());
  const auto outputs = product.signature().outputs;
  Reference reference = [&](const History& in) {
    return project_set(behaviors_for_input(product, in, opts.compose.explore), outputs);
  };
  auto rep = compare_impl(lhs, rhs, horizon, product.signature().alphabet, bound,
                          opts.enumeration, reference);
  rep.schedule = verdict.to_string();
  return rep;
}

EquivalenceReport check_equivalence(const Automaton& a, const Automaton& b, std::size_t horizon,
                                    const EquivalenceOptions& opts) {
  ComposeOptions co = opts.compose;
  co.horizon = horizon;
  return check_equivalence(a, b, compose(a, b, co), horizon, opts);
}

}  // namespace tpanet
