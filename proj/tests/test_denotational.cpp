#include <random>

#include "doctest.h"
#include "tpanet/builtins.hpp"
#include "tpanet/denotational.hpp"
#include "tpanet/generators.hpp"

using namespace tpanet;

namespace {

Slice sl(std::map<std::string, Seq> m) { return Slice(std::move(m)); }

History hist(const ChannelSet& dom, const std::vector<std::map<std::string, Seq>>& ticks) {
  History h(dom);
  for (const auto& t : ticks) h.push_back(Slice(t));
  return h;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Configuration;
}

// <a> at tick 0, then z shifted by one tick.
StepFun prepend_shift() {
  return StepFun({"z"}, {"z"}, PulseMode::strong(), [](const InputView& v) {
    if (v.tick() == 0) return Slice({{"z", {"a"}}});
    return Slice({{"z", v.at(v.tick() - 1, "z")}});
  }, "prepend");
}

class FirstChoice final : public Resolver {
 public:
  std::size_t choose(const std::string&, std::size_t) override { return 0; }
};

}  // namespace

TEST_CASE("applying step functions") {
  auto id = stepfuns::copy({{"i", "o"}});
  auto in = hist({"i"}, {{{"i", {"a"}}}, {{"i", {}}}, {{"i", {"b"}}}});
  CHECK(project(id.apply(in), {"o"}) == hist({"o"}, {{{"o", {"a"}}}, {{"o", {}}}, {{"o", {"b"}}}}));

  auto delay = stepfuns::unit_delay({{"i", "o"}});
  CHECK(delay.apply(in) == hist({"o"}, {{{"o", {}}}, {{"o", {"a"}}}, {{"o", {}}}}));

  auto buf = automaton_to_component(builtins::buffer(Alphabet{"m"}));
  auto outs = buf.outputs_for(hist({"i"}, {{{"i", {"m"}}}, {{"i", {}}}}));
  CHECK(outs.exhaustive);
  CHECK(outs.outputs == std::set<History>{hist({"o"}, {{{"o", {}}}, {{"o", {"m"}}}})});

  // A strong declaration forbids reading the current tick.
  StepFun cheat({"i"}, {"o"}, PulseMode::strong(),
                [](const InputView& v) { return Slice({{"o", v.at(v.tick(), "i")}}); });
  CHECK(code_of([&] { (void)cheat.apply(in); }) == ErrorCode::CausalityViolation);
  CHECK(code_of([&] { (void)id.apply(History::silent({"x"}, 1)); }) == ErrorCode::DomainMismatch);
}

TEST_CASE("pulse classification") {
  const Alphabet d{"a", "b"};
  CHECK(classify_pulse(stepfuns::unit_delay({{"i", "o"}}), 3, d, 1).cls == PulseClass::Strong);
  auto copy = classify_pulse(stepfuns::copy({{"i", "o"}}), 3, d, 1);
  CHECK(copy.cls == PulseClass::Weak);
  REQUIRE(copy.witness);
  CHECK(copy.witness->n == 0);

  auto fm = automaton_to_component(builtins::fair_merge(d));
  for (const auto& f : fm.members(1, d, 1)) CHECK(classify_pulse(f, 2, d, 1).cls == PulseClass::Weak);
}

TEST_CASE("members of automaton components") {
  // Deterministic automaton: one member that reproduces the unique run.
  auto delay = builtins::buffer(Alphabet{"a"}, 8);
  TableSpec spec;
  spec.name = "toggle";
  spec.signature = {Alphabet{"a"}, {"i"}, {"o"}, {}};
  spec.states = {"s0"};
  spec.start = "s0";
  spec.transitions = {{"s0", sl({{"i", {}}, {"o", {"a"}}}), "s0"},
                      {"s0", sl({{"i", {"a"}}, {"o", {}}}), "s0"}};
  auto det = automaton_to_component(Automaton::from_table(spec));
  CHECK(det.members(3, Alphabet{"a"}, 1).size() == 1);

  // FM with one symbol: (<a>,<a>) merges to <a,a> both ways.
  CHECK(automaton_to_component(builtins::fair_merge(Alphabet{"a"})).members(1, Alphabet{"a"}, 1)
            .size() == 1);
  // Two symbols: inputs (<a>,<b>) and (<b>,<a>) each offer two orders.
  CHECK(automaton_to_component(builtins::fair_merge(Alphabet{"a", "b"}))
            .members(1, Alphabet{"a", "b"}, 1)
            .size() == 4);

  // The buffer's members all preserve order.
  auto buf = automaton_to_component(delay);
  for (const auto& f : buf.members(3, Alphabet{"a"}, 1)) {
    for (const auto& in : enumerate_histories({"i"}, enumerate_slices({"i"}, Alphabet{"a"}, {1, {}}), 3)) {
      std::size_t sent = 0, got = 0;
      const auto out = f.apply(in);
      for (std::size_t k = 0; k < 3; ++k) {
        got += out.tick(k).at("o").size();
        CHECK(got <= sent);
        sent += in.tick(k).at("i").size();
      }
    }
  }
}

TEST_CASE("members realize exactly the behaviours") {
  std::mt19937_64 rng(31);
  const Alphabet d{"a", "b"};
  for (int round = 0; round < 10; ++round) {
    auto a = gen::random_automaton(rng, "R", {d, {"i"}, {"o"}, {"h"}});
    auto c = automaton_to_component(a);
    for (const auto& in : enumerate_histories({"i"}, enumerate_inputs(a.signature(), 1), 2)) {
      auto behs = project_set(behaviors_for_input(a, in), {"o"});
      CHECK(c.outputs_for(in).outputs == behs);
    }
  }
}

TEST_CASE("banach iteration") {
  const Alphabet d{"a"};
  auto k = hist({"z"}, {{{"z", {"a"}}}, {{"z", {}}}, {{"z", {"a"}}}});
  StepFun constant({"z"}, {"z"}, PulseMode::strong(), [k](const InputView& v) { return k.tick(v.tick()); });
  auto r = banach_fix(constant, {3, {}, {}});
  CHECK(r.value == k);
  CHECK(r.iterations == 1);

  auto p = banach_fix(prepend_shift(), {5, {}, {}});
  CHECK(p.value == History(ChannelSet{"z"}, std::vector<Slice>(5, sl({{"z", {"a"}}}))));
  CHECK(p.iterations == 5);
  CHECK(p.residual.to_string() == "upper-bound 2^-5");
  auto noisy = History(ChannelSet{"z"}, std::vector<Slice>(5, sl({{"z", {"a", "a"}}})));
  auto other = banach_fix(prepend_shift(), {5, noisy, {}});
  CHECK(other.value == p.value);

  CHECK(code_of([] { (void)banach_fix(stepfuns::copy({{"z", "z"}}), {4, {}, {}}); }) ==
        ErrorCode::NotContractive);
  StepFun liar({"z"}, {"z"}, PulseMode::strong(),
               [](const InputView& v) { return Slice({{"z", v.at(v.tick(), "z")}}); });
  CHECK(code_of([&] { (void)banach_fix(liar, {4, {}, {}}); }) == ErrorCode::CausalityViolation);
  CHECK(code_of([&] { (void)banach_fix(prepend_shift(), {4, {}, 1}); }) == ErrorCode::NoConvergence);
}

TEST_CASE("parameterised fixed points stay strong") {
  const Alphabet d{"a", "b"};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto f = gen::random_loop_transformer(seed, d);
    auto mu = fixpoint_function(f);
    CHECK(mu.inputs() == ChannelSet{"x"});
    CHECK(mu.outputs() == ChannelSet{"z"});
    CHECK(classify_pulse(mu, 3, d, 1).cls == PulseClass::Strong);
    // Each value is a fixed point of f.
    for (const auto& x : enumerate_histories({"x"}, enumerate_slices({"x"}, d, {1, {}}), 3)) {
      auto z = mu.apply(x);
      CHECK(f.apply(sum(z, x)) == z);
    }
  }
}

TEST_CASE("component composition") {
  const Alphabet d{"a", "b"};
  auto delay = Component::of({stepfuns::unit_delay({{"i", "o"}})}, PulseMode::strong());
  auto copy = Component::of({stepfuns::copy({{"o", "p"}})});
  auto both = compose_components(delay, copy);
  CHECK(both.inputs() == ChannelSet{"i"});
  CHECK(both.outputs() == ChannelSet{"o", "p"});
  auto in = hist({"i"}, {{{"i", {"a"}}}, {{"i", {"b"}}}});
  auto out = both.outputs_for(in);
  REQUIRE(out.outputs.size() == 1);
  auto shifted = hist({"o"}, {{{"o", {}}}, {{"o", {"a"}}}});
  CHECK(project(*out.outputs.begin(), {"o"}) == shifted);
  CHECK(project(*out.outputs.begin(), {"p"}) ==
        hist({"p"}, {{{"p", {}}}, {{"p", {"a"}}}}));

  // A delay with first slice <a> fed back through a copy pins <a> everywhere.
  auto seed = Component::of({stepfuns::unit_delay({{"x", "z"}}, sl({{"z", {"a"}}}))},
                            PulseMode::strong());
  auto back = Component::of({stepfuns::copy({{"z", "x"}})});
  auto loop = compose_components(seed, back);
  CHECK(loop.inputs().empty());
  auto fixed = loop.outputs_for(History(ChannelSet{}, std::vector<Slice>(4, Slice{})));
  REQUIRE(fixed.outputs.size() == 1);
  CHECK(project(*fixed.outputs.begin(), {"z"}) ==
        History(ChannelSet{"z"}, std::vector<Slice>(4, sl({{"z", {"a"}}}))));

  // Pairing bound: 2 x 3 members, acyclic.
  auto two = Component::of({stepfuns::copy({{"i", "m"}}), stepfuns::unit_delay({{"i", "m"}})});
  auto three = Component::of({stepfuns::copy({{"m", "o"}}), stepfuns::unit_delay({{"m", "o"}}),
                              gen::random_stepfun(3, {"m"}, {"o"}, d, false)});
  auto pairs = compose_components(two, three).members(2, d, 1);
  CHECK(pairs.size() <= 6);
  CHECK(pairs.size() >= 3);

  // Weak on both sides of a cycle is rejected.
  auto w1 = Component::of({stepfuns::copy({{"x", "z"}})});
  auto w2 = Component::of({stepfuns::copy({{"z", "x"}})});
  CHECK(code_of([&] { (void)compose_components(w1, w2); }) == ErrorCode::PrecondViolated);
}

TEST_CASE("mis-declared modes are caught by the fixpoint re-check") {
  // Claims strong modulo ({j},{o}) but peeks at whether j is readable.
  StepFun peeker({"j"}, {"o"}, PulseMode::strong_modulo({"j"}, {"o"}), [](const InputView& v) {
    return v.readable(v.tick(), "j") ? Slice({{"o", v.at(v.tick(), "j")}}) : Slice({{"o", {}}});
  });
  auto left = Component::of({peeker}, PulseMode::strong_modulo({"j"}, {"o"}));
  auto right = Component::of({stepfuns::unit_delay({{"o", "j"}}, sl({{"j", {"a"}}}))});
  auto c = compose_components(left, right);
  CHECK(code_of([&] { (void)c.outputs_for(History(ChannelSet{}, std::vector<Slice>(2, Slice{}))); }) ==
        ErrorCode::FixpointInconsistent);
}

TEST_CASE("component hiding") {
  auto base = Component::of({stepfuns::copy({{"i", "o"}, {"j", "p"}})});
  auto in = hist({"i", "j"}, {{{"i", {"a"}}, {"j", {"b"}}}});
  CHECK(hide_component(base, {}).outputs_for(in).outputs == base.outputs_for(in).outputs);
  auto none = hide_component(base, {"o", "p"});
  CHECK(none.outputs().empty());
  CHECK(none.outputs_for(in).outputs == std::set<History>{History(ChannelSet{}, {Slice{}})});
  CHECK(code_of([&] { (void)hide_component(base, {"i"}); }) == ErrorCode::NotAnOutput);

  // Hiding the loop channel leaves the rest of the behaviour alone.
  auto seed = Component::of({stepfuns::unit_delay({{"x", "z"}}, sl({{"z", {"a"}}}))},
                            PulseMode::strong());
  auto back = Component::of({stepfuns::copy({{"z", "x"}})});
  auto loop = compose_components(seed, back);
  auto silent = History(ChannelSet{}, std::vector<Slice>(3, Slice{}));
  auto hidden = hide_component(loop, {"x"});
  CHECK(hidden.outputs_for(silent).outputs == project_set(loop.outputs_for(silent).outputs, {"z"}));
}

TEST_CASE("lipschitz constants") {
  const Alphabet d{"a", "b"};
  auto delay = check_lipschitz(stepfuns::unit_delay({{"i", "o"}}), 3, d, 1, 1);
  CHECK(delay.violations == 0);
  CHECK(delay.tight_pairs > 0);
  auto id = check_lipschitz(stepfuns::copy({{"i", "o"}}), 3, d, 1, 0);
  CHECK(id.violations == 0);
  CHECK(id.tight_pairs == id.pairs);
  CHECK(check_lipschitz(stepfuns::copy({{"i", "o"}}), 3, d, 1, 1).violations > 0);
}

TEST_CASE("equivalence of the two compositions") {
  const Alphabet d{"a"};
  auto fm = builtins::fair_merge(d);
  auto loop_buf = rename(builtins::buffer(d), {{"i", "o"}, {"o", "j"}});
  CHECK(check_equivalence(fm, loop_buf, 2).status == EquivalenceReport::Status::Equivalent);

  auto feed = rename(builtins::buffer(d), {{"i", "x"}, {"o", "i"}});
  CHECK(check_equivalence(feed, fm, 2).ok());

  auto a = builtins::buffer(d);
  auto b = rename(builtins::buffer(d), {{"i", "k"}, {"o", "p"}});
  auto indep = check_equivalence(a, b, 2);
  CHECK(indep.ok());
  CHECK(indep.inputs_checked == 16);

  // Broken schedule: the merge side always takes its first choice.
  const Alphabet d2{"a", "b"};
  auto fm2 = builtins::fair_merge(d2);
  auto feed2 = rename(builtins::buffer(d2), {{"i", "x"}, {"o", "i"}});
  auto full = automaton_to_component(compose(feed2, fm2));
  auto merge = automaton_to_component(fm2);
  Component stuck(merge.inputs(), merge.outputs(), merge.mode(),
                  [merge](std::shared_ptr<Resolver>) { return merge.build(std::make_shared<FirstChoice>()); });
  auto broken = compose_components(automaton_to_component(feed2), stuck);
  auto rep = compare_components(full, broken, 2, d2, 1);
  CHECK(rep.status == EquivalenceReport::Status::Counterexample);
  CHECK(rep.to_string().find("only in composed automaton") != std::string::npos);
}

TEST_CASE("sampling downgrades the verdict") {
  const Alphabet d{"a", "b"};
  EquivalenceOptions opts;
  opts.enumeration.run_budget = 1;
  opts.enumeration.allow_sampling = true;
  opts.enumeration.samples = 16;
  auto fm = builtins::fair_merge(d);
  auto loop_buf = rename(builtins::buffer(d), {{"i", "o"}, {"o", "j"}});
  auto rep = check_equivalence(fm, loop_buf, 2, opts);
  CHECK(rep.status == EquivalenceReport::Status::NoCounterexampleFound);

  opts.enumeration.allow_sampling = false;
  CHECK(code_of([&] { (void)check_equivalence(fm, loop_buf, 2, opts); }) == ErrorCode::ExplosionGuard);
}
