#include <algorithm>
#include <random>

#include "doctest.h"
#include "tpanet/builtins.hpp"
#include "tpanet/generators.hpp"

using namespace tpanet;

namespace {

Slice sl(std::map<std::string, Seq> m) { return Slice(std::move(m)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Configuration;
}

// Merges by walking every p in {i,j}^(|a|+|b|) and keeping the words with
// exactly |a| i-positions, reading a and b in order.
std::set<Seq> merges_by_position_words(const Seq& a, const Seq& b) {
  const std::size_t n = a.size() + b.size();
  std::set<Seq> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
    Seq c;
    std::size_t x = 0, y = 0;
    for (std::size_t k = 0; k < n; ++k) c.push_back((mask >> k) & 1 ? a[x++] : b[y++]);
    out.insert(c);
  }
  return out;
}

Automaton partial_table() {
  TableSpec spec;
  spec.name = "partial";
  spec.signature = {Alphabet{"a"}, {"i"}, {"o"}, {}};
  spec.states = {"s0", "s1"};
  spec.start = "s0";
  spec.transitions = {
      {"s0", sl({{"i", {}}, {"o", {}}}), "s0"},
      {"s0", sl({{"i", {"a"}}, {"o", {"a"}}}), "s1"},
      {"s1", sl({{"i", {"a"}}, {"o", {}}}), "s1"},
  };
  return Automaton::from_table(spec);
}

}  // namespace

TEST_CASE("signatures") {
  CHECK_NOTHROW(check_signature({Alphabet{"a"}, {"i", "j"}, {"o"}, {}}));
  CHECK(code_of([] { check_signature({Alphabet{"a"}, {"i"}, {"i"}, {}}); }) ==
        ErrorCode::OverlapError);
  CHECK_NOTHROW(check_signature({Alphabet{"a"}, {}, {}, {}}));
  CHECK(render(builtins::fair_merge(Alphabet{"a", "b"}).signature()) ==
        "(D={a,b}, I={i,j}, O={o}, H={})");
  CHECK(render(builtins::buffer(Alphabet{"a"}).signature()) == "(D={a}, I={i}, O={o}, H={})");
  CHECK(builtins::buffer(Alphabet{"a"}).render_state(builtins::buffer(Alphabet{"a"}).start()) ==
        "<>");
  auto [ba, bb] = builtins::blocking_pair(Alphabet{"a"});
  CHECK(ba.signature().inputs == bb.signature().outputs);
  CHECK(ba.signature().outputs == bb.signature().inputs);
}

TEST_CASE("input enumeration") {
  const Alphabet d{"a", "b"};
  const auto one = enumerate_inputs({d, {"i"}, {}, {}}, 1);
  REQUIRE(one.size() == 3);
  CHECK(render(one[0]) == "i:<>");
  CHECK(render(one[1]) == "i:<a>");
  CHECK(render(one[2]) == "i:<b>");
  CHECK(enumerate_inputs({d, {}, {"o"}, {}}, 1).size() == 1);
  CHECK(enumerate_inputs({d, {"i", "j"}, {}, {}}, 1).size() == 9);
  // (sum_{k<=L} |D|^k)^|I|
  CHECK(enumerate_inputs({d, {"i", "j"}, {}, {}}, 2).size() == 49);
}

TEST_CASE("merge interleavings agree with position words") {
  std::mt19937_64 rng(2);
  const std::vector<Seq> pool{{}, {"a"}, {"b"}, {"a", "b"}, {"b", "b", "a"}, {"a", "a"}};
  for (int round = 0; round < 60; ++round) {
    const Seq& a = pool[rng() % pool.size()];
    const Seq& b = pool[rng() % pool.size()];
    auto got = builtins::interleavings(a, b);
    CHECK(std::set<Seq>(got.begin(), got.end()) == merges_by_position_words(a, b));
    CHECK(std::is_sorted(got.begin(), got.end()));
  }
}

TEST_CASE("steps of the builtins") {
  const Alphabet d{"a", "b"};
  auto fm = builtins::fair_merge(d);
  auto ts = fm.step(fm.start(), sl({{"i", {"a"}}, {"j", {"b"}}}));
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].action.at("o") == Seq{"a", "b"});
  CHECK(ts[1].action.at("o") == Seq{"b", "a"});
  ts = fm.step(fm.start(), sl({{"i", {}}, {"j", {"b"}}}));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].action.at("o") == Seq{"b"});

  auto buf = builtins::buffer(Alphabet{"m"});
  ts = buf.step(buf.start(), sl({{"i", {"m"}}}));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].action.at("o").empty());
  CHECK(buf.render_state(ts[0].target) == "<m>");

  CHECK(code_of([&] { (void)fm.step(fm.start(), sl({{"i", {}}})); }) ==
        ErrorCode::DomainMismatch);
  auto small = builtins::buffer(Alphabet{"m"}, 1);
  CHECK(code_of([&] { (void)small.step(State{"<m,m>"}, sl({{"i", {"m"}}})); }) ==
        ErrorCode::Configuration);
}

TEST_CASE("reactiveness") {
  CHECK(check_reactive(builtins::fair_merge(Alphabet{"a", "b"})).ok);
  auto v = check_reactive(partial_table());
  CHECK_FALSE(v.ok);
  REQUIRE(v.state);
  CHECK(*v.state == State{"s1"});
  CHECK(render(*v.input) == "i:<>");

  TableSpec silent;
  silent.name = "ticker";
  silent.signature = {Alphabet{"a"}, {}, {"o"}, {}};
  silent.states = {"s"};
  silent.start = "s";
  silent.transitions = {{"s", sl({{"o", {"a"}}}), "s"}};
  CHECK(check_reactive(Automaton::from_table(silent)).ok);

  CHECK(code_of([] { (void)check_weak_pulse(partial_table(), 2); }) == ErrorCode::NotReactive);
}

TEST_CASE("behaviour enumeration") {
  auto fm = builtins::fair_merge(Alphabet{"a"});
  CHECK(behaviors(fm, 0) == BehaviorSet{History(ChannelSet{"i", "j", "o"})});
  // Inputs (<>,<>), (<a>,<>), (<>,<a>), (<a>,<a>); the last merges to <a,a> either way.
  CHECK(behaviors(fm, 1).size() == 4);

  auto buf = builtins::buffer(Alphabet{"m"});
  History in({"i"}, {sl({{"i", {"m"}}}), sl({{"i", {}}})});
  auto behs = behaviors_for_input(buf, in);
  REQUIRE(behs.size() == 1);
  CHECK(project(*behs.begin(), {"o"}) ==
        History({"o"}, {sl({{"o", {}}}), sl({{"o", {"m"}}})}));

  auto fm2 = builtins::fair_merge(Alphabet{"a", "b"});
  auto two = behaviors_for_input(fm2, History({"i", "j"}, {sl({{"i", {"a"}}, {"j", {"b"}}})}));
  CHECK(two.size() == 2);
}

TEST_CASE("behaviour sets are prefix closed and inputs always progress") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    auto a = gen::random_automaton(rng, "R", {Alphabet{"a", "b"}, {"i"}, {"o"}, {}});
    const auto full = behaviors(a, 3);
    for (std::size_t n = 0; n <= 3; ++n) CHECK(prefix_set(full, n) == behaviors(a, n));
    for (const auto& in : enumerate_histories({"i"}, enumerate_inputs(a.signature(), 1), 2))
      CHECK_FALSE(behaviors_for_input(a, in).empty());
    CHECK(executions(a, 2).size() >= behaviors(a, 2).size());
    CHECK(schedules(a, 3).size() >= full.size());
  }
}

TEST_CASE("pulse checks on the builtins") {
  auto fm = builtins::fair_merge(Alphabet{"a", "b"});
  CHECK(check_weak_pulse(fm, 2).ok);
  auto strong = check_strong_pulse(fm, 2);
  CHECK_FALSE(strong.ok);
  REQUIRE(strong.witness);
  CHECK(strong.witness->n == 0);
  CHECK(check_strong_pulse(builtins::buffer(Alphabet{"a"}), 3).ok);
  CHECK(check_strong_pulse_modulo(fm, {"i", "j"}, {}, 2).ok);
  CHECK_FALSE(check_strong_pulse_modulo(fm, {"i", "j"}, {"o"}, 2).ok);
  CHECK(code_of([&] { (void)check_strong_pulse_modulo(fm, {"o"}, {}, 2); }) ==
        ErrorCode::PrecondViolated);

  // Reading "until time n" as including tick n makes FM pass the strong form.
  PulseOptions inclusive;
  inclusive.reading = PrefixReading::InputInclusive;
  CHECK(check_strong_pulse(fm, 2, inclusive).ok);
  CHECK(check_weak_pulse(fm, 2, inclusive).ok);
}

TEST_CASE("weak pulse-drivenness of random automata") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 20; ++round) {
    auto a = gen::random_automaton(rng, "R", {Alphabet{"a", "b"}, {"i"}, {"o"}, {"h"}});
    CHECK(check_weak_pulse(a, 2).ok);
  }
  for (int round = 0; round < 10; ++round) {
    gen::AutomatonShape shape;
    shape.strong = true;
    auto a = gen::random_automaton(rng, "S", {Alphabet{"a", "b"}, {"i"}, {"o"}, {}}, shape);
    CHECK(check_strong_pulse(a, 3).ok);
  }
}

TEST_CASE("buffer conserves order and drains") {
  const std::size_t cap = 3;
  auto buf = builtins::buffer(Alphabet{"a", "b"}, cap);
  const auto slices = enumerate_inputs(buf.signature(), 1);
  std::size_t checked = 0;
  for (const auto& e : executions(buf, 3)) {
    Seq in_before, out_so_far;
    for (std::size_t k = 0; k < e.actions.size(); ++k) {
      const auto& o = e.actions.tick(k).at("o");
      out_so_far.insert(out_so_far.end(), o.begin(), o.end());
      REQUIRE(out_so_far.size() <= in_before.size());
      CHECK(std::equal(out_so_far.begin(), out_so_far.end(), in_before.begin()));
      const auto& i = e.actions.tick(k).at("i");
      in_before.insert(in_before.end(), i.begin(), i.end());
    }
    // After `cap` silent ticks every run has emptied the buffer.
    std::set<State> frontier{e.states.back()};
    for (std::size_t idle = 0; idle < cap; ++idle) {
      std::set<State> next;
      for (const auto& s : frontier)
        for (const auto& t : buf.step(s, slices.front())) next.insert(t.target);
      frontier = next;
    }
    CHECK(frontier == std::set<State>{State{"<>"}});
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("witnesses reproduce their failures") {
  const Alphabet d{"a", "b"};
  std::mt19937_64 rng(31);
  for (int round = 0; round < 15; ++round) {
    auto a = gen::random_automaton(rng, "R", {d, {"i"}, {"o"}, {}});
    auto v = check_strong_pulse(a, 2);
    if (v.ok) continue;
    REQUIRE(v.witness);
    const auto& w = *v.witness;
    CHECK(prefix(w.iota, w.n) == prefix(w.kappa, w.n));
    auto outs = [&](const History& in) {
      return prefix_set(project_set(behaviors_for_input(a, in), {"o"}), w.n + 1);
    };
    CHECK(outs(w.iota) != outs(w.kappa));
  }

  TableSpec spec;
  spec.name = "stuck";
  spec.signature = {d, {"i"}, {"o"}, {}};
  spec.states = {"s", "t"};
  spec.start = "s";
  spec.transitions = {{"s", Slice({{"i", {}}, {"o", {}}}), "t"},
                      {"s", Slice({{"i", {"a"}}, {"o", {}}}), "s"},
                      {"s", Slice({{"i", {"b"}}, {"o", {}}}), "s"},
                      {"t", Slice({{"i", {}}, {"o", {}}}), "t"}};
  auto stuck = Automaton::from_table(spec);
  auto r = check_reactive(stuck, 2);
  REQUIRE_FALSE(r.ok);
  CHECK(stuck.step(*r.state, *r.input).empty());
}
