#include "tpanet/builtins.hpp"

#include <algorithm>

namespace tpanet::builtins {

std::vector<Seq> interleavings(const Seq& a, const Seq& b) {
  std::vector<Seq> out;
  Seq current;
  auto rec = [&](auto& self, std::size_t x, std::size_t y) -> void {
    if (x == a.size() && y == b.size()) {
      out.push_back(current);
      return;
    }
    if (x < a.size()) {
      current.push_back(a[x]);
      self(self, x + 1, y);
      current.pop_back();
    }
    if (y < b.size()) {
      current.push_back(b[y]);
      self(self, x, y + 1);
      current.pop_back();
    }
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Automaton fair_merge(const Alphabet& alphabet, std::size_t input_bound) {
  PortSignature sig{alphabet, {"i", "j"}, {"o"}, {}};
  auto responder = [](const State& s, const Slice& input) {
    std::vector<Transition> out;
    for (auto& c : interleavings(input.at("i"), input.at("j")))
      out.push_back(Transition{sum(input, Slice{{"o", std::move(c)}}), s});
    return out;
  };
  return Automaton::from_responder("fair_merge", sig, State{"s"}, responder, input_bound);
}

Automaton buffer(const Alphabet& alphabet, std::size_t capacity, std::size_t input_bound) {
  PortSignature sig{alphabet, {"i"}, {"o"}, {}};
  auto responder = [capacity](const State& s, const Slice& input) {
    const Seq contents = parse_seq(s.at(0));
    const Seq& incoming = input.at("i");
    // Worst case keeps all but one buffered message.
    const std::size_t kept = contents.empty() ? 0 : contents.size() - 1;
    if (kept + incoming.size() > capacity)
      throw Error(ErrorCode::Configuration,
                  "buffer capacity " + std::to_string(capacity) + " exceeded at state " +
                      s.at(0) + " with input " + render(incoming));
    std::vector<Transition> out;
    const std::size_t min_emit = contents.empty() ? 0 : 1;
    for (std::size_t k = min_emit; k <= contents.size(); ++k) {
      Seq emitted(contents.begin(), contents.begin() + static_cast<std::ptrdiff_t>(k));
      Seq rest(contents.begin() + static_cast<std::ptrdiff_t>(k), contents.end());
      rest.insert(rest.end(), incoming.begin(), incoming.end());
      out.push_back(Transition{sum(input, Slice{{"o", std::move(emitted)}}), State{render(rest)}});
    }
    return out;
  };
  return Automaton::from_responder("buffer", sig, State{render(Seq{})}, responder, input_bound);
}

namespace {

Automaton prepending(std::string name, const Alphabet& alphabet, const std::string& from,
                     const std::string& to, std::string state, std::size_t input_bound) {
  PortSignature sig{alphabet, {from}, {to}, {}};
  const std::string head = alphabet.first();
  auto responder = [from, to, head](const State& s, const Slice& input) {
    Seq out{head};
    const Seq& in = input.at(from);
    out.insert(out.end(), in.begin(), in.end());
    return std::vector<Transition>{Transition{sum(input, Slice{{to, std::move(out)}}), s}};
  };
  return Automaton::from_responder(std::move(name), sig, State{std::move(state)}, responder,
                                   input_bound);
}

}  // namespace

Automaton blocking_a(const Alphabet& alphabet, std::size_t input_bound) {
  return prepending("blocking_a", alphabet, "i", "o", "s1", input_bound);
}

Automaton blocking_b(const Alphabet& alphabet, std::size_t input_bound) {
  return prepending("blocking_b", alphabet, "o", "i", "s2", input_bound);
}

std::pair<Automaton, Automaton> blocking_pair(const Alphabet& alphabet, std::size_t input_bound) {
  return {blocking_a(alphabet, input_bound), blocking_b(alphabet, input_bound)};
}

}  // namespace tpanet::builtins
