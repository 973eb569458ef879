#include "tpanet/generators.hpp"

#include <algorithm>

namespace tpanet::gen {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

Slice random_slice(std::mt19937_64& rng, const ChannelSet& channels,
                   const std::vector<Seq>& seqs) {
  std::map<std::string, Seq> e;
  for (const auto& c : channels) e.emplace(c, seqs[pick(rng, seqs.size())]);
  return Slice(std::move(e));
}

// FNV-1a, so generated functions do not depend on the standard library's hash.
std::uint64_t fnv(std::uint64_t seed, const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Automaton random_automaton(std::mt19937_64& rng, const std::string& name,
                           const PortSignature& sig, const AutomatonShape& shape) {
  check_signature(sig);
  const std::size_t k = 1 + pick(rng, std::max<std::size_t>(shape.max_states, 1));
  TableSpec spec;
  spec.name = name;
  spec.signature = sig;
  spec.input_bound = shape.input_bound;
  for (std::size_t s = 0; s < k; ++s) spec.states.push_back("s" + std::to_string(s));
  spec.start = "s0";

  const auto outs = enumerate_sequences(sig.alphabet, shape.max_output);
  const ChannelSet produced = sig.outputs.unite(sig.hidden);
  const auto inputs = enumerate_inputs(sig, shape.input_bound);
  const std::size_t branching = std::max<std::size_t>(shape.max_branching, 1);

  for (const auto& src : spec.states) {
    std::vector<Slice> options;
    if (shape.strong) {
      const std::size_t n = 1 + pick(rng, branching);
      for (std::size_t b = 0; b < n; ++b) options.push_back(random_slice(rng, produced, outs));
    }
    for (const auto& in : inputs) {
      std::vector<Slice> here = options;
      if (!shape.strong) {
        const std::size_t n = 1 + pick(rng, branching);
        for (std::size_t b = 0; b < n; ++b) here.push_back(random_slice(rng, produced, outs));
      }
      for (const auto& out : here)
        spec.transitions.push_back({src, sum(in, out), spec.states[pick(rng, k)]});
    }
  }
  std::sort(spec.transitions.begin(), spec.transitions.end());
  spec.transitions.erase(std::unique(spec.transitions.begin(), spec.transitions.end()),
                         spec.transitions.end());
  return Automaton::from_table(std::move(spec));
}

std::pair<Automaton, Automaton> random_pair(std::mt19937_64& rng, const Alphabet& alphabet,
                                            Wiring wiring, AutomatonShape shape) {
  if (wiring == Wiring::Any) wiring = pick(rng, 2) == 0 ? Wiring::Acyclic : Wiring::Feedback;
  if (wiring == Wiring::Acyclic) {
    // A1: i -> m (optionally also a private output p); A2: m [, j] -> o.
    PortSignature s1{alphabet, {"i"}, pick(rng, 2) ? ChannelSet{"m"} : ChannelSet{"m", "p"}, {}};
    PortSignature s2{alphabet, pick(rng, 2) ? ChannelSet{"m"} : ChannelSet{"j", "m"}, {"o"}, {}};
    auto a = random_automaton(rng, "A1", s1, shape);
    auto b = random_automaton(rng, "A2", s2, shape);
    return {a, b};
  }
  // A1: i, j -> o; A2: o -> j. One side leads.
  PortSignature s1{alphabet, {"i", "j"}, {"o"}, {}};
  PortSignature s2{alphabet, {"o"}, {"j"}, {}};
  const bool left_leads = pick(rng, 2) == 0;
  AutomatonShape s1_shape = shape, s2_shape = shape;
  (left_leads ? s1_shape : s2_shape).strong = true;
  auto a = random_automaton(rng, "A1", s1, s1_shape);
  auto b = random_automaton(rng, "A2", s2, s2_shape);
  return {a, b};
}

StepFun random_stepfun(std::uint64_t seed, const ChannelSet& inputs, const ChannelSet& outputs,
                       const Alphabet& alphabet, bool strong, std::size_t window,
                       std::size_t max_output) {
  const auto seqs = enumerate_sequences(alphabet, max_output);
  auto emit = [=](const InputView& v) {
    const std::size_t n = v.tick();
    const std::size_t end = strong ? n : n + 1;
    const std::size_t begin = end > window ? end - window : 0;
    std::string key = std::to_string(n) + "|";
    for (std::size_t k = begin; k < end; ++k) key += render(v.slice(k)) + ";";
    std::map<std::string, Seq> e;
    for (const auto& c : outputs) e.emplace(c, seqs[fnv(seed, key + c) % seqs.size()]);
    return Slice(std::move(e));
  };
  return StepFun(inputs, outputs, strong ? PulseMode::strong() : PulseMode::weak(), emit,
                 std::string(strong ? "strong" : "weak") + "#" + std::to_string(seed));
}

StepFun random_loop_transformer(std::uint64_t seed, const Alphabet& alphabet) {
  return random_stepfun(seed, ChannelSet{"x", "z"}, ChannelSet{"z"}, alphabet, true, 2, 2);
}

}  // namespace tpanet::gen
