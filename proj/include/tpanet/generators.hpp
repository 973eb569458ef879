#pragma once

// Seeded random automata and stream functions for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "tpanet/automaton.hpp"
#include "tpanet/denotational.hpp"

namespace tpanet::gen {

struct AutomatonShape {
  std::size_t max_states = 3;
  std::size_t max_branching = 2;  // transitions per (state, input)
  std::size_t max_output = 1;     // symbols per output channel per tick
  std::size_t input_bound = 1;
  /// Output options depend on the state only, which makes the automaton
  /// strongly pulse-driven.
  bool strong = false;
};

/// Reactive table automaton with states s0..s{k-1} and start s0.
Automaton random_automaton(std::mt19937_64& rng, const std::string& name,
                           const PortSignature& sig, const AutomatonShape& shape = {});

enum class Wiring { Acyclic, Feedback, Any };

/// Two compatible automata over `alphabet`. Acyclic: A1 feeds A2 on m.
/// Feedback: A1 reads j from A2 and A2 reads o from A1; the side chosen to
/// lead is strongly pulse-driven so the composition is well defined.
std::pair<Automaton, Automaton> random_pair(std::mt19937_64& rng, const Alphabet& alphabet,
                                            Wiring wiring, AutomatonShape shape = {});

/// Deterministic function of the visible window of its input: output at
/// tick n hashes ticks [n - window, n) (strong) or [n - window, n] (weak).
StepFun random_stepfun(std::uint64_t seed, const ChannelSet& inputs, const ChannelSet& outputs,
                       const Alphabet& alphabet, bool strong, std::size_t window = 2,
                       std::size_t max_output = 1);

/// A strong transformer on loop channel z with parameter x, for banach_fix.
StepFun random_loop_transformer(std::uint64_t seed, const Alphabet& alphabet);

}  // namespace tpanet::gen
