#pragma once

// Responder-based automata: the fair merge, the delaying buffer and the
// pair of mutually blocking automata.

#include <cstddef>
#include <utility>

#include "tpanet/automaton.hpp"

namespace tpanet::builtins {

/// One state, inputs {i, j}, output {o}: every tick emits some interleaving
/// of everything received on i and j during that tick.
Automaton fair_merge(const Alphabet& alphabet, std::size_t input_bound = 1);

/// Order-preserving buffer from i to o. States are buffer contents, rendered
/// like sequences ("<a,b>"). While non-empty it emits a non-empty prefix.
/// Inputs that could push the contents past `capacity` raise Configuration.
Automaton buffer(const Alphabet& alphabet, std::size_t capacity = 8,
                 std::size_t input_bound = 1);

/// blocking_a: i -> o with o = c & i;  blocking_b: o -> i with i = c & o,
/// where c is the first alphabet symbol.
Automaton blocking_a(const Alphabet& alphabet, std::size_t input_bound = 1);
Automaton blocking_b(const Alphabet& alphabet, std::size_t input_bound = 1);
std::pair<Automaton, Automaton> blocking_pair(const Alphabet& alphabet,
                                              std::size_t input_bound = 1);

/// Every interleaving of a and b (as merged sequences), duplicates removed.
std::vector<Seq> interleavings(const Seq& a, const Seq& b);

}  // namespace tpanet::builtins
