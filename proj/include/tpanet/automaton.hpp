#pragma once

// Timed port automata: signatures, reactive transition relations given as
// explicit tables or as responders, bounded-horizon executions, behaviour
// enumeration, and pulse-drivenness analysis.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpanet/history.hpp"

namespace tpanet {

/// A state of a (possibly composed) automaton: one atom per primitive
/// automaton, left to right in composition order.
using State = std::vector<std::string>;

struct PortSignature {
  Alphabet alphabet;
  ChannelSet inputs;
  ChannelSet outputs;
  ChannelSet hidden;

  ChannelSet all() const { return inputs.unite(outputs).unite(hidden); }
  ChannelSet external() const { return inputs.unite(outputs); }

  bool operator==(const PortSignature&) const = default;
};

/// Throws OverlapError naming the first channel found in two of I, O, H.
void check_signature(const PortSignature& sig);

std::string render(const PortSignature& sig);  // "(D={a,b}, I={i}, O={o}, H={})"

struct Transition {
  Slice action;  // over the full channel set C
  State target;

  auto operator<=>(const Transition&) const = default;
};

/// Per-channel length bounds for enumerated input slices.
struct InputBounds {
  std::size_t fallback = 1;
  std::map<std::string, std::size_t> per_channel;

  std::size_t bound_for(const std::string& channel) const;
};

/// Every slice over `channels` with sequences within the bounds. Canonical
/// order: first channel most significant, sequences in shortlex order.
std::vector<Slice> enumerate_slices(const ChannelSet& channels, const Alphabet& alphabet,
                                    const InputBounds& bounds);
std::vector<Slice> enumerate_inputs(const PortSignature& sig, std::size_t bound);

/// All histories of `length` ticks whose slices come from `slices`.
std::vector<History> enumerate_histories(const ChannelSet& domain,
                                         const std::vector<Slice>& slices, std::size_t length);

struct TableTransition {
  std::string source;
  Slice action;
  std::string target;

  auto operator<=>(const TableTransition&) const = default;
};

/// Explicit finite automaton, the form the network files round-trip.
struct TableSpec {
  std::string name;
  PortSignature signature;
  std::vector<std::string> states;
  std::string start;
  std::vector<TableTransition> transitions;
  std::size_t input_bound = 1;

  bool operator==(const TableSpec&) const = default;
};

/// Enumerates every (action, target) for a state and an input slice.
using Responder = std::function<std::vector<Transition>(const State&, const Slice& input)>;
using StateRenderer = std::function<std::string(const State&)>;

class AutomatonModel {
 public:
  virtual ~AutomatonModel() = default;
  virtual const std::string& name() const = 0;
  virtual const PortSignature& signature() const = 0;
  virtual const State& start() const = 0;
  virtual std::size_t input_bound() const = 0;
  virtual std::vector<Transition> transitions(const State& s, const Slice& input) const = 0;
  virtual std::string render_state(const State& s) const = 0;
  virtual const TableSpec* table() const { return nullptr; }
};

/// Immutable, cheaply copyable handle to an automaton model.
class Automaton {
 public:
  explicit Automaton(std::shared_ptr<const AutomatonModel> model);

  static Automaton from_table(TableSpec spec);
  static Automaton from_responder(std::string name, PortSignature sig, State start,
                                  Responder responder, std::size_t input_bound = 1,
                                  StateRenderer renderer = {});

  const std::string& name() const { return model_->name(); }
  const PortSignature& signature() const { return model_->signature(); }
  const State& start() const { return model_->start(); }
  std::size_t input_bound() const { return model_->input_bound(); }
  std::string render_state(const State& s) const { return model_->render_state(s); }
  const TableSpec* table() const { return model_->table(); }

  /// Transitions from `s` whose input part equals `input`, deduplicated and
  /// in canonical order. Empty only if the automaton is not reactive there.
  std::vector<Transition> step(const State& s, const Slice& input) const;

  Automaton with_input_bound(std::size_t bound) const;
  Automaton with_name(std::string name) const;

 private:
  std::shared_ptr<const AutomatonModel> model_;
};

struct Execution {
  std::vector<State> states;  // size n + 1
  History actions;            // over C, length n

  auto operator<=>(const Execution&) const = default;
};

using BehaviorSet = std::set<History>;

struct ExploreOptions {
  std::size_t node_budget = 2'000'000;
  /// Overrides the automaton's own input bound when set.
  std::optional<InputBounds> bounds;
};

std::set<Execution> executions(const Automaton& a, std::size_t horizon,
                               const ExploreOptions& opts = {});
std::set<History> schedules(const Automaton& a, std::size_t horizon,
                            const ExploreOptions& opts = {});
BehaviorSet behaviors(const Automaton& a, std::size_t horizon, const ExploreOptions& opts = {});

/// Behaviours whose input part is exactly `input` (A[input]).
BehaviorSet behaviors_for_input(const Automaton& a, const History& input,
                                const ExploreOptions& opts = {});

/// Reactiveness over inputs within the automaton's bound, for states
/// reachable from the start (within `horizon` ticks when given).
struct ReactiveVerdict {
  bool ok = true;
  std::optional<State> state;
  std::optional<Slice> input;
  std::size_t bound = 0;
  std::size_t states_checked = 0;

  std::string describe(const Automaton& a) const;
};

ReactiveVerdict check_reactive(const Automaton& a, std::optional<std::size_t> horizon = {},
                               const ExploreOptions& opts = {});

/// Throws NotReactive with the witness when check_reactive fails.
void require_reactive(const Automaton& a, std::optional<std::size_t> horizon = {},
                      const ExploreOptions& opts = {});

/// Which prefix the hypothesis of a pulse condition compares. `Standard`
/// compares inputs through the same depth n as the conclusion's base;
/// `InputInclusive` reads "until time n" as including tick n of the input.
enum class PrefixReading { Standard, InputInclusive };

struct PulseWitness {
  History iota;
  History kappa;
  std::size_t n = 0;
};

struct PulseVerdict {
  bool ok = true;
  std::optional<PulseWitness> witness;
  std::size_t inputs_checked = 0;
};

struct PulseOptions {
  ExploreOptions explore;
  PrefixReading reading = PrefixReading::Standard;
  std::size_t input_budget = 200'000;
};

PulseVerdict check_weak_pulse(const Automaton& a, std::size_t horizon,
                              const PulseOptions& opts = {});
PulseVerdict check_strong_pulse(const Automaton& a, std::size_t horizon,
                                const PulseOptions& opts = {});
PulseVerdict check_strong_pulse_modulo(const Automaton& a, const ChannelSet& j,
                                       const ChannelSet& p, std::size_t horizon,
                                       const PulseOptions& opts = {});

}  // namespace tpanet
