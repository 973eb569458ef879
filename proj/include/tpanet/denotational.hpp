#pragma once

// History-based semantics. A StepFun is a deterministic, causal stream
// function evaluated tick by tick; a Component is a nonempty family of
// StepFuns, generated by a builder that consults a Resolver for every
// nondeterministic choice. Enumerating resolvers enumerates the family.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tpanet/automaton.hpp"
#include "tpanet/composition.hpp"
#include "tpanet/history.hpp"

namespace tpanet {

enum class PulseKind { Weak, Strong, StrongModulo };

struct PulseMode {
  PulseKind kind = PulseKind::Weak;
  ChannelSet j;  // StrongModulo only
  ChannelSet p;

  static PulseMode weak() { return {}; }
  static PulseMode strong() { return {PulseKind::Strong, {}, {}}; }
  static PulseMode strong_modulo(ChannelSet j, ChannelSet p) {
    return {PulseKind::StrongModulo, std::move(j), std::move(p)};
  }

  /// Whether outputs `p` are guaranteed not to read the current tick of `j`.
  bool covers(const ChannelSet& j, const ChannelSet& p) const;
  std::string to_string() const;

  bool operator==(const PulseMode&) const = default;
};

/// What an emitter may read when producing the output of tick `tick()`:
/// all earlier ticks, and the channels of the current tick not masked.
class InputView {
 public:
  InputView(const History& input, std::size_t tick, ChannelSet masked);

  std::size_t tick() const noexcept { return tick_; }
  const ChannelSet& domain() const noexcept { return input_.domain(); }
  bool readable(std::size_t k, const std::string& channel) const;
  bool current_complete() const noexcept { return masked_.empty(); }
  const ChannelSet& masked() const noexcept { return masked_; }

  const Seq& at(std::size_t k, const std::string& channel) const;
  /// Whole slice of tick k; throws CausalityViolation if any part is hidden.
  Slice slice(std::size_t k) const;
  /// Readable part of tick k.
  Slice visible(std::size_t k) const;
  /// Ticks [0, k), all of which must be readable.
  History prefix(std::size_t k) const;

 private:
  const History& input_;
  std::size_t tick_;
  ChannelSet masked_;
};

/// Output slice for the current tick. With masked inputs only the channels
/// the mode promises (P for StrongModulo) are used by callers.
using Emitter = std::function<Slice(const InputView&)>;

class StepFun {
 public:
  StepFun(ChannelSet inputs, ChannelSet outputs, PulseMode mode, Emitter emit,
          std::string name = "f");

  const ChannelSet& inputs() const noexcept { return inputs_; }
  const ChannelSet& outputs() const noexcept { return outputs_; }
  const PulseMode& mode() const noexcept { return mode_; }
  const std::string& name() const noexcept { return name_; }

  /// Tick-by-tick evaluation. Each emission only sees what the mode allows;
  /// StrongModulo functions are additionally re-run with J masked and their
  /// P-part compared.
  History apply(const History& input) const;

  /// Emission at tick n with the mode's own masking plus `extra_mask`.
  Slice emit_at(const History& input, std::size_t n, const ChannelSet& extra_mask = {}) const;
  /// Raw emission through a caller-supplied view.
  Slice emit(const InputView& view) const;

 private:
  ChannelSet inputs_;
  ChannelSet outputs_;
  PulseMode mode_;
  Emitter emit_;
  std::string name_;
};

// ---------------------------------------------------------------- builtins

namespace stepfuns {
/// o := i (per channel pair), reads the current tick.
StepFun copy(const std::map<std::string, std::string>& wiring);
/// o at tick n := i at tick n-1; tick 0 emits `first` (silent by default).
StepFun unit_delay(const std::map<std::string, std::string>& wiring,
                   std::optional<Slice> first = {});
StepFun constant(const History& value);
}  // namespace stepfuns

// --------------------------------------------------------------- resolvers

/// Deterministic choice policy: the same key always yields the same choice.
class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual std::size_t choose(const std::string& key, std::size_t options) = 0;
};

/// Replays a choice script for fresh keys; new keys beyond the script take
/// choice 0 and extend it. `next_script` advances like an odometer.
class ScriptedResolver final : public Resolver {
 public:
  explicit ScriptedResolver(std::vector<std::size_t> script = {}) : script_(std::move(script)) {}
  std::size_t choose(const std::string& key, std::size_t options) override;
  std::optional<std::vector<std::size_t>> next_script() const;

 private:
  std::vector<std::size_t> script_;
  std::vector<std::size_t> arity_;
  std::size_t used_ = 0;
  std::map<std::string, std::size_t> memo_;
};

class RandomResolver final : public Resolver {
 public:
  explicit RandomResolver(std::uint64_t seed) : rng_(seed) {}
  std::size_t choose(const std::string& key, std::size_t options) override;

 private:
  std::mt19937_64 rng_;
  std::map<std::string, std::size_t> memo_;
};

/// Prefixes every key, so two functions can share one resolver.
class ScopedResolver final : public Resolver {
 public:
  ScopedResolver(std::shared_ptr<Resolver> parent, std::string scope)
      : parent_(std::move(parent)), scope_(std::move(scope)) {}
  std::size_t choose(const std::string& key, std::size_t options) override {
    return parent_->choose(scope_ + key, options);
  }

 private:
  std::shared_ptr<Resolver> parent_;
  std::string scope_;
};

// -------------------------------------------------------------- components

struct EnumerationOptions {
  std::size_t run_budget = 200'000;
  bool allow_sampling = false;
  std::size_t samples = 256;
  std::uint64_t seed = 1;
};

struct OutputSet {
  std::set<History> outputs;
  bool exhaustive = true;
  std::size_t runs = 0;
};

using MemberBuilder = std::function<StepFun(std::shared_ptr<Resolver>)>;

class Component {
 public:
  Component(ChannelSet inputs, ChannelSet outputs, PulseMode mode, MemberBuilder builder,
            std::string name = "F");

  /// Explicit finite member set; members must share the interface and the
  /// component mode is `mode`.
  static Component of(std::vector<StepFun> members, PulseMode mode = PulseMode::weak());

  const ChannelSet& inputs() const noexcept { return inputs_; }
  const ChannelSet& outputs() const noexcept { return outputs_; }
  const PulseMode& mode() const noexcept { return mode_; }
  const std::string& name() const noexcept { return name_; }

  StepFun build(std::shared_ptr<Resolver> resolver) const { return builder_(std::move(resolver)); }

  /// {apply(f, input) | f member}. Exhaustive over resolvers within the
  /// budget; otherwise seeded sampling (if allowed) or ExplosionGuard.
  OutputSet outputs_for(const History& input, const EnumerationOptions& opts = {}) const;

  /// Distinct members up to `horizon`: functions that agree on every input
  /// within the given bounds are collapsed.
  std::vector<StepFun> members(std::size_t horizon, const Alphabet& alphabet, std::size_t bound,
                               const EnumerationOptions& opts = {}) const;

 private:
  ChannelSet inputs_;
  ChannelSet outputs_;
  PulseMode mode_;
  MemberBuilder builder_;
  std::string name_;
};

/// Function-level composition: every member runs the per-tick schedule in
/// which the side that is strong on its feedback outputs goes first.
Component compose_components(const Component& left, const Component& right);

/// Drops `p` from every member's output.
Component hide_component(const Component& f, const ChannelSet& p);

/// Members are resolver-induced runs of the automaton. With a StrongModulo
/// `mode` the choice of P-outputs is made before the current tick's J-input
/// is read, so members honour that mode.
Component automaton_to_component(const Automaton& a, PulseMode mode = PulseMode::weak());

// -------------------------------------------------------------- analysis

enum class PulseClass { Strong, Weak, None };

struct PulseClassification {
  PulseClass cls = PulseClass::None;
  std::optional<PulseWitness> witness;  // against the next stronger class
  std::size_t inputs_checked = 0;
};

std::string to_string(PulseClass c);

PulseClassification classify_pulse(const StepFun& f, std::size_t horizon,
                                   const Alphabet& alphabet, std::size_t bound,
                                   std::size_t input_budget = 200'000);

/// d(f x, f y) <= 2^-shift * d(x, y) over all pairs of enumerated inputs
/// (shift 1 = contractive with constant 1/2, shift 0 = non-expansive).
struct LipschitzReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::size_t tight_pairs = 0;  // pairs attaining equality with exact distances
  std::optional<std::pair<History, History>> first_violation;
};

LipschitzReport check_lipschitz(const StepFun& f, std::size_t horizon, const Alphabet& alphabet,
                                std::size_t bound, std::size_t shift);

// ------------------------------------------------------------ fixed points

struct FixConfig {
  std::size_t horizon = 0;
  std::optional<History> seed;  // silent loop history when unset
  std::optional<std::size_t> max_iterations;  // horizon + 1 when unset
};

struct FixResult {
  History value;
  std::size_t iterations = 0;
  DyadicDistance residual;
};

/// Iterates z <- f(z + params) over the loop channels (f's outputs, which
/// must also be inputs). Rejects f unless its mode is strong on the loop.
FixResult banach_fix(const StepFun& f, const FixConfig& cfg, const History& params = History{});

/// The parameterised fixed point: inputs are f's inputs minus the loop,
/// outputs the loop. Declared strong when f is strong, weak otherwise.
StepFun fixpoint_function(const StepFun& f);

// ------------------------------------------------------------- equivalence

struct EquivalenceReport {
  enum class Status { Equivalent, NoCounterexampleFound, Counterexample };
  Status status = Status::Equivalent;
  std::size_t inputs_checked = 0;
  std::optional<History> input;
  std::set<History> left_outputs;   // from the composed automaton
  std::set<History> right_outputs;  // from the composed components
  std::string schedule;

  bool ok() const { return status != Status::Counterexample; }
  std::string to_string() const;
};

struct EquivalenceOptions {
  ComposeOptions compose;
  EnumerationOptions enumeration;
  std::optional<std::size_t> bound;  // input bound for enumerated inputs
};

/// Per-input output sets of two components over all inputs of `horizon`.
EquivalenceReport compare_components(const Component& left, const Component& right,
                                     std::size_t horizon, const Alphabet& alphabet,
                                     std::size_t bound, const EnumerationOptions& opts = {});

/// [A1 (x) A2] versus [A1] (x) [A2].
EquivalenceReport check_equivalence(const Automaton& a, const Automaton& b, std::size_t horizon,
                                    const EquivalenceOptions& opts = {});
/// Same, with an explicitly supplied product automaton.
EquivalenceReport check_equivalence(const Automaton& a, const Automaton& b,
                                    const Automaton& product, std::size_t horizon,
                                    const EquivalenceOptions& opts = {});

}  // namespace tpanet
