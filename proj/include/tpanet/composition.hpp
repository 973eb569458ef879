#pragma once

// One-to-many composition of port automata, hiding, channel renaming, the
// well-definedness verdict for a composition, and the oracle that checks a
// product against the pairwise projections of its factors.

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "tpanet/automaton.hpp"

namespace tpanet {

/// Empty when compatible; otherwise names the violated clause and channel.
std::optional<std::string> incompatibility(const PortSignature& a, const PortSignature& b);
void check_compatible(const PortSignature& a, const PortSignature& b);

PortSignature compose_signatures(const PortSignature& a, const PortSignature& b);

/// Feedback channels of a pair: J = I1 n O2 and P = I2 n O1.
struct Feedback {
  ChannelSet j;
  ChannelSet p;
};
Feedback feedback_of(const PortSignature& a, const PortSignature& b);

enum class Schedule {
  LeftFirst,    // left side's P-output is fixed before the right side steps
  RightFirst,   // symmetric
  JointSearch,  // bounded search over candidate J-slices
};

struct ComposeVerdict {
  Feedback feedback;
  bool trivial = false;  // J or P empty
  bool left_strong = false;
  bool right_strong = false;
  std::optional<PulseWitness> left_witness;
  std::optional<PulseWitness> right_witness;
  std::size_t horizon = 0;

  bool well_defined() const { return trivial || left_strong || right_strong; }
  Schedule schedule() const;
  std::string to_string() const;
};

struct ComposeOptions {
  std::size_t horizon = 3;
  /// Bound B on J-slices tried by the joint search; derived when unset.
  std::optional<std::size_t> joint_bound;
  bool force_joint_search = false;
  /// Check the product for reactiveness (within `horizon`) and throw
  /// EmptyComposition on the first blocked (state, input).
  bool verify_reactive = true;
  ExploreOptions explore;
};

ComposeVerdict check_compose_precondition(const Automaton& a, const Automaton& b,
                                          std::size_t horizon, const PulseOptions& opts = {});

struct Composition {
  Automaton product;
  ComposeVerdict verdict;
  Schedule schedule = Schedule::JointSearch;
  std::size_t joint_bound = 0;
};

Composition compose_detailed(const Automaton& a, const Automaton& b,
                             const ComposeOptions& opts = {});
Automaton compose(const Automaton& a, const Automaton& b, const ComposeOptions& opts = {});

/// Moves `p` (a subset of the outputs) into the hidden channels.
Automaton hide(const Automaton& a, const ChannelSet& p);

/// Renames channels (old -> new). The result must still be a valid signature.
Automaton rename(const Automaton& a, const std::map<std::string, std::string>& mapping);

std::string render(Schedule s);

struct DecompositionReport {
  bool ok = true;
  std::string claim;      // "execs", "scheds" or "behs"
  std::string direction;  // "product-only" or "projection-only"
  std::string offending;  // rendered history / execution
  std::size_t product_size[3] = {0, 0, 0};
  std::size_t feedback_bound = 0;

  std::string to_string() const;
};

/// Compares execs/scheds/behs of `product` with the sets assembled from
/// pairs of executions of the factors that agree on shared channels.
DecompositionReport decomposition_oracle(const Automaton& a, const Automaton& b,
                                         const Automaton& product, std::size_t horizon,
                                         const ExploreOptions& opts = {});
DecompositionReport decomposition_oracle(const Automaton& a, const Automaton& b,
                                         std::size_t horizon, const ExploreOptions& opts = {});

}  // namespace tpanet
