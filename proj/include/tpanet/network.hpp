#pragma once

// Network description files: alphabet, automata (tables or builtins),
// channel renamings, composition expressions, an input script and session
// settings. Parsing type-checks every expression.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tpanet/automaton.hpp"
#include "tpanet/composition.hpp"

namespace tpanet {

struct BuiltinRef {
  std::string kind;                // fair_merge, buffer, blocking_a, blocking_b
  std::vector<std::size_t> args;   // buffer(capacity)

  bool operator==(const BuiltinRef&) const = default;
};

struct AutomatonDecl {
  std::string name;
  std::optional<TableSpec> table;  // exactly one of table / builtin
  std::optional<BuiltinRef> builtin;

  bool operator==(const AutomatonDecl&) const = default;
};

struct RenameDecl {
  std::string automaton;
  std::string from;
  std::string to;

  bool operator==(const RenameDecl&) const = default;
};

struct Expr {
  enum class Kind { Ref, Compose, Hide };
  Kind kind = Kind::Ref;
  std::string name;          // Ref
  ChannelSet hidden;         // Hide
  std::vector<Expr> children;

  bool operator==(const Expr&) const = default;
};

struct NetDecl {
  std::string name;
  Expr expr;

  bool operator==(const NetDecl&) const = default;
};

struct SessionConfig {
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> bound;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;

  bool operator==(const SessionConfig&) const = default;
};

struct NetworkDescription {
  Alphabet alphabet;
  std::vector<AutomatonDecl> automata;
  std::vector<RenameDecl> renames;
  std::vector<NetDecl> nets;
  std::optional<History> input;
  SessionConfig config;

  const AutomatonDecl* find_automaton(const std::string& name) const;
  const NetDecl* find_net(const std::string& name) const;

  bool operator==(const NetworkDescription&) const = default;
};

/// Throws SyntaxError / NameError / TypeError, each with "line:col".
NetworkDescription parse_network(const std::string& text);
std::string render(const NetworkDescription& net);
std::string render(const Expr& e);

/// A declared automaton with its renamings applied.
Automaton resolve_automaton(const NetworkDescription& net, const std::string& name);
PortSignature signature_of(const NetworkDescription& net, const Expr& e);
Automaton elaborate(const NetworkDescription& net, const Expr& e, const ComposeOptions& opts = {});

}  // namespace tpanet
