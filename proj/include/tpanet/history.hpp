#pragma once

// Timed communication histories: per-tick named message sequences (slices),
// bounded prefixes of named streams (histories), their sum / projection /
// prefix algebra, and the Baire distance between prefixes.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tpanet/error.hpp"

namespace tpanet {

using Message = std::string;
using Seq = std::vector<Message>;

/// Finite message alphabet, kept sorted so every enumeration is canonical.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::initializer_list<std::string> symbols);
  explicit Alphabet(std::vector<std::string> symbols);

  bool contains(std::string_view m) const;
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& first() const;

  auto operator<=>(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// Ordered set of channel names. Names are kept lexicographically sorted.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(std::initializer_list<std::string> names);
  explicit ChannelSet(std::vector<std::string> names);

  /// Like the vector constructor but rejects duplicates instead of merging them.
  static ChannelSet checked(std::vector<std::string> names);

  bool contains(std::string_view name) const;
  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  auto begin() const noexcept { return names_.begin(); }
  auto end() const noexcept { return names_.end(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  ChannelSet unite(const ChannelSet& other) const;
  ChannelSet intersect(const ChannelSet& other) const;
  ChannelSet minus(const ChannelSet& other) const;
  bool disjoint(const ChannelSet& other) const;
  bool subset_of(const ChannelSet& other) const;

  std::string to_string() const;  // "{a,b}"

  auto operator<=>(const ChannelSet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// One tick of named communication: channel -> finite message sequence.
/// The domain is exactly the key set; an empty sequence means "no message".
class Slice {
 public:
  Slice() = default;
  explicit Slice(std::map<std::string, Seq> entries) : entries_(std::move(entries)) {}
  Slice(std::initializer_list<std::pair<const std::string, Seq>> entries) : entries_(entries) {}

  /// All channels of `domain` mapped to the empty sequence.
  static Slice silent(const ChannelSet& domain);

  ChannelSet domain() const;
  bool has(std::string_view channel) const;
  const Seq& at(const std::string& channel) const;
  const std::map<std::string, Seq>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t max_length() const;

  auto operator<=>(const Slice&) const = default;

 private:
  std::map<std::string, Seq> entries_;
};

Slice sum(const Slice& lhs, const Slice& rhs);
Slice project(const Slice& slice, const ChannelSet& keep);

/// Finite prefix of a named communication history over a fixed domain.
class History {
 public:
  History() = default;
  explicit History(ChannelSet domain) : domain_(std::move(domain)) {}
  History(ChannelSet domain, std::vector<Slice> ticks);

  /// `length` ticks of silence on every channel of `domain`.
  static History silent(const ChannelSet& domain, std::size_t length);

  const ChannelSet& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return ticks_.size(); }
  bool empty() const noexcept { return ticks_.empty(); }
  const Slice& tick(std::size_t k) const;
  const std::vector<Slice>& ticks() const noexcept { return ticks_; }

  void push_back(Slice slice);

  auto operator<=>(const History&) const = default;

 private:
  ChannelSet domain_;
  std::vector<Slice> ticks_;
};

History sum(const History& lhs, const History& rhs);
History project(const History& history, const ChannelSet& keep);
History prefix(const History& history, std::size_t j);

/// Pointwise prefix of a set of histories; duplicates collapse.
std::set<History> prefix_set(const std::set<History>& histories, std::size_t j);
std::set<History> project_set(const std::set<History>& histories, const ChannelSet& keep);

/// A Baire distance 2^-exponent. `UpperBound` marks histories that agree on
/// the whole compared horizon; their true distance may be anything down to 0.
struct DyadicDistance {
  enum class Kind { Exact, UpperBound };
  Kind kind = Kind::Exact;
  std::size_t exponent = 0;

  double value() const;
  std::string to_string() const;  // "exact 2^-3" / "upper-bound 2^-5"

  auto operator<=>(const DyadicDistance&) const = default;
};

DyadicDistance baire_distance(const History& s, const History& t);

// Canonical text forms.
std::string render(const Seq& seq);        // "<a,b>", "<>"
std::string render(const Slice& slice);    // "i:<a> o:<>"
std::string render(const History& history);  // one "t=<k> ..." line per tick

Seq parse_seq(std::string_view text);
Slice parse_slice(std::string_view text);
/// Reads "t=<k> ..." lines; blank lines and '#' comments are skipped.
History parse_history(std::string_view text);

/// All sequences over `alphabet` of length <= bound, in shortlex order.
std::vector<Seq> enumerate_sequences(const Alphabet& alphabet, std::size_t bound);

}  // namespace tpanet
