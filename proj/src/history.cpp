#include "tpanet/history.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace tpanet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OverlappingDomains: return "OverlappingDomains";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::AlphabetViolation: return "AlphabetViolation";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::NotReactive: return "NotReactive";
    case ErrorCode::ExplosionGuard: return "ExplosionGuard";
    case ErrorCode::Configuration: return "Configuration";
    case ErrorCode::IncompatibleSignatures: return "IncompatibleSignatures";
    case ErrorCode::EmptyComposition: return "EmptyComposition";
    case ErrorCode::NotAnOutput: return "NotAnOutput";
    case ErrorCode::CausalityViolation: return "CausalityViolation";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PrecondViolated: return "PrecondViolated";
    case ErrorCode::FixpointInconsistent: return "FixpointInconsistent";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NameError: return "NameError";
    case ErrorCode::TypeError: return "TypeError";
  }
  return "Error";
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'' ||
         c == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::initializer_list<std::string> symbols)
    : Alphabet(std::vector<std::string>(symbols)) {}

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(sorted_unique(std::move(symbols))) {
  for (const auto& s : symbols_) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), is_symbol_char))
      throw Error(ErrorCode::AlphabetViolation, "invalid message symbol '" + s + "'");
  }
}

bool Alphabet::contains(std::string_view m) const {
  return std::binary_search(symbols_.begin(), symbols_.end(), m);
}

const std::string& Alphabet::first() const {
  if (symbols_.empty()) throw Error(ErrorCode::AlphabetViolation, "empty alphabet");
  return symbols_.front();
}

// -------------------------------------------------------------- ChannelSet

ChannelSet::ChannelSet(std::initializer_list<std::string> names)
    : ChannelSet(std::vector<std::string>(names)) {}

ChannelSet::ChannelSet(std::vector<std::string> names) : names_(sorted_unique(std::move(names))) {}

ChannelSet ChannelSet::checked(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  auto dup = std::adjacent_find(names.begin(), names.end());
  if (dup != names.end()) throw Error(ErrorCode::OverlapError, "duplicate channel '" + *dup + "'");
  return ChannelSet(std::move(names));
}

bool ChannelSet::contains(std::string_view name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

ChannelSet ChannelSet::unite(const ChannelSet& other) const {
  std::vector<std::string> out;
  std::set_union(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                 std::back_inserter(out));
  return ChannelSet(std::move(out));
}

ChannelSet ChannelSet::intersect(const ChannelSet& other) const {
  std::vector<std::string> out;
  std::set_intersection(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                        std::back_inserter(out));
  return ChannelSet(std::move(out));
}

ChannelSet ChannelSet::minus(const ChannelSet& other) const {
  std::vector<std::string> out;
  std::set_difference(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                      std::back_inserter(out));
  return ChannelSet(std::move(out));
}

bool ChannelSet::disjoint(const ChannelSet& other) const { return intersect(other).empty(); }

bool ChannelSet::subset_of(const ChannelSet& other) const {
  return std::includes(other.names_.begin(), other.names_.end(), names_.begin(), names_.end());
}

std::string ChannelSet::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < names_.size(); ++k) {
    if (k) out += ',';
    out += names_[k];
  }
  return out + "}";
}

// ------------------------------------------------------------------- Slice

Slice Slice::silent(const ChannelSet& domain) {
  std::map<std::string, Seq> entries;
  for (const auto& c : domain) entries.emplace(c, Seq{});
  return Slice(std::move(entries));
}

ChannelSet Slice::domain() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& [c, _] : entries_) names.push_back(c);
  return ChannelSet(std::move(names));
}

bool Slice::has(std::string_view channel) const {
  return entries_.find(std::string(channel)) != entries_.end();
}

const Seq& Slice::at(const std::string& channel) const {
  auto it = entries_.find(channel);
  if (it == entries_.end())
    throw Error(ErrorCode::DomainMismatch, "channel '" + channel + "' not in slice domain");
  return it->second;
}

std::size_t Slice::max_length() const {
  std::size_t m = 0;
  for (const auto& [_, seq] : entries_) m = std::max(m, seq.size());
  return m;
}

Slice sum(const Slice& lhs, const Slice& rhs) {
  std::map<std::string, Seq> out = lhs.entries();
  for (const auto& [c, seq] : rhs.entries()) {
    if (!out.emplace(c, seq).second)
      throw Error(ErrorCode::OverlappingDomains, "channel '" + c + "' is in both summands");
  }
  return Slice(std::move(out));
}

Slice project(const Slice& slice, const ChannelSet& keep) {
  std::map<std::string, Seq> out;
  for (const auto& [c, seq] : slice.entries())
    if (keep.contains(c)) out.emplace(c, seq);
  return Slice(std::move(out));
}

// ----------------------------------------------------------------- History

History::History(ChannelSet domain, std::vector<Slice> ticks) : domain_(std::move(domain)) {
  ticks_.reserve(ticks.size());
  for (auto& s : ticks) push_back(std::move(s));
}

History History::silent(const ChannelSet& domain, std::size_t length) {
  return History(domain, std::vector<Slice>(length, Slice::silent(domain)));
}

const Slice& History::tick(std::size_t k) const {
  if (k >= ticks_.size())
    throw Error(ErrorCode::HorizonExceeded,
                "tick " + std::to_string(k) + " beyond length " + std::to_string(ticks_.size()));
  return ticks_[k];
}

void History::push_back(Slice slice) {
  if (slice.domain() != domain_)
    throw Error(ErrorCode::DomainMismatch, "slice over " + slice.domain().to_string() +
                                               " appended to history over " + domain_.to_string());
  ticks_.push_back(std::move(slice));
}

History sum(const History& lhs, const History& rhs) {
  if (!lhs.domain().disjoint(rhs.domain()))
    throw Error(ErrorCode::OverlappingDomains,
                lhs.domain().to_string() + " and " + rhs.domain().to_string() + " overlap");
  if (lhs.size() != rhs.size())
    throw Error(ErrorCode::LengthMismatch, "cannot sum histories of length " +
                                               std::to_string(lhs.size()) + " and " +
                                               std::to_string(rhs.size()));
  History out(lhs.domain().unite(rhs.domain()));
  for (std::size_t k = 0; k < lhs.size(); ++k) out.push_back(sum(lhs.tick(k), rhs.tick(k)));
  return out;
}

History project(const History& history, const ChannelSet& keep) {
  History out(history.domain().intersect(keep));
  for (const auto& s : history.ticks()) out.push_back(project(s, keep));
  return out;
}

History prefix(const History& history, std::size_t j) {
  if (j > history.size())
    throw Error(ErrorCode::HorizonExceeded, "prefix " + std::to_string(j) +
                                                " of history of length " +
                                                std::to_string(history.size()));
  return History(history.domain(),
                 std::vector<Slice>(history.ticks().begin(), history.ticks().begin() + j));
}

std::set<History> prefix_set(const std::set<History>& histories, std::size_t j) {
  std::set<History> out;
  for (const auto& h : histories) out.insert(prefix(h, j));
  return out;
}

std::set<History> project_set(const std::set<History>& histories, const ChannelSet& keep) {
  std::set<History> out;
  for (const auto& h : histories) out.insert(project(h, keep));
  return out;
}

// ---------------------------------------------------------------- distance

double DyadicDistance::value() const { return std::ldexp(1.0, -static_cast<int>(exponent)); }

std::string DyadicDistance::to_string() const {
  return std::string(kind == Kind::Exact ? "exact" : "upper-bound") + " 2^-" +
         std::to_string(exponent);
}

DyadicDistance baire_distance(const History& s, const History& t) {
  if (s.domain() != t.domain())
    throw Error(ErrorCode::DomainMismatch,
                s.domain().to_string() + " vs " + t.domain().to_string());
  if (s.size() != t.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(s.size()) + " vs " + std::to_string(t.size()) + " ticks");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.tick(k) != t.tick(k)) return {DyadicDistance::Kind::Exact, k};
  }
  return {DyadicDistance::Kind::UpperBound, s.size()};
}

// --------------------------------------------------------------- rendering

std::string render(const Seq& seq) {
  std::string out = "<";
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k) out += ',';
    out += seq[k];
  }
  return out + ">";
}

std::string render(const Slice& slice) {
  std::string out;
  for (const auto& [c, seq] : slice.entries()) {
    if (!out.empty()) out += ' ';
    out += c + ":" + render(seq);
  }
  return out;
}

std::string render(const History& history) {
  std::string out;
  for (std::size_t k = 0; k < history.size(); ++k) {
    out += "t=" + std::to_string(k);
    std::string body = render(history.tick(k));
    if (!body.empty()) out += " " + body;
    out += "\n";
  }
  return out;
}

Seq parse_seq(std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '<' || text.back() != '>')
    throw Error(ErrorCode::SyntaxError, "expected <...> but got '" + std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  Seq out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start));
    if (item.empty() || !std::all_of(item.begin(), item.end(), is_symbol_char))
      throw Error(ErrorCode::SyntaxError, "bad message '" + std::string(item) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Slice parse_slice(std::string_view text) {
  std::map<std::string, Seq> entries;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0)
      throw Error(ErrorCode::SyntaxError, "expected name:<...> but got '" + tok + "'");
    std::string name = tok.substr(0, colon);
    if (!entries.emplace(name, parse_seq(std::string_view(tok).substr(colon + 1))).second)
      throw Error(ErrorCode::OverlappingDomains, "channel '" + name + "' repeated");
  }
  return Slice(std::move(entries));
}

History parse_history(std::string_view text) {
  std::vector<Slice> ticks;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.substr(0, 2) != "t=")
      throw Error(ErrorCode::SyntaxError, "expected 't=<k>' line but got '" + line + "'");
    auto space = body.find(' ');
    std::string index(body.substr(2, space == std::string_view::npos ? std::string_view::npos
                                                                     : space - 2));
    if (index != std::to_string(ticks.size()))
      throw Error(ErrorCode::SyntaxError, "tick index " + index + " out of sequence");
    ticks.push_back(space == std::string_view::npos ? Slice{} : parse_slice(body.substr(space)));
  }
  if (ticks.empty()) return History{};
  auto domain = ticks.front().domain();
  return History(domain, std::move(ticks));
}

std::vector<Seq> enumerate_sequences(const Alphabet& alphabet, std::size_t bound) {
  std::vector<Seq> out{Seq{}};
  std::size_t layer_begin = 0;
  for (std::size_t len = 1; len <= bound; ++len) {
    std::size_t layer_end = out.size();
    for (std::size_t k = layer_begin; k < layer_end; ++k) {
      for (const auto& m : alphabet.symbols()) {
        Seq next = out[k];
        next.push_back(m);
        out.push_back(std::move(next));
      }
    }
    layer_begin = layer_end;
  }
  return out;
}

}  // namespace tpanet
