#include "tpanet/network.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "tpanet/builtins.hpp"

namespace tpanet {

namespace {

// ------------------------------------------------------------------ lexer

enum class Tok { Ident, Number, Seq, Punct, Compose, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;

  std::string where() const { return std::to_string(line) + ":" + std::to_string(col); }
  std::string shown() const { return kind == Tok::End ? "end of input" : "'" + text + "'"; }
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Punct, "", line, col};
    if (src.compare(i, 3, "(x)") == 0) {
      t.kind = Tok::Compose;
      t.text = "(x)";
      advance(3);
    } else if (src.compare(i, 2, "->") == 0) {
      t.text = "->";
      advance(2);
    } else if (c == '<') {
      const auto close = src.find('>', i);
      if (close == std::string::npos || src.find('\n', i) < close)
        throw Error(ErrorCode::SyntaxError, t.where() + ": unterminated sequence");
      t.kind = Tok::Seq;
      t.text = src.substr(i, close - i + 1);
      advance(close - i + 1);
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < src.size() && word_char(src[j])) ++j;
      t.text = src.substr(i, j - i);
      t.kind = std::all_of(t.text.begin(), t.text.end(),
                           [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })
                   ? Tok::Number
                   : Tok::Ident;
      advance(j - i);
    } else if (std::string_view(";{}(),:.=").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw Error(ErrorCode::SyntaxError,
                  t.where() + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

// ----------------------------------------------------------------- parser

Automaton make_builtin(const Alphabet& d, const BuiltinRef& b) {
  if (b.kind == "fair_merge") return builtins::fair_merge(d);
  if (b.kind == "buffer") return builtins::buffer(d, b.args.empty() ? 8 : b.args[0]);
  if (b.kind == "blocking_a") return builtins::blocking_a(d);
  if (b.kind == "blocking_b") return builtins::blocking_b(d);
  throw Error(ErrorCode::NameError, "unknown builtin '" + b.kind + "'");
}

}  // namespace

ChannelSet renamed_channels(const NetworkDescription& net, const std::string& name);

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  NetworkDescription run() {
    while (peek().kind != Tok::End) statement();
    for (const auto& [name, at] : rename_sites_) {
      try {
        (void)resolve_automaton(net_, name);
      } catch (const Error& e) {
        throw Error(ErrorCode::TypeError, at.where() + ": " + strip(e));
      }
    }
    for (const auto& [decl, at] : net_sites_) {
      try {
        (void)signature_of(net_, decl->expr);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NameError)
          throw Error(ErrorCode::NameError, at.where() + ": " + strip(e));
        throw Error(ErrorCode::TypeError, at.where() + ": net " + decl->name + ": " + strip(e));
      }
    }
    return std::move(net_);
  }

 private:
  static std::string strip(const Error& e) {
    std::string w = e.what();
    const auto colon = w.find(": ");
    return colon == std::string::npos ? w : w.substr(colon + 2);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    throw Error(ErrorCode::SyntaxError, t.where() + ": expected " + what + ", found " + t.shown());
  }

  bool accept(const std::string& text) {
    if ((peek().kind == Tok::Punct || peek().kind == Tok::Ident) && peek().text == text) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(const std::string& text) {
    if (!accept(text)) fail(peek(), "'" + text + "'");
    return toks_[pos_ - 1];
  }
  const Token& ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(peek(), what);
    return next();
  }
  std::size_t number(const std::string& what) {
    if (peek().kind != Tok::Number) fail(peek(), what);
    return static_cast<std::size_t>(std::stoull(next().text));
  }

  void statement() {
    const Token& kw = peek();
    if (kw.kind != Tok::Ident) fail(kw, "a declaration");
    if (kw.text == "alphabet") return alphabet();
    if (kw.text == "automaton") return automaton();
    if (kw.text == "builtin") return builtin();
    if (kw.text == "rename") return rename_decl();
    if (kw.text == "net") return net();
    if (kw.text == "input") return input();
    if (kw.text == "config") return config();
    fail(kw, "a declaration");
  }

  void alphabet() {
    const Token& kw = next();
    if (alphabet_seen_) throw Error(ErrorCode::SyntaxError, kw.where() + ": alphabet declared twice");
    std::vector<std::string> symbols;
    while (peek().kind == Tok::Ident || peek().kind == Tok::Number) {
      symbols.push_back(next().text);
      accept(",");
    }
    expect(";");
    if (symbols.empty()) fail(peek(), "at least one message symbol");
    net_.alphabet = Alphabet(std::move(symbols));
    alphabet_seen_ = true;
  }

  void need_alphabet(const Token& at) const {
    if (!alphabet_seen_)
      throw Error(ErrorCode::NameError, at.where() + ": alphabet must be declared first");
  }

  void fresh_name(const Token& at) const {
    if (net_.find_automaton(at.text) || net_.find_net(at.text))
      throw Error(ErrorCode::NameError, at.where() + ": '" + at.text + "' is already defined");
  }

  ChannelSet channel_list() {
    if (peek().kind == Tok::Compose) {  // "(x)" lexes as the composition operator
      next();
      return ChannelSet{"x"};
    }
    expect("(");
    std::vector<std::string> names;
    while (peek().kind == Tok::Ident) {
      names.push_back(next().text);
      accept(",");
    }
    const Token& close = expect(")");
    try {
      return ChannelSet::checked(std::move(names));
    } catch (const Error& e) {
      throw Error(ErrorCode::SyntaxError, close.where() + ": " + strip(e));
    }
  }

  // name:<seq> pairs until ';' or a keyword.
  std::map<std::string, Seq> bindings(const ChannelSet& allowed, const std::string& role) {
    std::map<std::string, Seq> out;
    while (peek().kind == Tok::Ident && toks_[pos_ + 1].text == ":") {
      const Token& ch = next();
      next();
      if (peek().kind != Tok::Seq) fail(peek(), "a sequence like <a,b>");
      const Token& seq = next();
      if (!allowed.contains(ch.text))
        throw Error(ErrorCode::NameError,
                    ch.where() + ": '" + ch.text + "' is not " + role + " channel");
      if (out.count(ch.text))
        throw Error(ErrorCode::SyntaxError, ch.where() + ": '" + ch.text + "' bound twice");
      try {
        Seq s = parse_seq(seq.text);
        for (const auto& m : s)
          if (!net_.alphabet.contains(m))
            throw Error(ErrorCode::AlphabetViolation, "'" + m + "' is not in the alphabet");
        out.emplace(ch.text, std::move(s));
      } catch (const Error& e) {
        throw Error(ErrorCode::SyntaxError, seq.where() + ": " + strip(e));
      }
    }
    return out;
  }

  void automaton() {
    next();
    const Token& name = ident("an automaton name");
    need_alphabet(name);
    fresh_name(name);
    TableSpec spec;
    spec.name = name.text;
    spec.signature.alphabet = net_.alphabet;
    bool have_sig = false;
    std::optional<Token> start_at;
    expect("{");
    while (!accept("}")) {
      const Token& kw = ident("sig, state, trans, bound or '}'");
      if (kw.text == "sig") {
        expect("in");
        spec.signature.inputs = channel_list();
        expect("out");
        spec.signature.outputs = channel_list();
        if (accept("hid")) spec.signature.hidden = channel_list();
        try {
          check_signature(spec.signature);
        } catch (const Error& e) {
          throw Error(ErrorCode::TypeError, kw.where() + ": " + strip(e));
        }
        have_sig = true;
      } else if (kw.text == "state") {
        const Token& s = ident("a state name");
        if (std::find(spec.states.begin(), spec.states.end(), s.text) != spec.states.end())
          throw Error(ErrorCode::NameError, s.where() + ": state '" + s.text + "' declared twice");
        spec.states.push_back(s.text);
        if (accept("start")) {
          if (start_at)
            throw Error(ErrorCode::SyntaxError, s.where() + ": second start state");
          spec.start = s.text;
          start_at = s;
        }
      } else if (kw.text == "trans") {
        if (!have_sig)
          throw Error(ErrorCode::SyntaxError, kw.where() + ": 'sig' must precede transitions");
        const Token& src = ident("a source state");
        expect("->");
        const Token& dst = ident("a target state");
        for (const Token* s : {&src, &dst})
          if (std::find(spec.states.begin(), spec.states.end(), s->text) == spec.states.end())
            throw Error(ErrorCode::NameError, s->where() + ": unknown state '" + s->text + "'");
        std::map<std::string, Seq> action;
        if (accept("on")) action.merge(bindings(spec.signature.inputs, "an input"));
        if (accept("out")) action.merge(bindings(spec.signature.outputs, "an output"));
        if (accept("hid")) action.merge(bindings(spec.signature.hidden, "a hidden"));
        for (const auto& c : spec.signature.all()) action.try_emplace(c);
        spec.transitions.push_back({src.text, Slice(std::move(action)), dst.text});
      } else if (kw.text == "bound") {
        spec.input_bound = number("an input bound");
      } else {
        fail(kw, "sig, state, trans or bound");
      }
      expect(";");
    }
    if (!have_sig) throw Error(ErrorCode::SyntaxError, name.where() + ": missing 'sig'");
    if (!start_at) throw Error(ErrorCode::SyntaxError, name.where() + ": missing start state");
    try {
      (void)Automaton::from_table(spec);
    } catch (const Error& e) {
      throw Error(ErrorCode::TypeError, name.where() + ": " + strip(e));
    }
    net_.automata.push_back({name.text, std::move(spec), std::nullopt});
  }

  void builtin() {
    next();
    const Token& name = ident("a builtin instance name");
    need_alphabet(name);
    fresh_name(name);
    expect("=");
    const Token& kind = ident("a builtin kind");
    BuiltinRef ref{kind.text, {}};
    if (accept("(")) {
      while (peek().kind == Tok::Number) {
        ref.args.push_back(number("a number"));
        accept(",");
      }
      expect(")");
    }
    expect(";");
    try {
      (void)make_builtin(net_.alphabet, ref);
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::NameError ? ErrorCode::NameError : ErrorCode::TypeError,
                  kind.where() + ": " + strip(e));
    }
    net_.automata.push_back({name.text, std::nullopt, std::move(ref)});
  }

  void rename_decl() {
    next();
    const Token& target = ident("an automaton name");
    expect(".");
    const Token& from = ident("a channel name");
    expect("->");
    const Token& to = ident("a channel name");
    expect(";");
    if (!net_.find_automaton(target.text))
      throw Error(ErrorCode::NameError, target.where() + ": unknown automaton '" + target.text + "'");
    if (!renamed_channels(net_, target.text).contains(from.text))
      throw Error(ErrorCode::NameError,
                  from.where() + ": '" + target.text + "' has no channel '" + from.text + "'");
    net_.renames.push_back({target.text, from.text, to.text});
    rename_sites_[target.text] = to;
  }

  Expr term() {
    if (accept("hide")) {
      Expr e;
      e.kind = Expr::Kind::Hide;
      expect("{");
      std::vector<std::string> names;
      while (peek().kind == Tok::Ident) {
        names.push_back(next().text);
        accept(",");
      }
      expect("}");
      e.hidden = ChannelSet(std::move(names));
      e.children.push_back(term());
      return e;
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    const Token& name = ident("an automaton or net name");
    if (!net_.find_automaton(name.text) && !net_.find_net(name.text))
      throw Error(ErrorCode::NameError, name.where() + ": undefined name '" + name.text + "'");
    Expr e;
    e.name = name.text;
    return e;
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Compose) {
      next();
      Expr node;
      node.kind = Expr::Kind::Compose;
      node.children.push_back(std::move(lhs));
      node.children.push_back(term());
      lhs = std::move(node);
    }
    return lhs;
  }

  void net() {
    next();
    const Token& name = ident("a net name");
    fresh_name(name);
    expect("=");
    Expr e = expr();
    expect(";");
    net_.nets.push_back({name.text, std::move(e)});
    net_sites_.emplace_back(nullptr, name);
    // Pointers are taken after parsing, once the vector stops growing.
    for (std::size_t k = 0; k < net_sites_.size(); ++k) net_sites_[k].first = &net_.nets[k];
  }

  void input() {
    const Token& kw = next();
    if (net_.input) throw Error(ErrorCode::SyntaxError, kw.where() + ": second input script");
    need_alphabet(kw);
    expect("{");
    std::vector<Slice> ticks;
    static const std::regex tick_label("t([0-9]+)");
    while (!accept("}")) {
      const Token& label = ident("a tick label like t0");
      std::smatch m;
      if (!std::regex_match(label.text, m, tick_label) ||
          std::stoull(m[1].str()) != ticks.size())
        throw Error(ErrorCode::SyntaxError,
                    label.where() + ": expected tick label t" + std::to_string(ticks.size()));
      std::vector<std::string> names;
      for (std::size_t k = pos_; toks_[k].kind == Tok::Ident && toks_[k + 1].text == ":"; k += 3)
        names.push_back(toks_[k].text);
      ChannelSet domain(names);
      Slice s(bindings(domain, "a"));
      expect(";");
      if (!ticks.empty() && s.domain() != ticks.front().domain())
        throw Error(ErrorCode::TypeError, label.where() + ": tick binds " +
                                              s.domain().to_string() + ", earlier ticks bind " +
                                              ticks.front().domain().to_string());
      ticks.push_back(std::move(s));
    }
    History h(ticks.empty() ? ChannelSet{} : ticks.front().domain());
    for (auto& s : ticks) h.push_back(std::move(s));
    net_.input = std::move(h);
  }

  void config() {
    next();
    while (!accept(";")) {
      const Token& key = ident("horizon, bound, seed or budget");
      const std::size_t v = number("a number");
      if (key.text == "horizon") net_.config.horizon = v;
      else if (key.text == "bound") net_.config.bound = v;
      else if (key.text == "seed") net_.config.seed = v;
      else if (key.text == "budget") net_.config.budget = v;
      else fail(key, "horizon, bound, seed or budget");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool alphabet_seen_ = false;
  NetworkDescription net_;
  std::vector<std::pair<const NetDecl*, Token>> net_sites_;
  std::map<std::string, Token> rename_sites_;  // last renaming per automaton
};

std::string render_channels(const ChannelSet& c) {
  std::string out;
  for (const auto& n : c) out += (out.empty() ? "" : " ") + n;
  return out;
}

std::string render_bindings(const Slice& s, const ChannelSet& channels) {
  std::string out;
  for (const auto& c : channels) out += " " + c + ":" + render(s.at(c));
  return out;
}

}  // namespace

const AutomatonDecl* NetworkDescription::find_automaton(const std::string& name) const {
  for (const auto& a : automata)
    if (a.name == name) return &a;
  return nullptr;
}

const NetDecl* NetworkDescription::find_net(const std::string& name) const {
  for (const auto& n : nets)
    if (n.name == name) return &n;
  return nullptr;
}

NetworkDescription parse_network(const std::string& text) { return Parser(text).run(); }

std::string render(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ref: return e.name;
    case Expr::Kind::Hide: {
      std::string names;
      for (const auto& c : e.hidden) names += (names.empty() ? "" : " ") + c;
      return "hide {" + names + "} " + render(e.children[0]);
    }
    case Expr::Kind::Compose:
      return "(" + render(e.children[0]) + " (x) " + render(e.children[1]) + ")";
  }
  return "";
}

std::string render(const NetworkDescription& net) {
  std::ostringstream out;
  out << "alphabet";
  for (const auto& m : net.alphabet.symbols()) out << " " << m;
  out << ";\n";
  for (const auto& a : net.automata) {
    if (a.builtin) {
      out << "builtin " << a.name << " = " << a.builtin->kind;
      if (!a.builtin->args.empty()) {
        out << "(";
        for (std::size_t k = 0; k < a.builtin->args.size(); ++k)
          out << (k ? ", " : "") << a.builtin->args[k];
        out << ")";
      }
      out << ";\n";
      continue;
    }
    const TableSpec& t = *a.table;
    const auto& sig = t.signature;
    out << "automaton " << a.name << " {\n";
    out << "  sig in(" << render_channels(sig.inputs) << ") out(" << render_channels(sig.outputs)
        << ") hid(" << render_channels(sig.hidden) << ");\n";
    for (const auto& s : t.states) out << "  state " << s << (s == t.start ? " start" : "") << ";\n";
    for (const auto& tr : t.transitions) {
      out << "  trans " << tr.source << " -> " << tr.target;
      if (!sig.inputs.empty()) out << " on" << render_bindings(tr.action, sig.inputs);
      if (!sig.outputs.empty()) out << " out" << render_bindings(tr.action, sig.outputs);
      if (!sig.hidden.empty()) out << " hid" << render_bindings(tr.action, sig.hidden);
      out << ";\n";
    }
    out << "  bound " << t.input_bound << ";\n}\n";
  }
  for (const auto& r : net.renames) out << "rename " << r.automaton << "." << r.from << " -> " << r.to << ";\n";
  for (const auto& n : net.nets) out << "net " << n.name << " = " << render(n.expr) << ";\n";
  if (net.input) {
    out << "input {\n";
    for (std::size_t k = 0; k < net.input->size(); ++k)
      out << "  t" << k << render_bindings(net.input->tick(k), net.input->domain()) << ";\n";
    out << "}\n";
  }
  const auto& c = net.config;
  if (c.horizon || c.bound || c.seed || c.budget) {
    out << "config";
    if (c.horizon) out << " horizon " << *c.horizon;
    if (c.bound) out << " bound " << *c.bound;
    if (c.seed) out << " seed " << *c.seed;
    if (c.budget) out << " budget " << *c.budget;
    out << ";\n";
  }
  return out.str();
}

namespace {

// Renamings of one automaton apply together; a later one may rename the
// result of an earlier one.
Automaton base_automaton(const NetworkDescription& net, const std::string& name);

// Renamings of one automaton apply together and refer to its declared
// channels; a name that is only the target of an earlier renaming is
// renamed further.
std::map<std::string, std::string> rename_mapping(const NetworkDescription& net,
                                                  const std::string& name) {
  std::map<std::string, std::string> mapping;
  std::optional<ChannelSet> declared;
  for (const auto& r : net.renames) {
    if (r.automaton != name) continue;
    if (!declared) declared = base_automaton(net, name).signature().all();
    if (!declared->contains(r.from)) {
      for (auto& [from, to] : mapping)
        if (to == r.from) to = r.to;
    } else {
      mapping[r.from] = r.to;
    }
  }
  return mapping;
}

Automaton base_automaton(const NetworkDescription& net, const std::string& name) {
  const AutomatonDecl* decl = net.find_automaton(name);
  if (!decl) throw Error(ErrorCode::NameError, "undefined automaton '" + name + "'");
  return decl->table ? Automaton::from_table(*decl->table)
                     : make_builtin(net.alphabet, *decl->builtin).with_name(name);
}

}  // namespace

ChannelSet renamed_channels(const NetworkDescription& net, const std::string& name) {
  const auto mapping = rename_mapping(net, name);
  std::vector<std::string> out;
  for (const auto& c : base_automaton(net, name).signature().all()) {
    auto it = mapping.find(c);
    out.push_back(it == mapping.end() ? c : it->second);
  }
  return ChannelSet(std::move(out));
}

Automaton resolve_automaton(const NetworkDescription& net, const std::string& name) {
  const auto mapping = rename_mapping(net, name);
  Automaton a = base_automaton(net, name);
  return mapping.empty() ? a : rename(a, mapping);
}

PortSignature signature_of(const NetworkDescription& net, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ref:
      if (const NetDecl* n = net.find_net(e.name)) return signature_of(net, n->expr);
      return resolve_automaton(net, e.name).signature();
    case Expr::Kind::Hide: {
      PortSignature s = signature_of(net, e.children[0]);
      for (const auto& c : e.hidden)
        if (!s.outputs.contains(c))
          throw Error(ErrorCode::NotAnOutput, "hide: '" + c + "' is not an output of " +
                                                  render(e.children[0]));
      s.outputs = s.outputs.minus(e.hidden);
      s.hidden = s.hidden.unite(e.hidden);
      return s;
    }
    case Expr::Kind::Compose: {
      const auto a = signature_of(net, e.children[0]);
      const auto b = signature_of(net, e.children[1]);
      if (auto why = incompatibility(a, b))
        throw Error(ErrorCode::IncompatibleSignatures, render(e) + ": " + *why);
      return compose_signatures(a, b);
    }
  }
  return {};
}

Automaton elaborate(const NetworkDescription& net, const Expr& e, const ComposeOptions& opts) {
  switch (e.kind) {
    case Expr::Kind::Ref:
      if (const NetDecl* n = net.find_net(e.name)) return elaborate(net, n->expr, opts);
      return resolve_automaton(net, e.name);
    case Expr::Kind::Hide: return hide(elaborate(net, e.children[0], opts), e.hidden);
    case Expr::Kind::Compose:
      return compose(elaborate(net, e.children[0], opts), elaborate(net, e.children[1], opts),
                     opts);
  }
  throw Error(ErrorCode::Configuration, "bad expression");
}

}  // namespace tpanet
