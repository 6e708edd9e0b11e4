#include "ntasc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace ntasc {

namespace {

enum class Tok { Ident, Nat, Arrow, Assign, Rel, AndAnd, Minus, Comma, Semi, LBrace, RBrace, End };

struct Token {
  Tok kind;
  std::string text;
  long long num = 0;
  Rel rel = Rel::Le;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= s_.size()) {
      cur_.kind = Tok::End;
      cur_.text = "<end of input>";
      return;
    }
    char c = s_[pos_];
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) bump();
      cur_.kind = Tok::Ident;
      cur_.text = s_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) bump();
      cur_.kind = Tok::Nat;
      cur_.text = s_.substr(start, pos_ - start);
      if (cur_.text.size() > 15)
        throw SyntaxError(cur_.line, cur_.col, "number too large: " + cur_.text);
      cur_.num = std::stoll(cur_.text);
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < s_.size() && s_[pos_ + 1] == b;
    };
    if (two('-', '>')) return set2(Tok::Arrow, "->");
    if (two(':', '=')) return set2(Tok::Assign, ":=");
    if (two('&', '&')) return set2(Tok::AndAnd, "&&");
    if (two('<', '=')) return setrel2(Rel::Le, "<=");
    if (two('>', '=')) return setrel2(Rel::Ge, ">=");
    if (two('=', '=')) return setrel2(Rel::Eq, "==");
    switch (c) {
      case '<': bump(); cur_.kind = Tok::Rel; cur_.rel = Rel::Lt; cur_.text = "<"; return;
      case '>': bump(); cur_.kind = Tok::Rel; cur_.rel = Rel::Gt; cur_.text = ">"; return;
      case '-': bump(); cur_.kind = Tok::Minus; cur_.text = "-"; return;
      case ',': bump(); cur_.kind = Tok::Comma; cur_.text = ","; return;
      case ';': bump(); cur_.kind = Tok::Semi; cur_.text = ";"; return;
      case '{': bump(); cur_.kind = Tok::LBrace; cur_.text = "{"; return;
      case '}': bump(); cur_.kind = Tok::RBrace; cur_.text = "}"; return;
    }
    throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
  }

  void set2(Tok k, const char* t) {
    bump();
    bump();
    cur_.kind = k;
    cur_.text = t;
  }

  void setrel2(Rel r, const char* t) {
    bump();
    bump();
    cur_.kind = Tok::Rel;
    cur_.rel = r;
    cur_.text = t;
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

// Unresolved forms kept until the whole file is read, so that clocks of the
// second automaton can be referenced from the first.
struct RawAtom {
  std::string c1;
  bool diag = false;
  std::string c2;
  Rel rel;
  long long k;
  int line, col;
};

struct RawEdge {
  std::string src, tgt;
  std::vector<RawAtom> guard;
  ActKind kind = ActKind::Eps;
  std::string label;
  std::vector<std::string> resets;
  std::vector<std::pair<std::string, std::string>> copies;
  int line, col;
};

struct RawLoc {
  std::string name;
  std::vector<RawAtom> inv;
  int line, col;
};

struct RawAutomaton {
  std::string name;
  std::vector<std::string> clocks;
  std::string init;
  int init_line = 1, init_col = 1;
  std::vector<RawLoc> locs;
  std::vector<RawEdge> edges;
  int line, col;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Network run() {
    Network net;
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "pragma") {
      lex_.take();
      Token key = expect(Tok::Ident, "pragma key");
      if (key.text != "synthesized")
        throw SemanticError(key.line, key.col, "unknown pragma '" + key.text + "'");
      expect(Tok::Semi, "';'");
      net.synthesized = true;
    }
    std::vector<RawAutomaton> autos;
    while (lex_.peek().kind != Tok::End) autos.push_back(parse_automaton());
    if (autos.size() != 2) {
      throw SemanticError(1, 1, "expected exactly 2 automata, got " +
                                    std::to_string(autos.size()));
    }
    resolve(net, autos);
    return net;
  }

 private:
  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k)
      throw SyntaxError(lex_.peek().line, lex_.peek().col,
                        "expected " + what + ", found '" + lex_.peek().text + "'");
    return lex_.take();
  }

  Token keyword(const std::string& kw) {
    Token t = expect(Tok::Ident, "'" + kw + "'");
    if (t.text != kw)
      throw SyntaxError(t.line, t.col, "expected '" + kw + "', found '" + t.text + "'");
    return t;
  }

  bool at_keyword(const std::string& kw) {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == kw;
  }

  RawAutomaton parse_automaton() {
    Token kw = keyword("automaton");
    RawAutomaton a;
    a.line = kw.line;
    a.col = kw.col;
    a.name = expect(Tok::Ident, "automaton name").text;
    expect(Tok::LBrace, "'{'");
    if (at_keyword("clocks")) {
      lex_.take();
      a.clocks.push_back(expect(Tok::Ident, "clock name").text);
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        a.clocks.push_back(expect(Tok::Ident, "clock name").text);
      }
      expect(Tok::Semi, "';'");
    }
    keyword("init");
    Token init = expect(Tok::Ident, "initial location name");
    a.init = init.text;
    a.init_line = init.line;
    a.init_col = init.col;
    expect(Tok::Semi, "';'");
    while (!at_end_of_block()) {
      if (at_keyword("loc")) {
        a.locs.push_back(parse_loc());
      } else if (at_keyword("edge")) {
        a.edges.push_back(parse_edge());
      } else {
        throw SyntaxError(lex_.peek().line, lex_.peek().col,
                          "expected 'loc', 'edge' or '}', found '" + lex_.peek().text + "'");
      }
    }
    expect(Tok::RBrace, "'}'");
    return a;
  }

  bool at_end_of_block() { return lex_.peek().kind == Tok::RBrace; }

  RawLoc parse_loc() {
    Token kw = keyword("loc");
    RawLoc l;
    l.line = kw.line;
    l.col = kw.col;
    l.name = expect(Tok::Ident, "location name").text;
    if (at_keyword("inv")) {
      lex_.take();
      l.inv = parse_constraint();
    }
    expect(Tok::Semi, "';'");
    return l;
  }

  RawEdge parse_edge() {
    Token kw = keyword("edge");
    RawEdge e;
    e.line = kw.line;
    e.col = kw.col;
    e.src = expect(Tok::Ident, "source location").text;
    expect(Tok::Arrow, "'->'");
    e.tgt = expect(Tok::Ident, "target location").text;
    if (at_keyword("when")) {
      lex_.take();
      e.guard = parse_constraint();
    }
    if (at_keyword("do")) {
      lex_.take();
      e.kind = ActKind::Local;
      e.label = action_name();
    } else if (at_keyword("sync")) {
      lex_.take();
      e.kind = ActKind::Sync;
      e.label = action_name();
    } else if (at_keyword("eps")) {
      lex_.take();
      e.kind = ActKind::Eps;
    } else {
      throw SyntaxError(lex_.peek().line, lex_.peek().col,
                        "expected 'do', 'sync' or 'eps', found '" + lex_.peek().text + "'");
    }
    if (at_keyword("reset")) {
      lex_.take();
      e.resets.push_back(expect(Tok::Ident, "clock name").text);
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        e.resets.push_back(expect(Tok::Ident, "clock name").text);
      }
    }
    if (at_keyword("copy")) {
      lex_.take();
      while (true) {
        std::string dst = expect(Tok::Ident, "clock name").text;
        expect(Tok::Assign, "':='");
        std::string src = expect(Tok::Ident, "clock name").text;
        e.copies.emplace_back(dst, src);
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.take();
      }
    }
    expect(Tok::Semi, "';'");
    return e;
  }

  std::string action_name() {
    Token t = expect(Tok::Ident, "action name");
    if (t.text == "eps")
      throw SemanticError(t.line, t.col, "'eps' is reserved for the silent action");
    return t.text;
  }

  std::vector<RawAtom> parse_constraint() {
    std::vector<RawAtom> atoms;
    atoms.push_back(parse_atom());
    while (lex_.peek().kind == Tok::AndAnd) {
      lex_.take();
      atoms.push_back(parse_atom());
    }
    return atoms;
  }

  RawAtom parse_atom() {
    Token c1 = expect(Tok::Ident, "clock name");
    RawAtom a;
    a.line = c1.line;
    a.col = c1.col;
    a.c1 = c1.text;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      a.diag = true;
      a.c2 = expect(Tok::Ident, "clock name").text;
    }
    Token rel = expect(Tok::Rel, "relation");
    a.rel = rel.rel;
    bool neg = false;
    if (a.diag && lex_.peek().kind == Tok::Minus) {
      lex_.take();
      neg = true;
    }
    Token k = expect(Tok::Nat, "integer constant");
    a.k = neg ? -k.num : k.num;
    return a;
  }

  void resolve(Network& net, std::vector<RawAutomaton>& autos) {
    std::map<std::string, int> clock_idx;
    std::map<std::string, int> clock_owner;
    for (int ci = 0; ci < 2; ++ci) {
      for (const auto& name : autos[ci].clocks) {
        if (clock_idx.count(name))
          throw SemanticError(autos[ci].line, autos[ci].col,
                              "clock " + name + " declared more than once");
        clock_idx[name] = (int)net.clocks.size();
        clock_owner[name] = ci;
        net.clocks.push_back({name});
      }
    }
    for (int ci = 0; ci < 2; ++ci) {
      const RawAutomaton& ra = autos[ci];
      TimedAutomaton& ta = net.comp(ci);
      ta.name = ra.name;
      for (const auto& name : ra.clocks) ta.owned_clocks.push_back(clock_idx[name]);
      std::map<std::string, int> loc_idx;
      for (const auto& rl : ra.locs) {
        if (loc_idx.count(rl.name))
          throw SemanticError(rl.line, rl.col,
                              ra.name + ": duplicate location " + rl.name);
        loc_idx[rl.name] = (int)ta.locations.size();
        Location l;
        l.name = rl.name;
        for (const auto& at : rl.inv) {
          if (at.diag)
            throw SemanticError(at.line, at.col, "difference constraint in an invariant");
          if (at.rel != Rel::Le && at.rel != Rel::Lt)
            throw SemanticError(at.line, at.col,
                                "invariants may only use upper bounds (< or <=)");
          l.inv.push_back({clock(at.c1, at.line, at.col, clock_idx), at.rel, at.k});
        }
        ta.locations.push_back(std::move(l));
      }
      auto loc = [&](const std::string& n, int line, int col) {
        auto it = loc_idx.find(n);
        if (it == loc_idx.end())
          throw SemanticError(line, col, ra.name + ": unknown location " + n);
        return it->second;
      };
      ta.init = loc(ra.init, ra.init_line, ra.init_col);
      for (const auto& re : ra.edges) {
        Edge e;
        e.src = loc(re.src, re.line, re.col);
        e.tgt = loc(re.tgt, re.line, re.col);
        e.kind = re.kind;
        e.label = re.label;
        for (const auto& at : re.guard) {
          if (at.diag) {
            if (!net.synthesized)
              throw SemanticError(at.line, at.col,
                                  "difference constraints are only legal in synthesized output");
            e.guard.diags.push_back({clock(at.c1, at.line, at.col, clock_idx),
                                     clock(at.c2, at.line, at.col, clock_idx), at.rel, at.k});
          } else {
            if (at.k < 0)
              throw SemanticError(at.line, at.col, "negative constant in a clock atom");
            e.guard.atoms.push_back({clock(at.c1, at.line, at.col, clock_idx), at.rel, at.k});
          }
        }
        for (const auto& r : re.resets) e.resets.push_back(clock(r, re.line, re.col, clock_idx));
        std::sort(e.resets.begin(), e.resets.end());
        e.resets.erase(std::unique(e.resets.begin(), e.resets.end()), e.resets.end());
        for (const auto& [d, s] : re.copies) {
          if (!net.synthesized)
            throw SemanticError(re.line, re.col,
                                "copy clauses are only legal in synthesized output");
          e.copies.emplace_back(clock(d, re.line, re.col, clock_idx),
                                clock(s, re.line, re.col, clock_idx));
        }
        ta.edges.push_back(std::move(e));
      }
    }
  }

  int clock(const std::string& n, int line, int col, const std::map<std::string, int>& idx) {
    auto it = idx.find(n);
    if (it == idx.end()) throw SemanticError(line, col, "unknown clock " + n);
    return it->second;
  }

  Lexer lex_;
};

}  // namespace

Network parse(const std::string& text) { return Parser(text).run(); }

Network parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

void atom_out(std::ostream& os, const Atom& a, const std::vector<Clock>& clocks) {
  os << clocks[a.clock].name << ' ' << rel_str(a.rel) << ' ' << a.k;
}

}  // namespace

std::string guard_str(const Guard& g, const std::vector<Clock>& clocks) {
  if (g.trivial()) return "true";
  std::ostringstream os;
  bool first = true;
  for (const auto& a : g.atoms) {
    if (!first) os << " && ";
    first = false;
    atom_out(os, a, clocks);
  }
  for (const auto& d : g.diags) {
    if (!first) os << " && ";
    first = false;
    os << clocks[d.x].name << " - " << clocks[d.y].name << ' ' << rel_str(d.rel) << ' ' << d.k;
  }
  return os.str();
}

std::string inv_str(const Invariant& inv, const std::vector<Clock>& clocks) {
  Guard g;
  g.atoms = inv;
  return guard_str(g, clocks);
}

std::string serialize(const Network& net) {
  std::ostringstream os;
  if (net.synthesized) os << "pragma synthesized;\n";
  for (int ci = 0; ci < 2; ++ci) {
    const TimedAutomaton& a = net.comp(ci);
    os << "automaton " << a.name << " {\n";
    if (!a.owned_clocks.empty()) {
      os << "  clocks ";
      for (size_t i = 0; i < a.owned_clocks.size(); ++i) {
        if (i) os << ", ";
        os << net.clocks[a.owned_clocks[i]].name;
      }
      os << ";\n";
    }
    os << "  init " << a.locations[a.init].name << ";\n";
    for (const auto& l : a.locations) {
      os << "  loc " << l.name;
      if (!l.inv.empty()) {
        os << " inv ";
        for (size_t i = 0; i < l.inv.size(); ++i) {
          if (i) os << " && ";
          atom_out(os, l.inv[i], net.clocks);
        }
      }
      os << ";\n";
    }
    for (const auto& e : a.edges) {
      os << "  edge " << a.locations[e.src].name << " -> " << a.locations[e.tgt].name;
      if (!e.guard.trivial()) os << " when " << guard_str(e.guard, net.clocks);
      switch (e.kind) {
        case ActKind::Eps: os << " eps"; break;
        case ActKind::Local: os << " do " << e.label; break;
        case ActKind::Sync: os << " sync " << e.label; break;
      }
      if (!e.resets.empty()) {
        os << " reset ";
        for (size_t i = 0; i < e.resets.size(); ++i) {
          if (i) os << ", ";
          os << net.clocks[e.resets[i]].name;
        }
      }
      if (!e.copies.empty()) {
        os << " copy ";
        for (size_t i = 0; i < e.copies.size(); ++i) {
          if (i) os << ", ";
          os << net.clocks[e.copies[i].first].name << " := " << net.clocks[e.copies[i].second].name;
        }
      }
      os << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

std::string export_dot(const Network& net) {
  std::ostringstream os;
  os << "digraph network {\n  rankdir=LR;\n";
  for (int ci = 0; ci < 2; ++ci) {
    const TimedAutomaton& a = net.comp(ci);
    os << "  subgraph cluster_" << ci << " {\n    label=\"" << a.name << "\";\n";
    for (size_t li = 0; li < a.locations.size(); ++li) {
      const Location& l = a.locations[li];
      os << "    \"" << a.name << "." << l.name << "\" [label=\"" << l.name;
      if (!l.inv.empty()) os << "\\n" << inv_str(l.inv, net.clocks);
      os << "\"";
      if ((int)li == a.init) os << ", shape=doublecircle";
      if (l.name == "SAD") os << ", shape=octagon, style=bold";
      os << "];\n";
    }
    for (const auto& e : a.edges) {
      os << "    \"" << a.name << "." << a.locations[e.src].name << "\" -> \"" << a.name << "."
         << a.locations[e.tgt].name << "\" [label=\"";
      if (!e.guard.trivial()) os << guard_str(e.guard, net.clocks) << ", ";
      os << (e.kind == ActKind::Eps ? std::string("eps") : e.label);
      if (!e.resets.empty()) {
        os << ", reset ";
        for (size_t i = 0; i < e.resets.size(); ++i) {
          if (i) os << ",";
          os << net.clocks[e.resets[i]].name;
        }
      }
      for (const auto& [d, s] : e.copies)
        os << ", " << net.clocks[d].name << ":=" << net.clocks[s].name;
      os << "\"";
      if (e.kind == ActKind::Sync) os << ", style=dashed";
      if (a.locations[e.tgt].name == "SAD") os << ", style=dotted";
      os << "];\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ntasc
