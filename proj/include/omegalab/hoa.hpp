#pragma once

// HOA v1 import/export for deterministic state-based Buchi automata.
//
// Only the subset that Spot emits for DBAs is handled: explicit edge
// labels, state-based acceptance marks, `Acceptance: 1 Inf(0)`, a single
// initial state, simple `Alias:` definitions. Anything else fails with an
// "unsupported feature" error naming the feature. Header claims such as
// `properties: deterministic` are not trusted; determinism is re-verified
// by enumerating all assignments per state.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "omegalab/automaton.hpp"
#include "omegalab/label_expr.hpp"

namespace omegalab {

// Parse error with 1-based document position.
struct HoaError : std::runtime_error {
  int line;
  int col;
  HoaError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RawEdge {
  std::unique_ptr<LabelExpr> label;
  int dest = -1;
  std::vector<int> acc_marks;  // transition marks; rejected in validate_dba
  int line = 0, col = 0;
};

struct RawState {
  int id = -1;
  std::vector<int> acc_marks;
  std::vector<RawEdge> edges;
};

struct RawAutomaton {
  std::map<std::string, std::string> header_fields;
  std::vector<std::string> ap_names;
  int n_states = 0;
  int start_state = -1;
  int acceptance_set_count = -1;
  std::vector<std::string> acceptance_tokens;  // e.g. {"Inf", "(", "0", ")"}
  std::vector<RawState> states;                // indexed 0..n_states-1
};

namespace hoa_detail {

enum class Tok {
  kHeaderName,  // identifier immediately followed by ':'
  kIdent,
  kInt,
  kString,
  kAlias,  // @name
  kLBracket, kRBracket, kLBrace, kRBrace, kLParen, kRParen,
  kNot, kAnd, kOr,
  kBody,  // --BODY--
  kEnd,   // --END--
  kEof,
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> lex() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.col = col_;
      if (at_end()) {
        t.kind = Tok::kEof;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (c == '"') {
        t.kind = Tok::kString;
        t.text = lex_string();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::kInt;
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
          digits += advance();
        t.value = std::stoll(digits);
        t.text = digits;
      } else if (c == '@') {
        advance();
        t.kind = Tok::kAlias;
        t.text = lex_ident_body();
        if (t.text.empty()) fail("expected alias name after '@'", t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.text = lex_ident_body();
        if (!at_end() && peek() == ':') {
          advance();
          t.kind = Tok::kHeaderName;
        } else {
          t.kind = Tok::kIdent;
        }
      } else if (c == '-') {
        // --BODY-- or --END--
        std::string marker;
        while (!at_end() && (peek() == '-' || std::isalpha(static_cast<unsigned char>(peek()))))
          marker += advance();
        if (marker == "--BODY--") t.kind = Tok::kBody;
        else if (marker == "--END--") t.kind = Tok::kEnd;
        else fail("unrecognized marker '" + marker + "'", t);
        t.text = marker;
      } else {
        advance();
        switch (c) {
          case '[': t.kind = Tok::kLBracket; break;
          case ']': t.kind = Tok::kRBracket; break;
          case '{': t.kind = Tok::kLBrace; break;
          case '}': t.kind = Tok::kRBrace; break;
          case '(': t.kind = Tok::kLParen; break;
          case ')': t.kind = Tok::kRParen; break;
          case '!': t.kind = Tok::kNot; break;
          case '&': t.kind = Tok::kAnd; break;
          case '|': t.kind = Tok::kOr; break;
          default:
            fail(std::string("unexpected character '") + c + "'", t);
        }
        t.text = std::string(1, c);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const Token& at) {
    throw HoaError(msg, at.line, at.col);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (!at_end() && peek() == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        int start_line = line_, start_col = col_;
        advance();
        advance();
        int depth = 1;  // HOA comments nest
        while (depth > 0) {
          if (at_end()) throw HoaError("unterminated comment", start_line, start_col);
          char c = advance();
          if (c == '/' && !at_end() && peek() == '*') { advance(); ++depth; }
          else if (c == '*' && !at_end() && peek() == '/') { advance(); --depth; }
        }
        continue;
      }
      return;
    }
  }

  std::string lex_string() {
    int start_line = line_, start_col = col_;
    advance();  // opening quote
    std::string s;
    for (;;) {
      if (at_end()) throw HoaError("unterminated string", start_line, start_col);
      char c = advance();
      if (c == '"') return s;
      if (c == '\\') {
        if (at_end()) throw HoaError("unterminated string", start_line, start_col);
        s += advance();
      } else {
        s += c;
      }
    }
  }

  std::string lex_ident_body() {
    std::string s;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        // a '-' only continues an identifier if not starting a --END-- marker
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') break;
        s += advance();
      } else {
        break;
      }
    }
    return s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RawAutomaton parse() {
    expect_header("HOA");
    Token version = expect(Tok::kIdent, "HOA version identifier");
    if (version.text != "v1") fail(version, "unsupported feature: HOA version " + version.text);
    parse_headers();
    parse_body();
    finalize();
    return std::move(raw_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at(Tok k) const { return cur().kind == k; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw HoaError(msg, t.line, t.col);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(cur(), "expected " + what);
    return next();
  }

  void expect_header(const std::string& name) {
    if (!at(Tok::kHeaderName) || cur().text != name)
      fail(cur(), "expected '" + name + ":'");
    next();
  }

  int expect_int(const std::string& what) {
    Token t = expect(Tok::kInt, what);
    if (t.value < 0 || t.value > INT32_MAX) fail(t, what + " out of range");
    return static_cast<int>(t.value);
  }

  bool header_boundary() const {
    return at(Tok::kHeaderName) || at(Tok::kBody) || at(Tok::kEof);
  }

  void parse_headers() {
    bool saw_states = false, saw_start = false, saw_ap = false, saw_acceptance = false;
    while (!at(Tok::kBody)) {
      if (at(Tok::kEof)) fail(cur(), "missing --BODY--");
      Token h = expect(Tok::kHeaderName, "header name");
      const std::string& name = h.text;
      if (name == "States") {
        if (saw_states) fail(h, "duplicate States header");
        saw_states = true;
        declared_states_ = expect_int("state count");
        raw_.header_fields["States"] = std::to_string(declared_states_);
      } else if (name == "Start") {
        if (saw_start) fail(h, "unsupported feature: multiple initial states");
        saw_start = true;
        raw_.start_state = expect_int("initial state");
        if (!header_boundary())
          fail(cur(), "unsupported feature: multiple initial states");
        raw_.header_fields["Start"] = std::to_string(raw_.start_state);
      } else if (name == "AP") {
        if (saw_ap) fail(h, "duplicate AP header");
        saw_ap = true;
        int count = expect_int("proposition count");
        if (count > kMaxPropositions)
          fail(h, "too many atomic propositions (" + std::to_string(count) +
                      " > " + std::to_string(kMaxPropositions) + ")");
        for (int i = 0; i < count; ++i)
          raw_.ap_names.push_back(expect(Tok::kString, "quoted proposition name").text);
        raw_.header_fields["AP"] = std::to_string(count);
      } else if (name == "Acceptance") {
        if (saw_acceptance) fail(h, "duplicate Acceptance header");
        saw_acceptance = true;
        raw_.acceptance_set_count = expect_int("acceptance set count");
        std::string text = std::to_string(raw_.acceptance_set_count);
        while (!header_boundary()) {
          Token t = next();
          raw_.acceptance_tokens.push_back(t.text);
          text += " " + t.text;
        }
        raw_.header_fields["Acceptance"] = text;
      } else if (name == "Alias") {
        Token a = expect(Tok::kAlias, "alias name after Alias:");
        if (aliases_.count(a.text)) fail(a, "duplicate alias @" + a.text);
        aliases_[a.text] = parse_label_expr(/*stop_at_header=*/true);
      } else if (name == "acc-name" || name == "name" || name == "tool" ||
                 name == "properties") {
        std::string text;
        while (!header_boundary()) {
          if (!text.empty()) text += " ";
          text += next().text;
        }
        raw_.header_fields[name] = text;
      } else if (!name.empty() && std::isupper(static_cast<unsigned char>(name[0]))) {
        // Capitalized headers carry semantics we do not implement.
        fail(h, "unsupported feature: header " + name + ":");
      } else {
        // Unknown lowercase headers are ignorable extensions.
        while (!header_boundary()) next();
      }
    }
    next();  // --BODY--
    if (!saw_acceptance) fail(cur(), "missing Acceptance header");
    if (!saw_start) fail(cur(), "unsupported feature: no initial state");
  }

  void parse_body() {
    while (!at(Tok::kEnd)) {
      if (at(Tok::kEof)) fail(cur(), "missing --END--");
      Token h = expect(Tok::kHeaderName, "State: block");
      if (h.text != "State") fail(h, "expected 'State:' in body");
      if (at(Tok::kLBracket))
        fail(cur(), "unsupported feature: state labels (implicit-label bodies)");
      RawState st;
      st.id = expect_int("state id");
      if (at(Tok::kString)) next();  // optional state name, ignored
      if (at(Tok::kLBrace)) st.acc_marks = parse_marks();
      // Edges until the next State/--END--.
      while (!at(Tok::kHeaderName) && !at(Tok::kEnd)) {
        if (at(Tok::kInt) || at(Tok::kIdent))
          fail(cur(), "unsupported feature: implicit-label bodies");
        RawEdge e;
        e.line = cur().line;
        e.col = cur().col;
        expect(Tok::kLBracket, "'[' starting an edge label");
        e.label = parse_label_expr(/*stop_at_header=*/false);
        expect(Tok::kRBracket, "']' ending an edge label");
        e.dest = expect_int("destination state");
        if (at(Tok::kAnd))
          fail(cur(), "unsupported feature: conjunct destinations (alternation)");
        if (at(Tok::kLBrace)) e.acc_marks = parse_marks();
        st.edges.push_back(std::move(e));
      }
      states_.push_back(std::move(st));
    }
    next();  // --END--
    if (!at(Tok::kEof)) fail(cur(), "trailing content after --END--");
  }

  std::vector<int> parse_marks() {
    expect(Tok::kLBrace, "'{'");
    std::vector<int> marks;
    while (!at(Tok::kRBrace)) marks.push_back(expect_int("acceptance set index"));
    next();  // '}'
    return marks;
  }

  // label-expr := disj; disj := conj ('|' conj)*; conj := unary ('&' unary)*;
  // unary := '!' unary | '(' disj ')' | 't' | 'f' | INT | @alias
  std::unique_ptr<LabelExpr> parse_label_expr(bool stop_at_header) {
    auto lhs = parse_label_conj(stop_at_header);
    while (at(Tok::kOr)) {
      next();
      lhs = LabelExpr::disj(std::move(lhs), parse_label_conj(stop_at_header));
    }
    return lhs;
  }

  std::unique_ptr<LabelExpr> parse_label_conj(bool stop_at_header) {
    auto lhs = parse_label_unary(stop_at_header);
    while (at(Tok::kAnd)) {
      next();
      lhs = LabelExpr::conj(std::move(lhs), parse_label_unary(stop_at_header));
    }
    return lhs;
  }

  std::unique_ptr<LabelExpr> parse_label_unary(bool stop_at_header) {
    Token t = cur();
    switch (t.kind) {
      case Tok::kNot:
        next();
        return LabelExpr::negate(parse_label_unary(stop_at_header));
      case Tok::kLParen: {
        next();
        auto e = parse_label_expr(stop_at_header);
        expect(Tok::kRParen, "')'");
        return e;
      }
      case Tok::kInt:
        next();
        return LabelExpr::atom(static_cast<int>(t.value));
      case Tok::kIdent:
        next();
        if (t.text == "t") return LabelExpr::constant(true);
        if (t.text == "f") return LabelExpr::constant(false);
        fail(t, "unexpected identifier '" + t.text + "' in label");
      case Tok::kAlias: {
        next();
        auto it = aliases_.find(t.text);
        if (it == aliases_.end()) fail(t, "undefined alias @" + t.text);
        return it->second->clone();
      }
      default:
        fail(t, "unexpected token in label expression");
    }
  }

  void finalize() {
    int max_id = -1;
    for (auto& st : states_) max_id = std::max(max_id, st.id);
    const int n = declared_states_ >= 0 ? declared_states_ : max_id + 1;
    raw_.n_states = n;

    raw_.states.resize(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (auto& st : states_) {
      if (st.id >= n)
        throw HoaError("state id " + std::to_string(st.id) + " out of range (States: " +
                           std::to_string(n) + ")", 1, 1);
      if (seen[static_cast<std::size_t>(st.id)])
        throw HoaError("duplicate State: " + std::to_string(st.id), 1, 1);
      seen[static_cast<std::size_t>(st.id)] = true;
      raw_.states[static_cast<std::size_t>(st.id)] = std::move(st);
    }
    for (int q = 0; q < n; ++q)
      if (!seen[static_cast<std::size_t>(q)])
        throw HoaError("missing State: block for state " + std::to_string(q), 1, 1);

    if (raw_.start_state < 0 || raw_.start_state >= n)
      throw HoaError("initial state " + std::to_string(raw_.start_state) +
                         " does not exist", 1, 1);

    const int prop_count = static_cast<int>(raw_.ap_names.size());
    for (auto& st : raw_.states)
      for (auto& e : st.edges) {
        if (e.dest < 0 || e.dest >= n)
          throw HoaError("destination state " + std::to_string(e.dest) +
                             " does not exist", e.line, e.col);
        if (e.label->max_ap() >= prop_count)
          throw HoaError("proposition index " + std::to_string(e.label->max_ap()) +
                             " out of range (AP: " + std::to_string(prop_count) + ")",
                         e.line, e.col);
      }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  RawAutomaton raw_;
  std::vector<RawState> states_;
  std::map<std::string, std::unique_ptr<LabelExpr>> aliases_;
  int declared_states_ = -1;
};

}  // namespace hoa_detail

inline RawAutomaton parse_hoa(std::string_view text) {
  hoa_detail::Lexer lexer(text);
  hoa_detail::Parser parser(lexer.lex());
  return parser.parse();
}

// Checks state-based Buchi acceptance, a single initial state and
// determinism, then expands label formulas into explicit per-assignment
// transitions. The result may be partial; see complete().
inline Dba validate_dba(const RawAutomaton& raw) {
  const bool buchi = raw.acceptance_set_count == 1 &&
                     raw.acceptance_tokens.size() == 4 &&
                     raw.acceptance_tokens[0] == "Inf" &&
                     raw.acceptance_tokens[1] == "(" &&
                     raw.acceptance_tokens[2] == "0" &&
                     raw.acceptance_tokens[3] == ")";
  if (!buchi) {
    std::string text;
    for (auto& t : raw.acceptance_tokens) text += t;
    throw ValidationError("acceptance condition is not Buchi (want '1 Inf(0)', got '" +
                          std::to_string(raw.acceptance_set_count) + " " + text + "')");
  }
  if (raw.start_state < 0) throw ValidationError("no initial state");

  const int prop_count = static_cast<int>(raw.ap_names.size());
  if (prop_count > kMaxPropositions)
    throw ValidationError("too many atomic propositions");

  Dba dba;
  dba.n_states = raw.n_states;
  dba.initial = raw.start_state;
  dba.ap_names = raw.ap_names;
  const std::uint32_t na = dba.assignment_count();
  dba.delta.assign(static_cast<std::size_t>(raw.n_states) * na, -1);
  dba.accepting.assign(static_cast<std::size_t>(raw.n_states), 0);

  for (const auto& st : raw.states) {
    for (int m : st.acc_marks) {
      if (m != 0)
        throw ValidationError("state " + std::to_string(st.id) +
                              " uses acceptance set " + std::to_string(m) +
                              "; only Inf(0) is supported");
      dba.accepting[static_cast<std::size_t>(st.id)] = 1;
    }
    for (const auto& e : st.edges) {
      if (!e.acc_marks.empty())
        throw ValidationError("transition-based acceptance marks on edge of state " +
                              std::to_string(st.id) + " (state-based Buchi required)");
      for (std::uint32_t a = 0; a < na; ++a) {
        if (!e.label->eval(a)) continue;
        auto& slot = dba.delta[static_cast<std::size_t>(st.id) * na + a];
        if (slot >= 0)
          throw ValidationError(
              "nondeterminism at state " + std::to_string(st.id) + " on assignment " +
              assignment_to_string(a, raw.ap_names) + " (edges to " +
              std::to_string(slot) + " and " + std::to_string(e.dest) + ")");
        slot = e.dest;
      }
    }
  }
  return dba;
}

// Deterministic HOA v1 text; parse_hoa + validate_dba recovers the automaton
// with identical state numbering.
inline std::string emit_hoa(const Dba& dba) {
  const std::uint32_t na = dba.assignment_count();
  const int prop_count = static_cast<int>(dba.ap_names.size());
  std::ostringstream out;
  out << "HOA: v1\n";
  out << "States: " << dba.n_states << "\n";
  out << "Start: " << dba.initial << "\n";
  out << "AP: " << prop_count;
  for (const auto& name : dba.ap_names) out << " \"" << name << "\"";
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc deterministic";
  if (dba.is_complete()) out << " complete";
  out << "\n";
  out << "--BODY--\n";
  for (int q = 0; q < dba.n_states; ++q) {
    out << "State: " << q;
    if (dba.is_accepting(q)) out << " {0}";
    out << "\n";
    // One edge per destination, labeled by the disjunction of its minterms.
    std::map<int, std::vector<std::uint32_t>> by_dest;
    for (std::uint32_t a = 0; a < na; ++a) {
      std::int32_t d = dba.delta_at(q, a);
      if (d >= 0) by_dest[d].push_back(a);
    }
    for (const auto& [dest, assignments] : by_dest) {
      out << "[";
      if (assignments.size() == na) {
        out << "t";
      } else {
        for (std::size_t i = 0; i < assignments.size(); ++i) {
          if (i) out << " | ";
          if (prop_count == 0) {
            out << "t";
            continue;
          }
          for (int p = 0; p < prop_count; ++p) {
            if (p) out << "&";
            if (!((assignments[i] >> p) & 1u)) out << "!";
            out << p;
          }
        }
      }
      out << "] " << dest << "\n";
    }
  }
  out << "--END--\n";
  return out.str();
}

// Structural equality under identical state numbering.
inline bool same_dba(const Dba& a, const Dba& b) {
  return a.n_states == b.n_states && a.initial == b.initial &&
         a.ap_names == b.ap_names && a.delta == b.delta && a.accepting == b.accepting;
}

}  // namespace omegalab
