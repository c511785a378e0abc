#include <algorithm>

#include "littag/cell.hpp"
#include "littag/error.hpp"
#include "littag/filter.hpp"

namespace littag {

std::string_view to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "==";
}

namespace {

enum class Tok { LParen, RParen, Comma, And, Or, Not, Cmp, Ident, Quoted, String, Number, Date, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, unescaped string, number/date spelling
  CompareOp op = CompareOp::Eq;
  std::size_t pos = 0;
};

constexpr bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
constexpr bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
constexpr bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    Token t;
    t.pos = pos_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto two = [&](char second) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == second; };

    switch (c) {
      case '(': ++pos_; t.kind = Tok::LParen; return t;
      case ')': ++pos_; t.kind = Tok::RParen; return t;
      case ',': ++pos_; t.kind = Tok::Comma; return t;
      case '&': pos_ += two('&') ? 2 : 1; t.kind = Tok::And; return t;
      case '|': pos_ += two('|') ? 2 : 1; t.kind = Tok::Or; return t;
      case '!':
        if (two('=')) {
          pos_ += 2;
          t.kind = Tok::Cmp;
          t.op = CompareOp::Ne;
        } else {
          ++pos_;
          t.kind = Tok::Not;
        }
        return t;
      case '=':
        if (!two('=')) throw FilterParseError(pos_, {"'=='"});
        pos_ += 2;
        t.kind = Tok::Cmp;
        t.op = CompareOp::Eq;
        return t;
      case '<':
      case '>': {
        bool eq = two('=');
        pos_ += eq ? 2 : 1;
        t.kind = Tok::Cmp;
        t.op = c == '<' ? (eq ? CompareOp::Le : CompareOp::Lt) : (eq ? CompareOp::Ge : CompareOp::Gt);
        return t;
      }
      case '"': t.kind = Tok::String; t.text = delimited('"'); return t;
      case '`':
        t.kind = Tok::Quoted;
        t.text = delimited('`');
        if (t.text.empty()) throw FilterParseError(t.pos, {"column name"});
        return t;
      default: break;
    }
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (digit(c) || ((c == '-' || c == '.') && pos_ + 1 < src_.size() && (digit(src_[pos_ + 1]) || src_[pos_ + 1] == '.'))) {
      return number_or_date();
    }
    throw FilterParseError(pos_, {"'('", "'!'", "column", "literal", "operator"});
  }

 private:
  std::string delimited(char quote) {
    std::size_t open = pos_++;
    std::string out;
    while (pos_ < src_.size()) {
      char c = src_[pos_++];
      if (c == quote) return out;
      if (c == '\\' && pos_ < src_.size()) {
        char e = src_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out += e; break;
        }
        continue;
      }
      out += c;
    }
    throw FilterParseError(src_.size(), {std::string("closing ") + quote + " for the literal opened at " +
                                             std::to_string(open)});
  }

  Token number_or_date() {
    Token t;
    t.pos = pos_;
    // Date: exactly DDDD-DD-DD not followed by another digit.
    if (pos_ + 10 <= src_.size()) {
      auto cand = src_.substr(pos_, 10);
      bool shape = digit(cand[0]) && digit(cand[1]) && digit(cand[2]) && digit(cand[3]) && cand[4] == '-' &&
                   digit(cand[5]) && digit(cand[6]) && cand[7] == '-' && digit(cand[8]) && digit(cand[9]);
      bool ends = pos_ + 10 == src_.size() || !ident_char(src_[pos_ + 10]);
      if (shape && ends) {
        if (!parse_date(cand)) throw FilterParseError(pos_, {"valid calendar date"});
        pos_ += 10;
        t.kind = Tok::Date;
        t.text = std::string(cand);
        return t;
      }
    }
    std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    bool digits = false;
    while (pos_ < src_.size() && digit(src_[pos_])) {
      ++pos_;
      digits = true;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits || (pos_ < src_.size() && ident_char(src_[pos_]))) throw FilterParseError(start, {"number"});
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) {
    current_ = lexer_.next();
    lookahead_ = lexer_.next();
  }

  FilterExpr parse() {
    auto expr = parse_or();
    if (current_.kind != Tok::End) fail({"'&'", "'|'", "end of input"});
    return expr;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) const { throw FilterParseError(current_.pos, std::move(expected)); }

  void advance() {
    current_ = std::move(lookahead_);
    lookahead_ = current_.kind == Tok::End ? current_ : lexer_.next();
  }

  FilterExpr parse_or() {
    std::vector<FilterExpr> parts;
    parts.push_back(parse_and());
    while (current_.kind == Tok::Or) {
      advance();
      parts.push_back(parse_and());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return OrExpr{std::move(parts)};
  }

  FilterExpr parse_and() {
    std::vector<FilterExpr> parts;
    parts.push_back(parse_unary());
    while (current_.kind == Tok::And) {
      advance();
      parts.push_back(parse_unary());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return AndExpr{std::move(parts)};
  }

  FilterExpr parse_unary() {
    if (current_.kind == Tok::Not) {
      advance();
      return NotExpr{parse_unary()};
    }
    return parse_primary();
  }

  FilterExpr parse_primary() {
    if (current_.kind == Tok::LParen) {
      advance();
      auto inner = parse_or();
      if (current_.kind != Tok::RParen) fail({"')'", "'&'", "'|'"});
      advance();
      return inner;
    }
    if (current_.kind == Tok::Ident && lookahead_.kind == Tok::LParen) return parse_call();
    if (current_.kind == Tok::Ident || current_.kind == Tok::Quoted) {
      std::string column = current_.text;
      advance();
      if (current_.kind != Tok::Cmp) fail({"comparison operator"});
      CompareOp op = current_.op;
      advance();
      Literal lit;
      switch (current_.kind) {
        case Tok::String: lit.kind = Literal::Kind::String; break;
        case Tok::Number: lit.kind = Literal::Kind::Number; break;
        case Tok::Date: lit.kind = Literal::Kind::Date; break;
        default: fail({"string", "number", "date"});
      }
      lit.text = current_.text;
      advance();
      return CompareExpr{std::move(column), op, std::move(lit)};
    }
    fail({"'('", "'!'", "column", "has(", "contains(", "empty(", "tagged("});
  }

  FilterExpr parse_call() {
    std::string fn = current_.text;
    std::size_t fn_pos = current_.pos;
    bool binary = fn == "has" || fn == "contains";
    bool unary = fn == "empty" || fn == "tagged";
    if (!binary && !unary) {
      throw FilterParseError(fn_pos, {"has", "contains", "empty", "tagged"});
    }
    advance();  // name
    advance();  // '('
    if (current_.kind != Tok::Ident && current_.kind != Tok::Quoted) fail({"column"});
    std::string column = current_.text;
    advance();
    std::string arg;
    if (binary) {
      if (current_.kind != Tok::Comma) fail({"','"});
      advance();
      if (current_.kind != Tok::String) fail({"string"});
      arg = current_.text;
      advance();
    }
    if (current_.kind != Tok::RParen) fail({"')'"});
    advance();
    if (fn == "has") return HasExpr{std::move(column), std::move(arg)};
    if (fn == "contains") return ContainsExpr{std::move(column), std::move(arg)};
    if (fn == "empty") return EmptyExpr{std::move(column)};
    return TaggedExpr{std::move(column)};
  }

  Lexer lexer_;
  Token current_;
  Token lookahead_;
};

std::string escape(std::string_view s, char quote) {
  std::string out;
  out += quote;
  for (char c : s) {
    if (c == quote || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out += c;
  }
  out += quote;
  return out;
}

bool is_junction(const FilterExpr& e) { return e.as<AndExpr>() || e.as<OrExpr>(); }

void print(const FilterExpr& e, std::string& out) {
  auto wrapped = [&](const FilterExpr& child, bool parens) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
  };
  if (auto* o = e.as<OrExpr>()) {
    for (std::size_t i = 0; i < o->operands.size(); ++i) {
      if (i > 0) out += " | ";
      wrapped(o->operands[i], o->operands[i].as<OrExpr>() != nullptr);
    }
  } else if (auto* a = e.as<AndExpr>()) {
    for (std::size_t i = 0; i < a->operands.size(); ++i) {
      if (i > 0) out += " & ";
      wrapped(a->operands[i], is_junction(a->operands[i]));
    }
  } else if (auto* n = e.as<NotExpr>()) {
    out += '!';
    wrapped(*n->operand, is_junction(*n->operand));
  } else if (auto* c = e.as<CompareExpr>()) {
    out += quote_column(c->column);
    out += ' ';
    out += to_string(c->op);
    out += ' ';
    out += c->literal.kind == Literal::Kind::String ? escape(c->literal.text, '"') : c->literal.text;
  } else if (auto* h = e.as<HasExpr>()) {
    out += "has(" + quote_column(h->column) + ", " + escape(h->option, '"') + ")";
  } else if (auto* k = e.as<ContainsExpr>()) {
    out += "contains(" + quote_column(k->column) + ", " + escape(k->needle, '"') + ")";
  } else if (auto* m = e.as<EmptyExpr>()) {
    out += "empty(" + quote_column(m->column) + ")";
  } else if (auto* t = e.as<TaggedExpr>()) {
    out += "tagged(" + quote_column(t->column) + ")";
  }
}

void collect(const FilterExpr& e, std::vector<std::string>& out) {
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  if (auto* o = e.as<OrExpr>()) {
    for (const auto& x : o->operands) collect(x, out);
  } else if (auto* a = e.as<AndExpr>()) {
    for (const auto& x : a->operands) collect(x, out);
  } else if (auto* n = e.as<NotExpr>()) {
    collect(*n->operand, out);
  } else if (auto* c = e.as<CompareExpr>()) {
    add(c->column);
  } else if (auto* h = e.as<HasExpr>()) {
    add(h->column);
  } else if (auto* k = e.as<ContainsExpr>()) {
    add(k->column);
  } else if (auto* m = e.as<EmptyExpr>()) {
    add(m->column);
  } else if (auto* t = e.as<TaggedExpr>()) {
    add(t->column);
  }
}

}  // namespace

FilterExpr parse_filter(std::string_view text) { return Parser(text).parse(); }

std::string print_filter(const FilterExpr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

std::vector<std::string> referenced_columns(const FilterExpr& expr) {
  std::vector<std::string> out;
  collect(expr, out);
  return out;
}

std::string quote_column(std::string_view name) {
  bool bare = !name.empty() && ident_start(name[0]) && std::all_of(name.begin(), name.end(), ident_char);
  return bare ? std::string(name) : escape(name, '`');
}

}  // namespace littag
