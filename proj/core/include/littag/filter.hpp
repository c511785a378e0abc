#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

// Filter expression language, an R look-alike:
//
//   expr      := or
//   or        := and ("|" and)*
//   and       := unary ("&" unary)*
//   unary     := "!" unary | primary
//   primary   := "(" expr ")" | predicate
//   predicate := column cmp literal
//              | has(column, string) | contains(column, string)
//              | empty(column) | tagged(column)
//   column    := [A-Za-z_][A-Za-z0-9_]* | `any name`
//   literal   := "string" | decimal number | YYYY-MM-DD
//
// "&&" and "||" are accepted as spellings of "&" and "|".
namespace littag {

// Deep-copying owning pointer so AST nodes keep value semantics.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  template <class U>
    requires(!std::is_same_v<std::remove_cvref_t<U>, Box> && !std::is_same_v<std::remove_cvref_t<U>, T> &&
             std::is_constructible_v<T, U>)
  Box(U&& value) : ptr_(std::make_unique<T>(std::forward<U>(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  const T& operator*() const noexcept { return *ptr_; }
  const T* operator->() const noexcept { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view to_string(CompareOp op) noexcept;

struct Literal {
  enum class Kind { String, Number, Date };
  Kind kind = Kind::String;
  std::string text;  // unquoted string content, or the number/date as written
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct FilterExpr;

struct OrExpr {
  std::vector<FilterExpr> operands;
  friend bool operator==(const OrExpr& a, const OrExpr& b);
};

struct AndExpr {
  std::vector<FilterExpr> operands;
  friend bool operator==(const AndExpr& a, const AndExpr& b);
};

struct NotExpr {
  Box<FilterExpr> operand;
  friend bool operator==(const NotExpr& a, const NotExpr& b);
};

struct CompareExpr {
  std::string column;
  CompareOp op = CompareOp::Eq;
  Literal literal;
  friend bool operator==(const CompareExpr&, const CompareExpr&) = default;
};

struct HasExpr {
  std::string column;
  std::string option;
  friend bool operator==(const HasExpr&, const HasExpr&) = default;
};

struct ContainsExpr {
  std::string column;
  std::string needle;
  friend bool operator==(const ContainsExpr&, const ContainsExpr&) = default;
};

struct EmptyExpr {
  std::string column;
  friend bool operator==(const EmptyExpr&, const EmptyExpr&) = default;
};

struct TaggedExpr {
  std::string column;
  friend bool operator==(const TaggedExpr&, const TaggedExpr&) = default;
};

struct FilterExpr {
  using Node = std::variant<OrExpr, AndExpr, NotExpr, CompareExpr, HasExpr, ContainsExpr, EmptyExpr, TaggedExpr>;
  Node node;

  template <class T>
    requires(!std::is_same_v<std::decay_t<T>, FilterExpr>)
  FilterExpr(T n) : node(std::move(n)) {}  // NOLINT(google-explicit-constructor)

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&node);
  }

  friend bool operator==(const FilterExpr& a, const FilterExpr& b) { return a.node == b.node; }
};

inline bool operator==(const OrExpr& a, const OrExpr& b) { return a.operands == b.operands; }
inline bool operator==(const AndExpr& a, const AndExpr& b) { return a.operands == b.operands; }
inline bool operator==(const NotExpr& a, const NotExpr& b) { return a.operand == b.operand; }

// Throws FilterParseError (ErrorCode::ParseError) with the byte position of
// the offending token and the set of tokens that would have been accepted.
FilterExpr parse_filter(std::string_view text);

// Canonical text: single spaces around binary operators, parentheses only
// where a nested and/or would otherwise regroup. parse_filter(print(e)) == e.
std::string print_filter(const FilterExpr& expr);

// Every column name referenced by the expression, in first-use order.
std::vector<std::string> referenced_columns(const FilterExpr& expr);

// Column name in canonical form: bare when it is an identifier, otherwise
// backtick-quoted.
std::string quote_column(std::string_view name);

}  // namespace littag
