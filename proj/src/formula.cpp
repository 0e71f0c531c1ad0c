#include "smoothforge/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "smoothforge/error.hpp"

namespace smoothforge {

std::string SmoothSpec::label() const {
  std::string out = kind == SmoothKind::s ? "s(" : "te(";
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i) out += ',';
    out += variables[i];
  }
  return out + ')';
}

int SmoothSpec::raw_dim() const {
  int d = 1;
  for (int m : k) d *= m;
  return d;
}

namespace {

enum class Tok { ident, number, tilde, plus, minus, lparen, rparen, comma, equals, end };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident: return "name";
    case Tok::number: return "number";
    case Tok::tilde: return "'~'";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::equals: return "'='";
    case Tok::end: return "end of formula";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '.' || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
      out.push_back({Tok::number, text.substr(start, i - start), start});
      continue;
    }
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({Tok::ident, text.substr(start, i - start), start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '~': kind = Tok::tilde; break;
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      case '=': kind = Tok::equals; break;
      default: throw FormulaError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, text.substr(start, 1), start});
    ++i;
  }
  out.push_back({Tok::end, {}, text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  FormulaAst parse() {
    FormulaAst ast;
    const Token resp = expect(Tok::ident, "response variable");
    ast.response = std::string(resp.text);
    expect(Tok::tilde, "'~'");
    term(ast);
    while (peek().kind != Tok::end) {
      if (peek().kind == Tok::minus) {
        const Token minus = next();
        if (peek().kind == Tok::number && peek().text == "1") {
          throw FormulaError(minus.offset, "intercept suppression (-1) is not supported");
        }
        throw FormulaError(minus.offset, "term removal with '-' is not supported");
      }
      expect(Tok::plus, "'+'");
      term(ast);
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  Token next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  Token expect(Tok kind, std::string_view what) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw FormulaError(t.offset, "expected " + std::string(what) + ", found " + found(t));
    }
    return next();
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::end) return "end of formula";
    return std::string(describe(t.kind)) + " '" + std::string(t.text) + "'";
  }

  void term(FormulaAst& ast) {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      throw FormulaError(t.offset, "numeric terms are not supported");
    }
    const Token name = expect(Tok::ident, "term");
    if (peek().kind != Tok::lparen) {
      ast.parametric.emplace_back(name.text);
      return;
    }
    SmoothSpec spec;
    if (name.text == "s") spec.kind = SmoothKind::s;
    else if (name.text == "te") spec.kind = SmoothKind::te;
    else throw FormulaError(name.offset, "unknown function '" + std::string(name.text) + "'");
    next();  // '('

    std::optional<int> k;
    bool first = true;
    while (peek().kind != Tok::rparen) {
      if (!first) expect(Tok::comma, "',' or ')'");
      first = false;
      const Token arg = expect(Tok::ident, "argument");
      if (peek().kind == Tok::equals) {
        next();
        if (arg.text != "k") {
          throw FormulaError(arg.offset, "unknown named argument '" + std::string(arg.text) + "'");
        }
        if (k) throw FormulaError(arg.offset, "argument k given twice");
        const Token value = expect(Tok::number, "integer value for k");
        int parsed = 0;
        const auto [ptr, ec] = std::from_chars(value.text.data(), value.text.data() + value.text.size(), parsed);
        if (ec != std::errc() || ptr != value.text.data() + value.text.size()) {
          throw FormulaError(value.offset, "k must be an integer, found '" + std::string(value.text) + "'");
        }
        if (parsed < kMinBasisDim) {
          throw FormulaError(value.offset, "k must be at least " + std::to_string(kMinBasisDim) + ", found " +
                                               std::to_string(parsed));
        }
        k = parsed;
      } else {
        if (k) throw FormulaError(arg.offset, "variables must precede named arguments");
        spec.variables.emplace_back(arg.text);
      }
    }
    next();  // ')'

    const std::size_t want = spec.kind == SmoothKind::s ? 1 : 2;
    if (spec.variables.size() != want) {
      throw FormulaError(name.offset, std::string(name.text) + "() takes exactly " + std::to_string(want) +
                                          (want == 1 ? " variable" : " variables") + ", found " +
                                          std::to_string(spec.variables.size()));
    }
    if (spec.kind == SmoothKind::te && spec.variables[0] == spec.variables[1]) {
      throw FormulaError(name.offset, "te() variables must be distinct");
    }
    const int kk = k.value_or(spec.kind == SmoothKind::s ? kDefaultUnivariateK : kDefaultTensorK);
    spec.k.assign(want, kk);
    smooth_offsets_.push_back(name.offset);
    ast.smooths.push_back(std::move(spec));
  }

 public:
  std::vector<std::size_t> smooth_offsets_;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void check_semantics(const FormulaAst& ast, const std::vector<std::size_t>& smooth_offsets) {
  std::set<std::string> parametric;
  for (const auto& v : ast.parametric) {
    if (v == ast.response) throw FormulaError(0, "response '" + v + "' also appears as a term");
    if (!parametric.insert(v).second) throw FormulaError(0, "duplicate term '" + v + "'");
  }
  std::set<std::pair<SmoothKind, std::set<std::string>>> seen;
  for (std::size_t i = 0; i < ast.smooths.size(); ++i) {
    const auto& s = ast.smooths[i];
    std::set<std::string> vars(s.variables.begin(), s.variables.end());
    for (const auto& v : vars) {
      if (v == ast.response) throw FormulaError(smooth_offsets[i], "response '" + v + "' also appears as a term");
      if (parametric.count(v)) {
        throw FormulaError(smooth_offsets[i],
                           "variable '" + v + "' appears both as a parametric term and inside " + s.label());
      }
    }
    if (!seen.insert({s.kind, vars}).second) {
      throw FormulaError(smooth_offsets[i], "duplicate smooth term " + s.label());
    }
  }
}

}  // namespace

FormulaAst parse_formula(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw FormulaError(0, "empty formula");
  }
  Parser parser(text);
  FormulaAst ast = parser.parse();
  check_semantics(ast, parser.smooth_offsets_);
  return ast;
}

std::string to_string(const FormulaAst& ast) {
  std::string out = ast.response + " ~ ";
  bool first = true;
  auto sep = [&] {
    if (!first) out += " + ";
    first = false;
  };
  for (const auto& p : ast.parametric) {
    sep();
    out += p;
  }
  for (const auto& s : ast.smooths) {
    sep();
    out += s.kind == SmoothKind::s ? "s(" : "te(";
    for (const auto& v : s.variables) out += v + ", ";
    out += "k=" + std::to_string(s.k.front()) + ")";
  }
  return out;
}

int coefficient_count(const FormulaAst& ast) {
  int p = (ast.intercept ? 1 : 0) + static_cast<int>(ast.parametric.size());
  for (const auto& s : ast.smooths) p += s.raw_dim() - 1;
  return p;
}

ModelPlan validate_against_data(const FormulaAst& ast, const std::vector<std::string>& columns, std::size_t n_rows,
                                bool allow_overparameterized) {
  auto find = [&](const std::string& name) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorKind::user, "variable " + name + " not found");
    return static_cast<std::size_t>(it - columns.begin());
  };
  ModelPlan plan;
  plan.ast = ast;
  plan.response_column = find(ast.response);
  for (const auto& v : ast.parametric) plan.parametric_columns.push_back(find(v));
  for (const auto& s : ast.smooths) {
    std::vector<std::size_t> cols;
    for (const auto& v : s.variables) cols.push_back(find(v));
    plan.smooth_columns.push_back(std::move(cols));
  }
  plan.coefficients = coefficient_count(ast);
  if (!allow_overparameterized && static_cast<std::size_t>(plan.coefficients) >= n_rows) {
    throw Error(ErrorKind::user, std::to_string(plan.coefficients) + " coefficients for " + std::to_string(n_rows) +
                                     " rows; the model is not identifiable from the data");
  }
  return plan;
}

}  // namespace smoothforge
