#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace smoothforge {

enum class SmoothKind { s, te };

inline constexpr int kMinBasisDim = 4;
inline constexpr int kDefaultUnivariateK = 10;
inline constexpr int kDefaultTensorK = 5;

/// One smooth term. `k` holds one entry per margin.
struct SmoothSpec {
  SmoothKind kind = SmoothKind::s;
  std::vector<std::string> variables;
  std::vector<int> k;

  bool operator==(const SmoothSpec&) const = default;

  /// mgcv-style label, e.g. "s(x0)" or "te(x1,x2)".
  std::string label() const;
  /// Coefficients before the centering constraint is absorbed.
  int raw_dim() const;
};

struct FormulaAst {
  std::string response;
  bool intercept = true;
  std::vector<std::string> parametric;
  std::vector<SmoothSpec> smooths;

  bool operator==(const FormulaAst&) const = default;
};

/// Parses `resp ~ term (+ term)*` where a term is a name, `s(name[, k=int])`
/// or `te(name, name[, k=int])`. Throws FormulaError carrying the byte offset.
FormulaAst parse_formula(std::string_view text);

/// Canonical text form: parametric terms first, then smooths in order.
/// Re-parsing the result yields an equal AST.
std::string to_string(const FormulaAst& ast);

/// Total model coefficients: intercept + parametric + centered smooth blocks.
int coefficient_count(const FormulaAst& ast);

/// A formula bound to the columns of a concrete dataset.
struct ModelPlan {
  FormulaAst ast;
  std::size_t response_column = 0;
  std::vector<std::size_t> parametric_columns;
  std::vector<std::vector<std::size_t>> smooth_columns;
  int coefficients = 0;
};

/// Resolves every variable against `columns` and checks identifiability
/// (coefficients < rows) unless `allow_overparameterized` is set.
ModelPlan validate_against_data(const FormulaAst& ast, const std::vector<std::string>& columns, std::size_t n_rows,
                                bool allow_overparameterized = false);

}  // namespace smoothforge
