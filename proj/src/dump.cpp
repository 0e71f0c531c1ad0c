#include "smoothforge/dump.hpp"

#include <cmath>

#include "smoothforge/error.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

namespace {

std::string number(double v, bool integer) {
  if (!std::isfinite(v)) throw Error(ErrorKind::internal, "non-finite value in data dump");
  if (integer) return std::to_string(static_cast<long long>(std::llround(v)));
  return format_double(v);
}

void append_values(std::string& out, const NamedArray& a) {
  out += "c(";
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (i) out += ", ";
    out += number(a.values[i], a.integer);
  }
  out += ')';
}

}  // namespace

std::string write_dump(const std::vector<NamedArray>& arrays) {
  std::string out;
  for (const auto& a : arrays) {
    out += '"' + a.name + "\" <- ";
    if (a.dims.empty()) {
      out += number(a.values.at(0), a.integer);
    } else if (a.dims.size() == 1) {
      append_values(out, a);
    } else {
      out += "structure(";
      append_values(out, a);
      out += ", .Dim = c(";
      for (std::size_t d = 0; d < a.dims.size(); ++d) {
        if (d) out += ", ";
        out += std::to_string(a.dims[d]);
      }
      out += "))";
    }
    out += '\n';
  }
  return out;
}

}  // namespace smoothforge
