#include "smoothforge/samples_io.hpp"

#include <cmath>

#include "smoothforge/error.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

std::string write_samples_csv(const SampleStore& store) {
  std::string out = "chain,iter";
  for (const auto& c : store.columns) out += ',' + c;
  out += '\n';
  for (Eigen::Index r = 0; r < store.values.rows(); ++r) {
    out += std::to_string(store.chain[static_cast<std::size_t>(r)]);
    out += ',';
    out += std::to_string(store.iter[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < store.values.cols(); ++c) {
      out += ',';
      out += format_double(store.values(r, c));
    }
    out += '\n';
  }
  return out;
}

SampleStore read_samples_csv(std::string_view text) {
  const DataTable t = parse_csv(text);
  SampleStore store;
  int chain_col = -1, iter_col = -1;
  std::vector<std::size_t> value_cols;
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    const std::string& name = t.names[j];
    if (name == "chain") chain_col = static_cast<int>(j);
    else if (name == "iter" || name == "iteration") iter_col = static_cast<int>(j);
    else {
      store.columns.push_back(name);
      value_cols.push_back(j);
    }
  }
  const std::size_t N = t.rows();
  store.values.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(value_cols.size()));
  for (std::size_t r = 0; r < N; ++r) {
    store.chain.push_back(chain_col >= 0 ? static_cast<int>(t.columns[chain_col][r]) : 1);
    store.iter.push_back(iter_col >= 0 ? static_cast<int>(t.columns[iter_col][r]) : static_cast<int>(r) + 1);
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      const double v = t.columns[value_cols[c]][r];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::user, "samples row " + std::to_string(r + 1) + " has a missing value in " +
                                         store.columns[c]);
      }
      store.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  store.n_iter = static_cast<int>(N);
  return store;
}

SampleStore load_samples(const std::filesystem::path& path) { return read_samples_csv(read_file(path)); }

}  // namespace smoothforge
