#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "smoothforge/sampler.hpp"

namespace smoothforge {

/// Header `chain,iter,<monitored columns...>`; monitored columns are
/// b[1..p], rho[1..], scale, mu[1..n] in that order when present.
std::string write_samples_csv(const SampleStore& store);

/// Accepts this tool's output and chain exports from other samplers: any
/// header of node[index] / scalar tokens, optional chain and iter columns
/// (default chain 1, iter 1..N).
SampleStore read_samples_csv(std::string_view text);
SampleStore load_samples(const std::filesystem::path& path);

}  // namespace smoothforge
