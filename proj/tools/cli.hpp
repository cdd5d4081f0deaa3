#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoml/kernels.hpp"

namespace geoml::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

/// Kernel descriptors:
///   linear
///   gaussian:sigma=S | gaussian:gamma=G           exp(-|x-y|^2/S^2) on vectors
///   gauss-ai:sigma=S[,p=P]  (also gauss-bw, gauss-loge)   exp(-d^p/S^2) on SPD
///   loge-exp:sigma=S[,p=P]                         exp(-|log A - log B|^p/S^2)
///   loge-poly:c=C,degree=D                         (<log A, log B> + C)^D
///   stein:sigma=S                                  det(A)^{S/2} det(B)^{S/2} / det((A+B)/2)^S
kern::KernelSpec parse_kernel(const std::string& text);

/// Runs one invocation; argv[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelftestResult {
  std::string name;
  bool pass;
  std::string statistic;
};

/// Fast property subset; deterministic for a given seed.
std::vector<SelftestResult> selftest(std::uint64_t seed);
void write_selftest_csv(std::ostream& out, const std::vector<SelftestResult>& results, std::uint64_t seed);

}  // namespace geoml::cli
