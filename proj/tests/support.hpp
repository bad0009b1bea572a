#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "fluxlock/circuit_model.hpp"
#include "fluxlock/errors.hpp"
#include "fluxlock/flux_geometry.hpp"

namespace fluxlock::testing {

// Runs fn and reports which library error (if any) it raised.
template <typename Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Measured device parameters used as realistic fixtures throughout the suite.
struct SampleParams {
  const char* name;
  double e_j_ghz;
  double e_c_ghz;
  double e_l_ghz;
};

inline constexpr std::array<SampleParams, 8> kSamples = {{
    {"a", 9.21, 3.97, 1.95},
    {"b", 9.19, 4.05, 1.59},
    {"c", 7.50, 4.48, 1.96},
    {"d", 8.87, 3.88, 1.87},
    {"e", 9.06, 4.09, 1.84},
    {"f", 8.45, 4.16, 2.05},
    {"g", 8.90, 4.09, 1.58},
    {"h", 9.22, 3.97, 2.01},
}};

inline EnergyParams params_of(const SampleParams& s) {
  return EnergyParams{s.e_j_ghz, s.e_c_ghz, s.e_l_ghz};
}

inline EnergyParams sample(char name) {
  for (const auto& s : kSamples) {
    if (s.name[0] == name) return params_of(s);
  }
  std::abort();
}

// A realistic asymmetric gradiometer: loop-area imbalance plus a small
// junction asymmetry, chosen so the effective pickup area is ~4 um^2.
inline GradiometerGeometry test_geometry(double alpha = -0.0062) {
  GradiometerGeometry g;
  g.area_left_um2 = 1582.73;
  g.area_right_um2 = 1555.27;
  g.ring_area_um2 = 3145.8;
  g.alpha = alpha;
  return g;
}

// Scratch directory for tests that exercise file I/O or the CLI binary.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    namespace fs = std::filesystem;
    base_ = fs::temp_directory_path() / ("fluxlock_test_" + tag);
    fs::remove_all(base_);
    fs::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  std::string path(const std::string& leaf) const { return (base_ / leaf).string(); }

 private:
  std::filesystem::path base_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs a shell command, returning its exit status and captured stdout/stderr.
struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline RunResult run_command(const std::string& cmd, const TempDir& dir, const std::string& tag) {
  const std::string out_path = dir.path(tag + ".out");
  const std::string err_path = dir.path(tag + ".err");
  const std::string full = cmd + " >" + out_path + " 2>" + err_path;
  int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  return r;
}

}  // namespace fluxlock::testing
