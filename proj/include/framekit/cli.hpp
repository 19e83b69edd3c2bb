#pragma once

// Command-line layer: frame file I/O, the analysis commands and the
// embedded worked-example checks. Kept in a library so tests can drive the
// commands without spawning a process.

#include "framekit/frame.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace framekit::cli {

inline constexpr const char* kSchema = "framekit/1";

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitDomain = 3,
  kExitNumeric = 4,
};

struct FrameInput {
  Frame frame;
  OperatorSpec op;
  std::optional<Frame> dual;
  double tol = kDefaultTol;
};

// {"dim": n, "vectors": [[...], ...], "K": [[...], ...], "tol"?, "dual"?}
FrameInput parse_frame_input(const std::string& text);
FrameInput load_frame_input(const std::string& path);

// Full-precision JSON for a frame file; parses back bit-for-bit.
std::string serialize_frame_input(const Frame& f, const Matrix& k,
                                  std::optional<double> tol = std::nullopt,
                                  const Frame* dual = nullptr);

Matrix parse_matrix(const nlohmann::json& j, const std::string& what);

// Accepts either {"K": [[...]]} or a bare row-major matrix.
Matrix load_operator_matrix(const std::string& path);

enum class OutputFormat { Json, Table };

struct Options {
  OutputFormat format = OutputFormat::Json;
  std::optional<double> tol;
};

nlohmann::json cmd_analyze(const FrameInput& in);
nlohmann::json cmd_canonical_dual(const FrameInput& in);
nlohmann::json cmd_optimal_dual(const FrameInput& in, const std::string& measure);
nlohmann::json cmd_pair_bounds(const Matrix& k, int n_vectors, double tol);
nlohmann::json cmd_search(const FrameInput& in, const std::string& measure, std::uint64_t seed);

// Runs the embedded checks for one worked example; "passed" is false when any
// assertion fails. Throws InvalidArgument for an unknown name.
nlohmann::json cmd_verify_example(const std::string& name);

std::vector<std::string> example_names();

// Rounds every real to the given number of significant digits.
nlohmann::json round_reals(const nlohmann::json& j, int digits);

std::string render(const nlohmann::json& report, OutputFormat format);

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

// Full CLI entry point over an argument vector (without the program name).
RunResult run(const std::vector<std::string>& args);

}  // namespace framekit::cli
