#include "framekit/cli.hpp"

#include "framekit/dual_search.hpp"
#include "framekit/erasure.hpp"
#include "framekit/error.hpp"
#include "framekit/optimal_duals.hpp"
#include "framekit/optimal_pairs.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <sstream>

namespace framekit::cli {

using nlohmann::json;

namespace {

json header(const char* command) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  return j;
}

json vectors_of(const Frame& f) {
  json out = json::array();
  for (const auto& v : f.vectors()) out.push_back(v);
  return out;
}

json one_based(const std::vector<int>& idx) {
  json out = json::array();
  for (int i : idx) out.push_back(i + 1);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json bounds_json(const PairBounds& b) {
  json j;
  j["o1_min"] = b.o1_min;
  j["r1_min"] = b.r1_min;
  j["mu"] = b.mu;
  j["r2_min"] = optional_number(b.r2_min);
  j["branch"] = to_string(b.branch);
  j["r2_min_statement_variant"] = optional_number(b.r2_min_statement_variant);
  return j;
}

json decomposition_json(const ConnectedDecomposition& dec) {
  json blocks = json::array();
  for (const auto& b : dec.blocks) {
    json jb;
    jb["indices"] = one_based(b.indices);
    jb["span_dim"] = b.basis.cols();
    jb["delta"] = b.delta;
    jb["k_invariant"] = b.k_invariant;
    jb["linearly_connected"] = b.connected;
    if (!b.diagnostic.empty()) jb["diagnostic"] = b.diagnostic;
    blocks.push_back(std::move(jb));
  }
  return blocks;
}

MeasureKind parse_measure_kind(const std::string& m) {
  if (m == "opnorm") return MeasureKind::OpNorm;
  if (m == "spectral") return MeasureKind::Spectral;
  throw FrameError(ErrorCode::InvalidArgument, "measure must be opnorm or spectral");
}

void require_k_frame(const FrameInput& in) {
  if (!k_frame_bounds(in.frame, in.op, in.tol)) {
    throw FrameError(ErrorCode::NotKFrame, "vectors do not form a K-frame");
  }
}

}  // namespace

json cmd_analyze(const FrameInput& in) {
  const auto kb = k_frame_bounds(in.frame, in.op, in.tol);
  if (!kb) throw FrameError(ErrorCode::NotKFrame, "vectors do not form a K-frame");
  const Frame g = in.dual ? *in.dual : standard_k_dual(in.frame, in.op);
  const DualSystem ds = make_dual_system(in.frame, g, in.op);
  const ErasureReport rep = erasure_report(ds);

  json j = header("analyze");
  j["dim"] = in.frame.dim();
  j["n_vectors"] = in.frame.size();
  j["frame_bounds"] = {{"lower", kb->lower}, {"upper", kb->upper}};
  j["parseval"] = is_parseval_k_frame(in.frame, in.op);
  j["dual_source"] = in.dual ? "input" : "standard";
  j["dual_kind"] = to_string(ds.kind());
  j["trace_over_n"] = in.op.trace() / in.frame.size();
  j["o1"] = rep.o1;
  j["r1"] = rep.r1;
  j["r2"] = optional_number(rep.r2);
  j["argmax_o1"] = rep.argmax_o1 + 1;
  j["argmax_r1"] = rep.argmax_r1 + 1;
  j["argmax_r2"] = rep.argmax_r2
                       ? json::array({rep.argmax_r2->first + 1, rep.argmax_r2->second + 1})
                       : json(nullptr);
  j["c"] = optional_number(rep.uniform1);
  j["c_prime"] = optional_number(rep.uniform2);
  if (in.op.positive_form()) {
    const PairBounds b = pair_bounds(in.op, in.frame.size());
    j["pair_bounds"] = bounds_json(b);
    j["flags"] = {{"o1_optimal_pair", is_o1_optimal_pair(ds)},
                  {"r1_optimal_pair", is_r1_optimal_pair(ds)},
                  {"r2_optimal_pair", is_r2_optimal_pair(ds)}};
  } else {
    j["pair_bounds"] = nullptr;
    j["flags"] = nullptr;
  }
  return j;
}

json cmd_canonical_dual(const FrameInput& in) {
  require_k_frame(in);
  const Frame g = canonical_k_dual(in.frame, in.op);
  json j = header("canonical-dual");
  j["dual_kind"] = to_string(verify_k_dual(in.frame, g, in.op));
  j["dual"] = vectors_of(g);
  return j;
}

json cmd_optimal_dual(const FrameInput& in, const std::string& measure) {
  const MeasureKind kind = parse_measure_kind(measure);
  require_k_frame(in);
  const auto cert = canonical_certificate(in.frame, in.op, kind);
  const auto& ev = cert.evidence;

  json j = header("optimal-dual");
  j["measure"] = to_string(kind);
  j["verdict"] = to_string(cert.verdict);
  json e;
  e["hypothesis"] = ev.hypothesis;
  e["spans_intersect_trivially"] = ev.spans_trivial;
  e["top_independent"] = ev.top_independent;
  e["rest_independent"] = ev.rest_independent;
  e["canonical_value"] = ev.canonical_value;
  if (ev.dependence) {
    e["dependence"] = std::vector<double>(ev.dependence->data(), ev.dependence->data() + ev.dependence->size());
    e["h"] = std::vector<double>(ev.h->data(), ev.h->data() + ev.h->size());
    e["step"] = *ev.step;
    e["improved_value"] = *ev.improved_value;
  }
  if (ev.numeric_value) e["numeric_value"] = *ev.numeric_value;
  j["evidence"] = e;

  const WeightPartition part = weight_partition(in.frame, in.op, kind);
  j["weights"] = std::vector<double>(part.weights.data(), part.weights.data() + part.weights.size());
  j["top"] = one_based(part.top);

  const ConnectedDecomposition dec = connected_decomposition(in.frame, in.op);
  j["blocks"] = decomposition_json(dec);

  double value = ev.canonical_value;
  Frame dual = canonical_k_dual(in.frame, in.op);
  if (kind == MeasureKind::Spectral) {
    const MinR1 m = min_r1_fixed_frame(in.frame, in.op);
    value = m.value;
    j["closed_form"] = m.closed_form;
    if (!m.warning.empty()) j["warning"] = m.warning;
    if (m.closed_form) {
      dual = construct_spectrally_optimal_dual(in.frame, in.op);
    } else {
      dual = minimize_measure(in.frame, in.op, SearchMeasure::R1).dual;
    }
  } else if (cert.verdict == Verdict::NotOptimal || cert.verdict == Verdict::Undetermined) {
    const SearchResult res = minimize_measure(in.frame, in.op, SearchMeasure::O1);
    if (res.value < value) {
      value = res.value;
      dual = res.dual;
    }
  }
  j["minimal_value"] = value;
  j["dual"] = vectors_of(dual);

  const PerturbationFamily fam = ev.family ? *ev.family : perturbation_family(in.frame, in.op, kind);
  json jf;
  jf["exists"] = fam.exists;
  if (fam.exists) {
    jf["radius"] = std::isfinite(fam.radius) ? json(fam.radius) : json("unbounded");
    json cols = json::array();
    for (Eigen::Index c = 0; c < fam.direction.cols(); ++c) {
      const Vector col = fam.direction.col(c);
      cols.push_back(std::vector<double>(col.data(), col.data() + col.size()));
    }
    jf["direction"] = cols;
  }
  j["perturbation_family"] = jf;
  return j;
}

json cmd_pair_bounds(const Matrix& k, int n_vectors, double tol) {
  const OperatorSpec op = build_operator(k, tol);
  json j = header("pair-bounds");
  j["n_vectors"] = n_vectors;
  j.update(bounds_json(pair_bounds(op, n_vectors)));
  return j;
}

json cmd_search(const FrameInput& in, const std::string& measure, std::uint64_t seed) {
  require_k_frame(in);
  SearchConfig cfg;
  cfg.seed = seed;
  json j = header("search");
  j["measure"] = measure;
  j["seed"] = seed;
  const int big = in.frame.size();
  json cmp;
  if (in.op.positive_form()) cmp["pair_bound"] = bounds_json(pair_bounds(in.op, big));
  SearchResult res = [&] {
    if (measure == "o1") return minimize_measure(in.frame, in.op, SearchMeasure::O1, cfg);
    if (measure == "r1") return minimize_measure(in.frame, in.op, SearchMeasure::R1, cfg);
    if (measure == "r2u") return minimize_r2_within_uniform(in.frame, in.op, cfg);
    throw FrameError(ErrorCode::InvalidArgument, "measure must be o1, r1 or r2u");
  }();
  j["value"] = res.value;
  j["restart"] = res.restart;
  j["iterations"] = res.trace.size();
  j["dual"] = vectors_of(res.dual);
  const Frame canon = canonical_k_dual(in.frame, in.op);
  if (measure == "o1") {
    cmp["canonical_value"] = measure_value(in.frame, canon, SearchMeasure::O1);
    const auto cert = canonical_certificate(in.frame, in.op, MeasureKind::OpNorm);
    cmp["canonical_verdict"] = to_string(cert.verdict);
  } else if (measure == "r1") {
    cmp["canonical_value"] = measure_value(in.frame, canon, SearchMeasure::R1);
    if (in.op.psd()) {
      const MinR1 m = min_r1_fixed_frame(in.frame, in.op);
      if (m.closed_form) cmp["redundancy_bound"] = m.value;
    }
  } else {
    const DualSystem ds = make_dual_system(in.frame, res.dual, in.op);
    const auto u = uniformity(ds);
    if (u.c && u.c_prime) {
      cmp["two_uniform_value"] = two_uniform_spectral_optimality(in.frame, res.dual, in.op).r2_value;
    }
  }
  j["comparison"] = cmp;
  return j;
}

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
      return kExitParse;
    case ErrorCode::NumericalFailure:
    case ErrorCode::IterationCap:
      return kExitNumeric;
    default:
      return kExitDomain;
  }
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
  CLI::App app{"Erasure-optimal K-dual frames: analysis, certificates and numerical search",
               "framekit"};
  app.require_subcommand(1);
  std::string format = "json";
  double tol = kDefaultTol;
  bool tol_set = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    sub->add_option_function<double>(
           "--tol", [&](double v) { tol = v; tol_set = true; }, "Rank/PSD tolerance")
        ->check(CLI::PositiveNumber);
  };

  std::string frame_path;
  std::string k_path;
  std::string measure;
  std::string example;
  int n_vectors = 0;
  std::uint64_t seed = 0;

  auto* analyze = app.add_subcommand("analyze", "Erasure measures, uniformity and pair bounds");
  analyze->add_option("--frame", frame_path, "Frame JSON file")->required();
  add_common(analyze);

  auto* canonical = app.add_subcommand("canonical-dual", "Canonical K-dual of a Parseval K-frame");
  canonical->add_option("--frame", frame_path, "Frame JSON file")->required();
  add_common(canonical);

  auto* optimal = app.add_subcommand("optimal-dual", "Optimality certificate and an optimal dual");
  optimal->add_option("--frame", frame_path, "Frame JSON file")->required();
  optimal->add_option("--measure", measure, "opnorm or spectral")
      ->required()
      ->check(CLI::IsMember({"opnorm", "spectral"}));
  add_common(optimal);

  auto* bounds = app.add_subcommand("pair-bounds", "Lower bounds over all K-dual pairs");
  bounds->add_option("--k", k_path, "Operator JSON file")->required();
  bounds->add_option("--n-vectors", n_vectors, "Number of frame vectors N")
      ->required()
      ->check(CLI::PositiveNumber);
  add_common(bounds);

  auto* search = app.add_subcommand("search", "Numerical minimization over all K-duals");
  search->add_option("--frame", frame_path, "Frame JSON file")->required();
  search->add_option("--measure", measure, "o1, r1 or r2u")
      ->required()
      ->check(CLI::IsMember({"o1", "r1", "r2u"}));
  search->add_option("--seed", seed, "Random seed for restarts");
  add_common(search);

  auto* verify = app.add_subcommand("verify-example", "Check the embedded worked examples");
  verify->add_option("name", example, "example-1, example-2 or mercedes")->required();
  add_common(verify);

  std::ostringstream out;
  std::ostringstream err;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {code == 0 ? kExitOk : kExitParse, out.str(), err.str()};
  }

  const OutputFormat fmt = format == "table" ? OutputFormat::Table : OutputFormat::Json;
  try {
    auto load = [&] {
      FrameInput in = load_frame_input(frame_path);
      if (tol_set) {
        in.op = build_operator(in.op.matrix(), tol);
        in.tol = tol;
      }
      return in;
    };
    json report;
    int code = kExitOk;
    if (analyze->parsed()) {
      report = cmd_analyze(load());
    } else if (canonical->parsed()) {
      report = cmd_canonical_dual(load());
    } else if (optimal->parsed()) {
      report = cmd_optimal_dual(load(), measure);
    } else if (bounds->parsed()) {
      report = cmd_pair_bounds(load_operator_matrix(k_path), n_vectors, tol);
    } else if (search->parsed()) {
      report = cmd_search(load(), measure, seed);
    } else {
      report = cmd_verify_example(example);
      if (!report.value("passed", false)) code = kExitNumeric;
    }
    out << render(report, fmt);
    return {code, out.str(), err.str()};
  } catch (const FrameError& e) {
    err << "error: " << e.what() << '\n';
    return {exit_code_for(e.code()), out.str(), err.str()};
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return {kExitNumeric, out.str(), err.str()};
  }
}

}  // namespace framekit::cli
