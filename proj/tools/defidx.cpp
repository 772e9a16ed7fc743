// Command-line front end: build antitrees, glue copies, analyse deficiency
// indices, trace recurrence solutions, check the radial reduction.
//
// Exit codes: 0 success/decisive, 2 usage or parse error, 3 undetermined,
// 4 internal inconsistency.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "defidx/engine.hpp"
#include "defidx/io.hpp"
#include "defidx/operators.hpp"
#include "defidx/radial.hpp"

namespace {

using namespace defidx;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUndetermined = 3;
constexpr int kExitInconsistent = 4;

struct UsageError : Error {
  using Error::Error;
};

// "-" means stdout
template <typename Writer>
void write_output(const std::string& path, Writer&& writer) {
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  writer(os);
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind(".json");
  return (dot != std::string::npos && dot + 5 == path.size() ? path.substr(0, dot) : path) + suffix;
}

AntitreeSpec spec_from_flags(const std::optional<double>& alpha, const std::vector<std::uint64_t>& sizes,
                             std::optional<Index> depth) {
  if (alpha && !sizes.empty()) throw UsageError("give either --alpha or --sizes, not both");
  if (alpha) {
    if (!depth) throw UsageError("--depth is required with --alpha");
    return AntitreeSpec::power_law(*alpha, *depth);
  }
  if (sizes.empty()) throw UsageError("one of --alpha or --sizes is required");
  return depth ? AntitreeSpec::explicit_sizes(sizes, *depth) : AntitreeSpec::explicit_sizes(sizes);
}

struct AntitreeArgs {
  std::optional<double> alpha;
  std::vector<std::uint64_t> sizes;
  std::optional<Index> depth;
  std::string out;
  std::string spheres_csv;
  std::string matrix_out;
  bool laplacian = false;
};

void write_matrix(const Graph& g, const std::string& path, bool laplacian) {
  const auto m = truncated_matrix(g, laplacian ? OperatorKind::laplacian : OperatorKind::adjacency);
  write_output(path, [&](std::ostream& os) { write_coordinate(os, m); });
}

int run_antitree(const AntitreeArgs& args) {
  const AntitreeSpec spec = spec_from_flags(args.alpha, args.sizes, args.depth);
  const Graph g = build_antitree(spec);
  write_output(args.out, [&](std::ostream& os) { os << dump_json(graph_to_json(g)) << '\n'; });
  const std::string csv = !args.spheres_csv.empty() ? args.spheres_csv
                          : args.out == "-"        ? std::string()
                                                   : sibling_path(args.out, ".spheres.csv");
  if (!csv.empty()) write_output(csv, [&](std::ostream& os) { write_sphere_csv(os, spec.sizes()); });
  if (!args.matrix_out.empty()) write_matrix(g, args.matrix_out, args.laplacian);
  return kExitOk;
}

struct GlueArgs {
  std::string graph;
  Index copies = 1;
  Index vertex = 0;
  std::string out;
  std::string matrix_out;
  bool laplacian = false;
};

int run_glue(const GlueArgs& args) {
  const Graph base = graph_from_json(read_json_file(args.graph));
  if (!base.contains(args.vertex)) throw UsageError("--vertex is not a vertex of the input graph");
  const Graph g = glue_copies(base, args.copies, args.vertex);
  write_output(args.out, [&](std::ostream& os) { os << dump_json(graph_to_json(g)) << '\n'; });
  if (!args.matrix_out.empty()) write_matrix(g, args.matrix_out, args.laplacian);
  return kExitOk;
}

struct AnalyzeArgs {
  std::string descriptor;
  bool antitree = false;
  std::optional<double> alpha;
  std::vector<std::uint64_t> sizes;
  Index copies = 1;
  std::string out = "-";
  AnalysisOptions options;
  bool no_classifier = false;
  bool serial = false;
};

int run_analyze(AnalyzeArgs args) {
  std::optional<OperatorDescriptor> d;
  if (!args.descriptor.empty()) {
    if (args.antitree) throw UsageError("give either --descriptor or --antitree");
    d = descriptor_from_json(read_json_file(args.descriptor));
  } else if (args.antitree) {
    auto base = OperatorDescriptor::antitree(spec_from_flags(args.alpha, args.sizes, args.alpha ? std::optional<Index>(8) : std::nullopt));
    d = args.copies == 1 ? std::move(base) : OperatorDescriptor::glued(std::move(base), args.copies);
  } else {
    throw UsageError("one of --descriptor or --antitree is required");
  }
  args.options.run_classifier = !args.no_classifier;
  args.options.parallel = !args.serial;
  const auto report = analyze(*d, args.options);
  write_output(args.out, [&](std::ostream& os) { os << dump_json(report_to_json(report)) << '\n'; });
  return report.eta.decisive() ? kExitOk : kExitUndetermined;
}

struct SolveArgs {
  std::optional<double> alpha;
  std::optional<double> exact_alpha;
  std::optional<double> power;
  double coeff = 1.0;
  bool free = false;
  double z_re = 0.0;
  double z_im = 1.0;
  Index n_max = 0;
  std::string out = "-";
};

int run_solve(const SolveArgs& args) {
  const int sources = int(args.alpha.has_value()) + int(args.exact_alpha.has_value()) + int(args.power.has_value()) +
                      int(args.free);
  if (sources != 1) throw UsageError("give exactly one of --alpha, --exact-alpha, --power, --free");
  if (args.n_max < 1) throw UsageError("--n-max must be at least 1");
  const JacobiMatrix j = args.alpha         ? reduce_to_jacobi(AntitreeSpec::power_law(*args.alpha, 1))
                         : args.exact_alpha ? JacobiMatrix::exact_power(*args.exact_alpha)
                         : args.power       ? JacobiMatrix::power_law(*args.power, args.coeff)
                                            : JacobiMatrix::free();
  const Complex z(args.z_re, args.z_im);
  const auto sol = solve_recurrence(j, z, {Complex(1.0), (z - j.b(0)) / j.a(0)}, args.n_max);
  write_output(args.out, [&](std::ostream& os) { write_solution_csv(os, sol); });
  return kExitOk;
}

struct CheckArgs {
  std::optional<double> alpha;
  std::vector<std::uint64_t> sizes;
  Index depth = 8;
  Index trials = 100;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  std::optional<Index> perturb_index;
  double perturb_delta = 1e-3;
  std::string out = "-";
};

int run_check(const CheckArgs& args) {
  const AntitreeSpec spec = spec_from_flags(args.alpha, args.sizes, args.depth);
  std::optional<FaultInjection> fault;
  if (args.perturb_index) fault = FaultInjection{*args.perturb_index, args.perturb_delta};
  ReductionReport report;
  int code = kExitOk;
  try {
    report = check_reduction_consistency(spec, args.depth, args.trials, args.tol, args.seed, fault);
  } catch (const ReductionCheckError& e) {
    report = e.report();
    std::cerr << "defidx: " << e.what() << '\n';
    code = kExitInconsistent;
  }
  write_output(args.out, [&](std::ostream& os) { os << dump_json(reduction_report_to_json(report)) << '\n'; });
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deficiency indices of adjacency matrices on antitrees and glued graphs"};
  app.require_subcommand(1);
  int code = kExitOk;

  AntitreeArgs at;
  auto* cmd_at = app.add_subcommand("antitree", "Build an antitree; write graph JSON and sphere-size CSV");
  cmd_at->add_option("--alpha", at.alpha, "power-law exponent: s_n = floor(n^alpha)")->check(CLI::PositiveNumber);
  cmd_at->add_option("--sizes", at.sizes, "explicit sphere sizes (s_0 = 1)")->delimiter(',');
  cmd_at->add_option("--depth", at.depth, "number of spheres after the root")->check(CLI::PositiveNumber);
  cmd_at->add_option("--out", at.out, "graph JSON path ('-' for stdout)")->required();
  cmd_at->add_option("--spheres-csv", at.spheres_csv, "sphere CSV path (default: <out>.spheres.csv)");
  cmd_at->add_option("--matrix-out", at.matrix_out, "also write the truncated matrix in coordinate format");
  cmd_at->add_flag("--laplacian", at.laplacian, "export the Laplacian instead of the adjacency matrix");
  cmd_at->callback([&] { code = run_antitree(at); });

  GlueArgs gl;
  auto* cmd_gl = app.add_subcommand("glue", "Join copies of a graph by edges at one vertex");
  cmd_gl->add_option("--graph", gl.graph, "input graph JSON")->required()->check(CLI::ExistingFile);
  cmd_gl->add_option("--copies", gl.copies, "number of copies")->required()->check(CLI::PositiveNumber);
  cmd_gl->add_option("--vertex", gl.vertex, "vertex v0 joining consecutive copies")->check(CLI::NonNegativeNumber);
  cmd_gl->add_option("--out", gl.out, "output graph JSON path ('-' for stdout)")->required();
  cmd_gl->add_option("--matrix-out", gl.matrix_out, "also write the truncated matrix in coordinate format");
  cmd_gl->add_flag("--laplacian", gl.laplacian, "export the Laplacian instead of the adjacency matrix");
  cmd_gl->callback([&] { code = run_glue(gl); });

  AnalyzeArgs an;
  auto* cmd_an = app.add_subcommand("analyze", "Determine the deficiency index of an operator");
  cmd_an->add_option("--descriptor", an.descriptor, "descriptor JSON file")->check(CLI::ExistingFile);
  cmd_an->add_flag("--antitree", an.antitree, "analyse the power-law (or explicit) antitree given by flags");
  cmd_an->add_option("--alpha", an.alpha, "power-law exponent")->check(CLI::PositiveNumber);
  cmd_an->add_option("--sizes", an.sizes, "explicit sphere sizes")->delimiter(',');
  cmd_an->add_option("--copies", an.copies, "glue this many copies at the root")->check(CLI::PositiveNumber);
  cmd_an->add_option("--carleman-n-max", an.options.carleman_n_max)->check(CLI::Range(Index{10}, Index{1} << 40));
  cmd_an->add_option("--divergence-threshold", an.options.divergence_threshold)->check(CLI::PositiveNumber);
  cmd_an->add_option("--berezanskii-n-max", an.options.berezanskii_n_max)->check(CLI::Range(Index{10}, Index{1} << 40));
  cmd_an->add_option("--classifier-n-max", an.options.classifier.n_max)->check(CLI::Range(Index{1000}, Index{1} << 30));
  cmd_an->add_option("--tail-fraction", an.options.classifier.tail_fraction)->check(CLI::PositiveNumber);
  cmd_an->add_option("--divergence-factor", an.options.classifier.divergence_factor)->check(CLI::PositiveNumber);
  cmd_an->add_flag("--no-classifier", an.no_classifier, "skip the numerical classifier");
  cmd_an->add_flag("--serial", an.serial, "analyse union components one after another");
  cmd_an->add_option("--out", an.out, "report JSON path ('-' for stdout)");
  cmd_an->callback([&] { code = run_analyze(an); });

  SolveArgs so;
  auto* cmd_so = app.add_subcommand("solve", "Trace a solution of (J - z)u = 0 as CSV");
  cmd_so->add_option("--alpha", so.alpha, "antitree Jacobi matrix, s_n = floor(n^alpha)")->check(CLI::PositiveNumber);
  cmd_so->add_option("--exact-alpha", so.exact_alpha, "a_n = sqrt(n^alpha (n+1)^alpha)")->check(CLI::PositiveNumber);
  cmd_so->add_option("--power", so.power, "a_n = coeff (n+1)^p");
  cmd_so->add_option("--coeff", so.coeff)->check(CLI::PositiveNumber);
  cmd_so->add_flag("--free", so.free, "a_n = 1, b_n = 0");
  cmd_so->add_option("--z-re", so.z_re, "real part of z");
  cmd_so->add_option("--z-im", so.z_im, "imaginary part of z");
  cmd_so->add_option("--n-max", so.n_max, "last index")->required()->check(CLI::PositiveNumber);
  cmd_so->add_option("--out", so.out, "CSV path ('-' for stdout)");
  cmd_so->callback([&] { code = run_solve(so); });

  CheckArgs ck;
  auto* cmd_ck = app.add_subcommand("check-reduction", "Verify the antitree to Jacobi reduction on random functions");
  cmd_ck->add_option("--alpha", ck.alpha, "power-law exponent")->check(CLI::PositiveNumber);
  cmd_ck->add_option("--sizes", ck.sizes, "explicit sphere sizes")->delimiter(',');
  cmd_ck->add_option("--depth", ck.depth)->check(CLI::Range(Index{3}, Index{64}));
  cmd_ck->add_option("--trials", ck.trials)->check(CLI::PositiveNumber);
  cmd_ck->add_option("--tol", ck.tol)->check(CLI::PositiveNumber);
  cmd_ck->add_option("--seed", ck.seed);
  cmd_ck->add_option("--perturb-index", ck.perturb_index, "fault injection: perturb a_k");
  cmd_ck->add_option("--perturb-delta", ck.perturb_delta, "fault injection amount");
  cmd_ck->add_option("--out", ck.out, "report JSON path ('-' for stdout)");
  cmd_ck->callback([&] { code = run_check(ck); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "defidx: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "defidx: parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ReductionCheckError& e) {
    std::cerr << "defidx: " << e.what() << '\n';
    return kExitInconsistent;
  } catch (const InconsistencyError& e) {
    std::cerr << "defidx: internal inconsistency: " << e.what() << '\n';
    return kExitInconsistent;
  } catch (const UsageError& e) {
    std::cerr << "defidx: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "defidx: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    std::cerr << "defidx: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "defidx: error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
