// orbitcert: certificate workbench CLI for operator-inequality checks,
// exact certificate constructions, and unitary-orbit certificate search.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "orbitcert/checks.hpp"
#include "orbitcert/io.hpp"
#include "orbitcert/suite.hpp"

namespace {

using namespace orbitcert;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

uint64_t default_seed() {
  if (const char* env = std::getenv("ORBITCERT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("ORBITCERT_SEED is not a valid unsigned integer");
    }
  }
  return 42;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  const auto range = s.find("..");
  if (range != std::string::npos) {
    const int lo = std::stoi(s.substr(0, range));
    const int hi = std::stoi(s.substr(range + 2));
    for (int d = lo; d <= hi; ++d) dims.push_back(d);
  } else {
    size_t pos = 0;
    while (pos < s.size()) {
      size_t next = s.find(',', pos);
      if (next == std::string::npos) next = s.size();
      dims.push_back(std::stoi(s.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  for (int d : dims)
    if (d < 1 || d > 8) throw UsageError("dims must be within 1..8");
  if (dims.empty()) throw UsageError("empty dims specification");
  return dims;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

int cmd_verify(const std::string& check, const std::string& a_path,
               const std::string& b_path, double p, double q, int j, int k,
               const std::string& json_out) {
  const ComplexMatrix a = read_cmat_file(a_path);
  const ComplexMatrix b = read_cmat_file(b_path);
  CheckResult r;
  if (check == "parallelogram") {
    r = check_parallelogram_identity(a, b);
  } else if (check == "clarkson") {
    r = check_clarkson_trace(a, b, p);
  } else if (check == "weak-majorization") {
    r = check_weak_majorization(a, b, p);
  } else if (check == "antinorm-sum") {
    r = check_antinorm_superadditivity(a, b, p, AntinormVariant::sum);
  } else if (check == "antinorm-geomean") {
    r = check_antinorm_superadditivity(a, b, p, AntinormVariant::geomean);
  } else if (check == "cor3") {
    r = check_weyl_split(a, b, p, j, k, WeylVariant::cor3);
  } else if (check == "cor4") {
    r = check_weyl_split(a, b, q, j, k, WeylVariant::cor4);
  } else if (check == "cor5") {
    r = check_weyl_split(a, b, p, j, k, WeylVariant::cor5);
  } else if (check == "direct-sum-majorization") {
    r = check_direct_sum_majorization(a, b, q > 0.0 ? q : p);
  } else {
    throw UsageError("unknown check: " + check);
  }
  const json out = check_result_to_json(r);
  if (!json_out.empty()) write_json_file(json_out, out);
  std::cout << out.dump(2) << '\n';
  return r.holds ? kExitPass : kExitCheckFailed;
}

int finish_certificate(const Certificate& cert, const SearchTrace* trace,
                       const std::string& out_path) {
  json out = certificate_to_json(cert);
  if (trace) out["trace"] = search_trace_to_json(*trace);
  write_json_file(out_path, out);
  std::string why;
  const bool ok = verify_certificate(cert, &why);
  std::cout << "statement: " << cert.statement
            << "  gap: " << cert.gap_min_eig
            << "  verified: " << (ok ? "yes" : "no") << '\n';
  if (!ok) std::cout << "reason: " << why << '\n';
  if (trace && !trace->converged) return kExitNotConverged;
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_construct(const std::string& statement, const std::string& a_path,
                  const std::string& b_path, double p,
                  const std::string& out_path, uint64_t seed) {
  const ComplexMatrix a = read_cmat_file(a_path);
  SearchConfig scfg;
  scfg.seed = seed;
  if (statement == "theorem3") {
    const ComplexMatrix b = read_cmat_file(b_path);
    return finish_certificate(parallelogram_isometries(a, b), nullptr,
                              out_path);
  }
  if (statement == "cartesian") {
    const auto [squared, root] = cartesian_certificates(a);
    json out{{"squared", certificate_to_json(squared)},
             {"sqrt", certificate_to_json(root)}};
    write_json_file(out_path, out);
    std::string why;
    const bool ok =
        verify_certificate(squared, &why) && verify_certificate(root, &why);
    std::cout << "cartesian gaps: " << squared.gap_min_eig << ", "
              << root.gap_min_eig << "  verified: " << (ok ? "yes" : "no")
              << '\n';
    return ok ? kExitPass : kExitCheckFailed;
  }
  if (statement == "key2") {
    const ComplexMatrix b = read_cmat_file(b_path);
    const ScalarFn g = [p](double t) {
      return std::pow(std::max(t, 0.0), p / 2.0);
    };
    return finish_certificate(
        key2_certificate(PsdMatrix(a.mat()), PsdMatrix(b.mat()), g, p > 2.0),
        nullptr, out_path);
  }
  if (statement == "theorem1") {
    const ComplexMatrix b = read_cmat_file(b_path);
    SearchTrace trace;
    trace.converged = true;
    const Key1Provider provider = [&scfg, &trace](const PsdMatrix& x,
                                                  const PsdMatrix& y,
                                                  const ScalarFn& g,
                                                  bool convex) {
      auto [cert, tr] = key1_certificate(x, y, g, convex, scfg);
      trace = tr;
      return std::make_pair(cert.transforms[0].matrix,
                            cert.transforms[1].matrix);
    };
    return finish_certificate(theorem1_certificate(a, b, p, provider), &trace,
                              out_path);
  }
  if (statement == "direct-sum-cm") {
    const ComplexMatrix b = read_cmat_file(b_path);
    return finish_certificate(direct_sum_cm_certificate(a, b, p), nullptr,
                              out_path);
  }
  throw UsageError("unknown construct statement: " + statement);
}

int cmd_search(const std::string& statement, const std::string& a_path,
               const std::string& b_path, double q, const SearchConfig& scfg,
               const std::string& out_path) {
  const ComplexMatrix a = read_cmat_file(a_path);
  const ComplexMatrix b = read_cmat_file(b_path);
  if (statement == "key1") {
    // q < 2 selects the concave (reversed) form, otherwise convex t^{q/2}.
    const bool convex = q > 2.0;
    const ScalarFn g = [q](double t) {
      return std::pow(std::max(t, 0.0), q / 2.0);
    };
    auto [cert, trace] =
        key1_certificate(PsdMatrix(a.mat()), PsdMatrix(b.mat()), g, convex,
                         scfg);
    return finish_certificate(cert, &trace, out_path);
  }
  if (statement == "theorem2") {
    auto [cert, trace] = theorem2_certificate(a, b, q, scfg);
    return finish_certificate(cert, &trace, out_path);
  }
  if (statement == "direct-sum-q") {
    auto [cert, trace] = direct_sum_power_certificates(
        a, b, q, scfg, DirectSumStatement::four_term);
    return finish_certificate(cert, &trace, out_path);
  }
  throw UsageError("unknown search statement: " + statement);
}

int cmd_stress(const std::string& suite, const SuiteConfig& cfg,
               const std::string& json_out) {
  const SuiteReport report = run_suite(suite, cfg);
  const json out = suite_report_to_json(report);
  if (!json_out.empty()) write_json_file(json_out, out);
  std::cout << "suite " << report.suite << ": " << report.passed << "/"
            << report.total << " passed, " << report.failed << " failed, "
            << report.not_converged << " not converged\n";
  if (report.failed > 0 || report.scalar_disagreements > 0)
    return kExitCheckFailed;
  if (report.not_converged > 0) return kExitNotConverged;
  return kExitPass;
}

int cmd_check_cert(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw UsageError("cannot open " + in_path);
  json j;
  in >> j;
  if (j.contains("squared")) {  // cartesian pair file
    std::string why;
    bool ok = true;
    for (const char* key : {"squared", "sqrt"}) {
      const Certificate c = certificate_from_json(j.at(key));
      if (!verify_certificate(c, &why)) {
        std::cout << key << ": FAILED (" << why << ")\n";
        ok = false;
      } else {
        std::cout << key << ": ok, gap " << c.gap_min_eig << '\n';
      }
    }
    return ok ? kExitPass : kExitCheckFailed;
  }
  const Certificate c = certificate_from_json(j);
  std::string why;
  if (!verify_certificate(c, &why)) {
    std::cout << "certificate FAILED: " << why << '\n';
    return kExitCheckFailed;
  }
  std::cout << "certificate ok: " << c.statement << ", gap " << c.gap_min_eig
            << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitcert: operator-inequality certificate workbench"};
  app.require_subcommand(1);

  std::string check, statement, a_path, b_path, json_out, out_path, in_path;
  std::string suite = "all", dims_spec;
  double p = 4.0, q = 0.0;
  int j = 0, k = 0, trials = -1, restarts = -1;
  uint64_t seed = 0;
  bool seed_set = false, no_timestamp = false;

  auto* verify = app.add_subcommand("verify", "run a single inequality check");
  verify->add_option("--check", check)->required();
  verify->add_option("--a", a_path)->required();
  verify->add_option("--b", b_path)->required();
  verify->add_option("--p", p);
  verify->add_option("--q", q);
  verify->add_option("--j", j);
  verify->add_option("--k", k);
  verify->add_option("--json", json_out);

  auto* construct =
      app.add_subcommand("construct", "build an exact certificate");
  construct->add_option("--statement", statement)->required();
  construct->add_option("--a", a_path)->required();
  construct->add_option("--b", b_path);
  construct->add_option("--p", p);
  construct->add_option("--out", out_path)->required();

  auto* search = app.add_subcommand("search", "search for a certificate");
  search->add_option("--statement", statement)->required();
  search->add_option("--a", a_path)->required();
  search->add_option("--b", b_path)->required();
  search->add_option("--q", q);
  search->add_option("--seed", seed)->each([&](const std::string&) {
    seed_set = true;
  });
  search->add_option("--restarts", restarts);
  search->add_option("--out", out_path)->required();

  auto* stress = app.add_subcommand("stress", "run a property suite");
  stress->add_option("--suite", suite);
  stress->add_option("--dims", dims_spec);
  stress->add_option("--trials", trials);
  stress->add_option("--seed", seed)->each([&](const std::string&) {
    seed_set = true;
  });
  stress->add_option("--json", json_out);
  stress->add_flag("--no-timestamp", no_timestamp);

  auto* check_cert =
      app.add_subcommand("check-cert", "re-verify a serialized certificate");
  check_cert->add_option("--in", in_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const uint64_t effective_seed = seed_set ? seed : default_seed();
    if (verify->parsed())
      return cmd_verify(check, a_path, b_path, p, q, j, k, json_out);
    if (construct->parsed())
      return cmd_construct(statement, a_path, b_path, p, out_path,
                           effective_seed);
    if (search->parsed()) {
      SearchConfig scfg;
      scfg.seed = effective_seed;
      if (restarts >= 0) scfg.restarts = restarts;
      return cmd_search(statement, a_path, b_path, q > 0.0 ? q : p, scfg,
                        out_path);
    }
    if (stress->parsed()) {
      SuiteConfig cfg;
      cfg.master_seed = effective_seed;
      cfg.include_timestamp = !no_timestamp;
      if (!dims_spec.empty()) cfg.dims = parse_dims(dims_spec);
      if (trials > 0) cfg.trials = trials;
      return cmd_stress(suite, cfg, json_out);
    }
    if (check_cert->parsed()) return cmd_check_cert(in_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
