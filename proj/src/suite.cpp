#include "orbitcert/suite.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "orbitcert/checks.hpp"

namespace orbitcert {

namespace {

using nlohmann::json;

json generator_json(const GeneratorSpec& spec) {
  return {{"kind", gen_kind_name(spec.kind)},
          {"dim", spec.dim},
          {"seed", spec.seed},
          {"scale", spec.scale}};
}

// Direct real-arithmetic evaluation of the n = 1 cases.
std::optional<double> scalar_margin(const std::string& name, Complex a,
                                    Complex b, double p) {
  const double ma = std::abs(a), mb = std::abs(b);
  const double plus = std::abs(a + b), minus = std::abs(a - b);
  auto pw = [p](double t) { return std::pow(t, p); };
  const double mean = 0.5 * (pw(ma) + pw(mb));
  const double hp = pw(0.5 * plus), hm = pw(0.5 * minus);

  if (name == "clarkson_trace") {
    const double raw_lhs = 2.0 * (pw(ma) + pw(mb));
    const double raw_mid = pw(plus) + pw(minus);
    const double raw_rhs = std::pow(2.0, p - 1.0) * (pw(ma) + pw(mb));
    double m = std::numeric_limits<double>::infinity();
    if (p >= 2.0)
      m = std::min({raw_mid - raw_lhs, raw_rhs - raw_mid, mean - hp - hm});
    if (p <= 2.0)
      m = std::min({m, raw_lhs - raw_mid, raw_mid - raw_rhs, hp + hm - mean});
    return m;
  }
  if (name == "weak_majorization" || name == "antinorm_sum" ||
      name == "antinorm_geomean" || name == "weyl_cor3")
    return mean - hp - hm;
  if (name == "weyl_cor4") return hp + hm - mean;
  if (name == "weyl_cor5") return mean - std::max(hp, hm);
  if (name == "parallelogram_identity")
    return -std::abs(plus * plus + minus * minus -
                     2.0 * (ma * ma + mb * mb));
  if (name == "direct_sum_majorization") {
    if (p > 2.0)
      return std::min(mean - std::max(hp, hm), mean - hp - hm);
    return std::min(std::min(hp, hm), hp + hm - mean);
  }
  return std::nullopt;
}

class Runner {
 public:
  explicit Runner(const SuiteConfig& cfg) : cfg_(cfg) {
    report_.config = cfg;
  }

  SuiteReport finish(std::string suite_name,
                     std::chrono::steady_clock::time_point start) {
    report_.suite = std::move(suite_name);
    report_.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return std::move(report_);
  }

  uint64_t next_seed() { return derive_seed(cfg_.master_seed, cell_index_++); }

  std::pair<ComplexMatrix, ComplexMatrix> make_pair(GenKind kind, int dim,
                                                    GeneratorSpec* out_a,
                                                    GeneratorSpec* out_b) {
    if (kind == GenKind::commuting_pair) {
      GeneratorSpec spec{kind, dim, next_seed(), 1.0};
      auto pair = generate(spec);
      *out_a = spec;
      *out_b = spec;
      return {pair[0], pair[1]};
    }
    GeneratorSpec sa{kind, dim, next_seed(), 1.0};
    GeneratorSpec sb{kind, dim, next_seed(), 1.0};
    auto a = generate(sa);
    auto b = generate(sb);
    *out_a = sa;
    *out_b = sb;
    return {a[0], b[0]};
  }

  void count(const std::string& op) { ++report_.op_counts[op]; }

  void record_check(const GeneratorSpec& ga, const GeneratorSpec& gb, double p,
                    const CheckResult& r, Complex a = 0.0, Complex b = 0.0,
                    bool is_scalar = false) {
    count(r.name);
    json rec{{"op", r.name},
             {"generator_a", generator_json(ga)},
             {"generator_b", generator_json(gb)},
             {"exponent", p},
             {"holds", r.holds},
             {"margin", r.margin}};
    if (is_scalar) {
      const auto oracle = scalar_margin(r.name, a, b, p);
      if (oracle) {
        const double dev = std::abs(*oracle - r.margin);
        const bool agree = dev <= 1e-10 * (1.0 + std::abs(*oracle));
        rec["scalar_oracle_margin"] = *oracle;
        rec["scalar_oracle_agrees"] = agree;
        if (!agree) ++report_.scalar_disagreements;
      }
    }
    rec["outcome"] = r.holds ? "pass" : "fail";
    push(rec, r.holds ? Outcome::pass : Outcome::fail);
  }

  void record_cert(const std::string& op, const GeneratorSpec& ga,
                   const GeneratorSpec& gb, double exponent,
                   const Certificate& c, const SearchTrace* trace = nullptr) {
    count(op);
    std::string why;
    const bool ok = verify_certificate(c, &why);
    json rec{{"op", op},
             {"statement", c.statement},
             {"generator_a", generator_json(ga)},
             {"generator_b", generator_json(gb)},
             {"exponent", exponent},
             {"gap_min_eig", c.gap_min_eig},
             {"verified", ok}};
    if (!ok) rec["why"] = why;
    Outcome outcome = ok ? Outcome::pass : Outcome::fail;
    if (trace) {
      rec["trace"] = search_trace_to_json(*trace);
      if (!trace->converged && !ok) {
        // A heuristic miss, not a refutation: existence is guaranteed, so
        // report non-convergence rather than a failure.
        outcome = Outcome::not_converged;
      }
    }
    rec["outcome"] = outcome == Outcome::pass           ? "pass"
                     : outcome == Outcome::not_converged ? "not_converged"
                                                         : "fail";
    push(rec, outcome);
  }

  void record_error(const std::string& op, const GeneratorSpec& ga,
                    const GeneratorSpec& gb, double exponent,
                    const std::string& what) {
    count(op);
    push(json{{"op", op},
              {"generator_a", generator_json(ga)},
              {"generator_b", generator_json(gb)},
              {"exponent", exponent},
              {"error", what},
              {"outcome", "fail"}},
         Outcome::fail);
  }

  void record_flag(const std::string& op, bool ok, json extra) {
    count(op);
    extra["op"] = op;
    extra["outcome"] = ok ? "pass" : "fail";
    push(extra, ok ? Outcome::pass : Outcome::fail);
  }

  // ---- individual suites ----

  void run_identities() {
    for (int dim : cfg_.dims)
      for (int t = 0; t < cfg_.trials; ++t) {
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        const CheckResult r = check_parallelogram_identity(a, b);
        record_check(ga, gb, 2.0, r, a.mat()(0, 0), b.mat()(0, 0), dim == 1);
      }
  }

  void run_trace() {
    std::vector<double> grid = cfg_.p_grid;
    grid.insert(grid.end(), cfg_.q_grid.begin(), cfg_.q_grid.end());
    grid.push_back(2.0);
    for (int dim : cfg_.dims)
      for (int t = 0; t < cfg_.trials; ++t) {
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        for (double p : grid) {
          const CheckResult r = check_clarkson_trace(a, b, p);
          record_check(ga, gb, p, r, a.mat()(0, 0), b.mat()(0, 0), dim == 1);
        }
      }
  }

  void run_majorization() {
    for (int dim : cfg_.dims)
      for (int t = 0; t < cfg_.trials; ++t) {
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        const Complex sa = a.mat()(0, 0), sb = b.mat()(0, 0);
        for (double p : cfg_.p_grid) {
          record_check(ga, gb, p, check_weak_majorization(a, b, p), sa, sb,
                       dim == 1);
          record_check(ga, gb, p,
                       check_antinorm_superadditivity(a, b, p,
                                                      AntinormVariant::sum),
                       sa, sb, dim == 1);
          record_check(ga, gb, p,
                       check_antinorm_superadditivity(a, b, p,
                                                      AntinormVariant::geomean),
                       sa, sb, dim == 1);
          record_check(ga, gb, p, check_direct_sum_majorization(a, b, p), sa,
                       sb, dim == 1);
        }
        for (double q : cfg_.q_grid)
          record_check(ga, gb, q, check_direct_sum_majorization(a, b, q), sa,
                       sb, dim == 1);
      }
  }

  void run_eigenvalue() {
    for (int dim : cfg_.dims)
      for (int t = 0; t < cfg_.trials; ++t) {
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        const Complex sa = a.mat()(0, 0), sb = b.mat()(0, 0);
        for (double p : cfg_.p_grid) {
          for (int j = 0; j < dim; ++j) {
            for (int k = 0; j + k + 1 <= dim; ++k)
              record_check(ga, gb, p,
                           check_weyl_split(a, b, p, j, k, WeylVariant::cor3),
                           sa, sb, dim == 1);
            record_check(ga, gb, p,
                         check_weyl_split(a, b, p, j, 0, WeylVariant::cor5),
                         sa, sb, dim == 1);
          }
        }
        for (double q : cfg_.q_grid)
          for (int j = 0; j < dim; ++j)
            for (int k = 0; j + k + 1 <= dim; ++k)
              record_check(ga, gb, q,
                           check_weyl_split(a, b, q, j, k, WeylVariant::cor4),
                           sa, sb, dim == 1);
      }
  }

  void run_certificates() {
    const std::vector<double> p_small{2.5, 3.0, 4.0};
    for (int dim : cfg_.dims) {
      if (dim > 4) continue;  // construction suite stays desk-scale
      for (int t = 0; t < cfg_.trials; ++t) {
        // key2 alignment on PSD pairs
        GeneratorSpec gx{GenKind::psd, dim, next_seed(), 1.0};
        GeneratorSpec gy{GenKind::psd, dim, next_seed(), 1.0};
        const PsdMatrix x(generate(gx)[0].mat());
        const PsdMatrix y(generate(gy)[0].mat());
        for (double p : p_small) {
          const ScalarFn g = [p](double s) {
            return std::pow(std::max(s, 0.0), p / 2.0);
          };
          try {
            record_cert("key2_certificate", gx, gy, p,
                        key2_certificate(x, y, g, true));
          } catch (const std::exception& e) {
            record_error("key2_certificate", gx, gy, p, e.what());
          }
        }

        // align_unitary with dominance enforced by a shift
        try {
          const PsdMatrix shifted(
              y.mat() +
              (eigenvalues_desc(x.mat()).maxCoeff() + 1.0) *
                  Matrix::Identity(dim, dim));
          const ComplexMatrix w = align_unitary(x, shifted);
          const double gap =
              psd_gap(HermitianMatrix(w.mat() * x.mat() * w.mat().adjoint()),
                      shifted.hermitian());
          record_flag("align_unitary", gap >= -1e-9,
                      {{"gap", gap},
                       {"generator_a", generator_json(gx)},
                       {"generator_b", generator_json(gy)}});
        } catch (const std::exception& e) {
          record_flag("align_unitary", false, {{"error", e.what()}});
        }

        // Theorem 3 equality and the block decomposition behind it
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        try {
          record_cert("parallelogram_isometries", ga, gb, 2.0,
                      parallelogram_isometries(a, b));
        } catch (const std::exception& e) {
          record_error("parallelogram_isometries", ga, gb, 2.0, e.what());
        }

        GeneratorSpec gh{GenKind::psd, 2 * dim, next_seed(), 1.0};
        try {
          const PsdMatrix h(generate(gh)[0].mat());
          const auto [u, v] = block_decomposition(h);
          const Eigen::Index half = dim;
          Matrix xpad = Matrix::Zero(2 * half, 2 * half);
          xpad.topLeftCorner(half, half) = h.mat().topLeftCorner(half, half);
          Matrix zpad = Matrix::Zero(2 * half, 2 * half);
          zpad.bottomRightCorner(half, half) =
              h.mat().bottomRightCorner(half, half);
          const double resid = max_abs(
              h.mat() - u.mat() * xpad * u.mat().adjoint() -
              v.mat() * zpad * v.mat().adjoint());
          const bool ok = resid <= tol::recon * (1.0 + max_abs(h.mat()));
          record_flag("block_decomposition", ok,
                      {{"residual", resid}, {"generator_a", generator_json(gh)}});
        } catch (const std::exception& e) {
          record_flag("block_decomposition", false, {{"error", e.what()}});
        }

        // Cartesian decomposition certificates
        GeneratorSpec gz{GenKind::ginibre, dim, next_seed(), 1.0};
        try {
          const ComplexMatrix z = generate(gz)[0];
          const auto [squared, root] = cartesian_certificates(z);
          record_cert("cartesian_certificates", gz, gz, 2.0, squared);
          record_cert("cartesian_certificates", gz, gz, 1.0, root);
        } catch (const std::exception& e) {
          record_error("cartesian_certificates", gz, gz, 2.0, e.what());
        }

        // Theorem 1 composites and the direct-sum extension
        if (dim <= 3) {
          for (double p : p_small) {
            run_theorem1_cell(GenKind::commuting_pair, dim, p);
            run_theorem1_cell(GenKind::ginibre, dim, p);
            GeneratorSpec gc, gd;
            auto [c, d] = make_pair(GenKind::ginibre, dim, &gc, &gd);
            try {
              record_cert("direct_sum_cm_certificate", gc, gd, p,
                          direct_sum_cm_certificate(c, d, p));
            } catch (const std::exception& e) {
              record_error("direct_sum_cm_certificate", gc, gd, p, e.what());
            }
          }
        }
      }
    }
  }

  void run_theorem1_cell(GenKind kind, int dim, double p) {
    GeneratorSpec ga, gb;
    auto [a, b] = make_pair(kind, dim, &ga, &gb);
    SearchConfig scfg = cfg_.search;
    scfg.seed = next_seed();
    SearchTrace trace;
    const Key1Provider provider =
        [this, &scfg, &trace](const PsdMatrix& x, const PsdMatrix& y,
                              const ScalarFn& g, bool convex) {
          auto [cert, tr] = key1_certificate(x, y, g, convex, scfg);
          trace = tr;
          count("key1_certificate");
          return std::make_pair(cert.transforms[0].matrix,
                                cert.transforms[1].matrix);
        };
    try {
      const Certificate cert = theorem1_certificate(a, b, p, provider);
      record_cert("theorem1_certificate", ga, gb, p, cert, &trace);
    } catch (const std::exception& e) {
      record_error("theorem1_certificate", ga, gb, p, e.what());
    }
  }

  void run_search() {
    for (int dim : cfg_.dims) {
      if (dim > 3) continue;  // search-heavy cells stay small
      for (int t = 0; t < cfg_.trials; ++t) {
        SearchConfig scfg = cfg_.search;

        // orbit_optimize on the trivial fixed-point instance
        GeneratorSpec gs{GenKind::psd, dim, next_seed(), 1.0};
        try {
          const PsdMatrix s(generate(gs)[0].mat());
          scfg.seed = next_seed();
          std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
          terms.emplace_back(s,
                             ComplexMatrix(Matrix::Identity(dim, dim)));
          auto [cert, tr] = orbit_optimize(terms, s.hermitian(),
                                           SearchDirection::sum_le_bound,
                                           scfg);
          record_cert("orbit_optimize", gs, gs, 0.0, cert, &tr);
        } catch (const std::exception& e) {
          record_error("orbit_optimize", gs, gs, 0.0, e.what());
        }

        // key1 on a non-commuting PSD pair with g(t) = t^{3/2}
        GeneratorSpec gx{GenKind::psd, dim, next_seed(), 1.0};
        GeneratorSpec gy{GenKind::psd, dim, next_seed(), 1.0};
        try {
          const PsdMatrix x(generate(gx)[0].mat());
          const PsdMatrix y(generate(gy)[0].mat());
          scfg.seed = next_seed();
          auto [cert, tr] = key1_certificate(
              x, y,
              [](double s) { return std::pow(std::max(s, 0.0), 1.5); }, true,
              scfg);
          record_cert("key1_certificate", gx, gy, 3.0, cert, &tr);
        } catch (const std::exception& e) {
          record_error("key1_certificate", gx, gy, 3.0, e.what());
        }

        // theorem 2 and the q-regime direct sums
        GeneratorSpec ga, gb;
        auto [a, b] = make_pair(GenKind::ginibre, dim, &ga, &gb);
        for (double q : cfg_.q_grid) {
          try {
            scfg.seed = next_seed();
            auto [cert, tr] = theorem2_certificate(a, b, q, scfg);
            record_cert("theorem2_certificate", ga, gb, q, cert, &tr);
          } catch (const std::exception& e) {
            record_error("theorem2_certificate", ga, gb, q, e.what());
          }
          if (dim <= 2) {
            try {
              scfg.seed = next_seed();
              auto [cert, tr] = direct_sum_power_certificates(
                  a, b, q, scfg, DirectSumStatement::four_term);
              record_cert("direct_sum_power_certificates", ga, gb, q, cert,
                          &tr);
            } catch (const std::exception& e) {
              record_error("direct_sum_power_certificates", ga, gb, q,
                           e.what());
            }
            try {
              scfg.seed = next_seed();
              auto [cert, tr] = direct_sum_power_certificates(
                  a, b, q, scfg, DirectSumStatement::reversed_theorem);
              record_cert("direct_sum_power_certificates", ga, gb, q, cert,
                          &tr);
            } catch (const std::exception& e) {
              record_error("direct_sum_power_certificates", ga, gb, q,
                           e.what());
            }
          }
        }
        if (dim <= 2) {
          try {
            scfg.seed = next_seed();
            auto [cert, tr] = direct_sum_power_certificates(
                a, b, 4.0, scfg, DirectSumStatement::four_term);
            record_cert("direct_sum_power_certificates", ga, gb, 4.0, cert,
                        &tr);
          } catch (const std::exception& e) {
            record_error("direct_sum_power_certificates", ga, gb, 4.0,
                         e.what());
          }
        }
      }
    }

    run_gradient_sanity();
  }

  void run_gradient_sanity() {
    // 10 smooth sample points; resample near-degenerate top eigenvalues.
    std::mt19937_64 rng(derive_seed(cfg_.master_seed, cell_index_++));
    const int dim = 3;
    int accepted = 0;
    int attempts = 0;
    while (accepted < 10 && attempts < 200) {
      ++attempts;
      GeneratorSpec gx{GenKind::psd, dim, next_seed(), 1.0};
      GeneratorSpec gy{GenKind::psd, dim, next_seed(), 1.0};
      GeneratorSpec gz{GenKind::psd, dim, next_seed(), 1.0};
      std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
      terms.emplace_back(PsdMatrix(generate(gx)[0].mat()),
                         ComplexMatrix(haar_unitary(dim, rng)));
      terms.emplace_back(PsdMatrix(generate(gy)[0].mat()),
                         ComplexMatrix(haar_unitary(dim, rng)));
      const HermitianMatrix bound(generate(gz)[0].mat());
      std::vector<Matrix> us{terms[0].second.mat(), terms[1].second.mat()};

      Matrix gap = Matrix::Zero(dim, dim);
      for (size_t i = 0; i < terms.size(); ++i)
        gap += us[i] * terms[i].first.mat() * us[i].adjoint();
      gap -= bound.mat();
      const RealVector ev = eigenvalues_desc(gap);
      if (dim > 1 && ev(0) - ev(1) < 1e-6 * (1.0 + std::abs(ev(0))))
        continue;  // nonsmooth point, resample

      std::vector<Matrix> dirs{random_skew_hermitian(dim, rng),
                               random_skew_hermitian(dim, rng)};
      const double analytic = orbit_directional_derivative(
          terms, us, bound, SearchDirection::sum_le_bound, dirs);
      const double eps = 1e-6;
      std::vector<Matrix> up(2), um(2);
      for (size_t i = 0; i < 2; ++i) {
        up[i] = us[i] * unitary_exp_skew(eps * dirs[i]);
        um[i] = us[i] * unitary_exp_skew(-eps * dirs[i]);
      }
      const double fd =
          (orbit_objective(terms, up, bound, SearchDirection::sum_le_bound) -
           orbit_objective(terms, um, bound, SearchDirection::sum_le_bound)) /
          (2.0 * eps);
      const double denom = std::max(std::abs(analytic), std::abs(fd));
      const bool ok = denom < 1e-12 ||
                      std::abs(analytic - fd) <= 1e-4 * denom;
      record_flag("gradient_sanity", ok,
                  {{"analytic", analytic}, {"central_difference", fd}});
      ++accepted;
    }
  }

  SuiteConfig cfg_;
  SuiteReport report_;
  uint64_t cell_index_ = 0;

 private:
  enum class Outcome { pass, fail, not_converged };

  void push(json rec, Outcome outcome) {
    rec["index"] = report_.total;
    report_.cases.push_back(std::move(rec));
    ++report_.total;
    switch (outcome) {
      case Outcome::pass: ++report_.passed; break;
      case Outcome::fail: ++report_.failed; break;
      case Outcome::not_converged: ++report_.not_converged; break;
    }
  }
};

}  // namespace

bool suite_name_valid(const std::string& name) {
  return name == "identities" || name == "trace" || name == "majorization" ||
         name == "eigenvalue" || name == "certificates" || name == "search" ||
         name == "all";
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (!suite_name_valid(name))
    throw UsageError("unknown suite: " + name);
  const auto start = std::chrono::steady_clock::now();
  Runner runner(cfg);
  if (name == "identities" || name == "all") runner.run_identities();
  if (name == "trace" || name == "all") runner.run_trace();
  if (name == "majorization" || name == "all") runner.run_majorization();
  if (name == "eigenvalue" || name == "all") runner.run_eigenvalue();
  if (name == "certificates" || name == "all") runner.run_certificates();
  if (name == "search" || name == "all") runner.run_search();
  return runner.finish(name, start);
}

nlohmann::json suite_report_to_json(const SuiteReport& r) {
  nlohmann::json cfg{
      {"dims", r.config.dims},
      {"p_grid", r.config.p_grid},
      {"q_grid", r.config.q_grid},
      {"trials", r.config.trials},
      {"master_seed", r.config.master_seed},
      {"tolerances",
       {{"hermitian", tol::hermitian},
        {"psd", tol::psd},
        {"ortho", tol::ortho},
        {"recon", tol::recon},
        {"check", tol::check},
        {"identity", tol::identity}}},
      {"search",
       {{"max_iterations", r.config.search.max_iterations},
        {"restarts", r.config.search.restarts},
        {"step_init", r.config.search.step_init},
        {"grad_eps", r.config.search.grad_eps},
        {"target_gap", r.config.search.target_gap}}}};
  nlohmann::json out{
      {"schema", 1},
      {"suite", r.suite},
      {"config", std::move(cfg)},
      {"aggregate",
       {{"total", r.total},
        {"passed", r.passed},
        {"failed", r.failed},
        {"not_converged", r.not_converged}}},
      {"scalar_disagreements", r.scalar_disagreements},
      {"op_counts", r.op_counts},
      {"cases", r.cases}};
  if (r.config.include_timestamp) {
    out["wall_time_seconds"] = r.wall_time_seconds;
    out["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
  }
  return out;
}

}  // namespace orbitcert
