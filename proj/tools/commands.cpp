#include "commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fpprop/disentangle.hpp"
#include "fpprop/oracles.hpp"
#include "fpprop/problem.hpp"
#include "fpprop/propagator.hpp"

namespace fpprop::cli {

namespace {

using nlohmann::json;

// Scientific notation with 17 significant digits: round-trips exactly.
std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

// Write-then-rename keeps partially written outputs invisible.
void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::pair<std::string, std::string> split_ext(const std::string& path) {
    const std::filesystem::path p(path);
    const std::string ext = p.extension().string();
    std::string stem = path.substr(0, path.size() - ext.size());
    return {stem, ext};
}

ProblemSpec load_spec(const std::string& path, std::ostream& log, bool* ok) {
    *ok = true;
    try {
        return parse_problem_file(path);
    } catch (const spec_parse_error& e) {
        log << "spec error: " << path << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        log << "spec error: " << path << ": " << e.what() << "\n";
    }
    *ok = false;
    return ProblemSpec{};
}

// -------- solve --------------------------------------------------------

std::string values_csv(int dim, const std::vector<Eigen::VectorXd>& points,
                       const std::vector<double>& values) {
    std::ostringstream out;
    for (int i = 0; i < dim; ++i) out << "x" << (i + 1) << ",";
    out << "u\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int i = 0; i < dim; ++i) out << fmt17(points[p][i]) << ",";
        out << fmt17(values[p]) << "\n";
    }
    return out.str();
}

json values_json(double t, int dim, const std::vector<Eigen::VectorXd>& points,
                 const std::vector<double>& values) {
    json rows = json::array();
    for (std::size_t p = 0; p < points.size(); ++p) {
        json row = json::array();
        for (int i = 0; i < dim; ++i) row.push_back(points[p][i]);
        row.push_back(values[p]);
        rows.push_back(row);
    }
    return json{{"time", t}, {"columns", dim}, {"rows", rows}};
}

json kernel_meta(const PropagatorKernel& k) {
    json m;
    m["time"] = k.t;
    m["alpha1"] = k.alpha1;
    m["alpha3"] = k.alpha3;
    m["alpha2"] = std::vector<double>(k.alpha2.data(), k.alpha2.data() + k.alpha2.size());
    m["shift"] = std::vector<double>(k.shift.data(), k.shift.data() + k.shift.size());
    m["tau_eigenvalues"] = std::vector<double>(
        k.tau_eigenvalues.data(), k.tau_eigenvalues.data() + k.tau_eigenvalues.size());
    m["deterministic_directions"] = k.dim - k.stochastic_count;
    return m;
}

json point_mass_meta(const GaussianState& g) {
    json m;
    m["log_weight"] = g.log_weight;
    m["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
    std::vector<double> cov;
    for (int i = 0; i < g.dim(); ++i)
        for (int j = i; j < g.dim(); ++j) cov.push_back(g.cov(i, j));
    m["cov_upper"] = cov;
    return m;
}

// -------- verify -------------------------------------------------------

ScalarSchedule random_schedule(std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    switch (rng() % 3) {
        case 0:
            return ScalarSchedule::constant(u(rng));
        case 1: {
            std::vector<double> c(2 + rng() % 3);
            for (double& v : c) v = u(rng);
            return ScalarSchedule::polynomial(std::move(c));
        }
        default: {
            const int k = 3 + static_cast<int>(rng() % 4);
            std::vector<double> ts(k), vs(k);
            for (int i = 1; i < k; ++i) ts[i] = ts[i - 1] + 0.2 + 0.8 * (rng() % 100) / 100.0;
            for (int i = 0; i < k; ++i) ts[i] *= 1.5 / ts.back();
            for (double& v : vs) v = u(rng);
            return ScalarSchedule::table(std::move(ts), std::move(vs));
        }
    }
}

TensorSchedule random_psd_tensor(std::mt19937_64& rng, int n, double amplitude) {
    // a4(t) = f(t) * SPD + g(t) * I with positive piecewise-linear f, g;
    // every knot matrix is PSD and linear interpolation preserves that.
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    const Eigen::MatrixXd spd =
        a * a.transpose() / n + 0.2 * Eigen::MatrixXd::Identity(n, n);
    std::uniform_real_distribution<double> fpos(0.3, 1.0), gpos(0.1, 0.5);
    const std::vector<double> ts{0.0, 0.75, 1.5};
    std::vector<double> f, g;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        f.push_back(amplitude * fpos(rng));
        g.push_back(amplitude * gpos(rng));
    }
    std::vector<ScalarSchedule> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<double> vs;
            for (std::size_t k = 0; k < ts.size(); ++k)
                vs.push_back(f[k] * spd(i, j) + (i == j ? g[k] : 0.0));
            upper.push_back(ScalarSchedule::table(ts, vs));
        }
    return TensorSchedule(n, std::move(upper));
}

CoefficientSet random_set(std::mt19937_64& rng, int n, double amplitude) {
    std::vector<ScalarSchedule> a2;
    for (int i = 0; i < n; ++i) a2.push_back(random_schedule(rng, amplitude));
    return CoefficientSet{n, random_schedule(rng, amplitude), VectorSchedule(std::move(a2)),
                          random_schedule(rng, amplitude), random_psd_tensor(rng, n, amplitude)};
}

// Polynomial-only variant: smooth in t, so finite-difference stencils never
// straddle a table knot. Used by the residual suite.
CoefficientSet random_smooth_set(std::mt19937_64& rng, int n, double amplitude) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::uniform_real_distribution<double> pos(0.0, 0.4);
    auto poly = [&] {
        return ScalarSchedule::polynomial({u(rng), u(rng), 0.5 * u(rng)});
    };
    std::vector<ScalarSchedule> a2;
    for (int i = 0; i < n; ++i) a2.push_back(poly());
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    const Eigen::MatrixXd spd =
        a * a.transpose() / n + 0.2 * Eigen::MatrixXd::Identity(n, n);
    const ScalarSchedule p =
        ScalarSchedule::polynomial({0.3 + pos(rng), pos(rng), pos(rng)});
    const ScalarSchedule q = ScalarSchedule::polynomial({0.1 + pos(rng), pos(rng)});
    std::vector<ScalarSchedule> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<double> pc = p.scaled(spd(i, j)).coeffs();
            if (i == j) {
                const std::vector<double>& qc = q.coeffs();
                pc.resize(std::max(pc.size(), qc.size()), 0.0);
                for (std::size_t k = 0; k < qc.size(); ++k) pc[k] += qc[k];
            }
            upper.push_back(ScalarSchedule::polynomial(std::move(pc)));
        }
    return CoefficientSet{n, poly(), VectorSchedule(std::move(a2)), poly(),
                          TensorSchedule(n, std::move(upper))};
}

struct SuiteResult {
    std::string name;
    int trials = 0;
    double max_residual = 0.0;
    double contract = 0.0;
    bool pass = true;
    std::string note;
};

void print_suite(std::ostream& log, const SuiteResult& r) {
    log << "  " << r.name << ": " << r.trials << " trials, max residual " << r.max_residual
        << " (contract " << r.contract << ") " << (r.pass ? "PASS" : "FAIL");
    if (!r.note.empty()) log << "  [" << r.note << "]";
    log << "\n";
}

SuiteResult run_commutator(int trials, std::uint64_t seed) {
    SuiteResult r{"commutator", trials, 0.0, 0.0, true, "residual relative to |A||B|"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < trials; ++k) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int d = 3 + static_cast<int>(rng() % 4);
        const PolyBasis basis(n, d);
        const CoefficientSet c = random_set(rng, n, 1.0);
        const double s = u(rng), s2 = u(rng);
        const double rel = commutator_residual(c, s, s2, basis) /
                           commutator_scale(c, s, s2, basis);
        r.max_residual = std::max(r.max_residual, rel);
    }
    r.contract = 1e-13;
    r.pass = r.max_residual <= r.contract;
    return r;
}

SuiteResult run_suzuki(int trials, std::uint64_t seed, double tol, bool flip) {
    SuiteResult r{"suzuki", trials, 0.0, 100.0 * tol, true,
                  flip ? "reweighting sign deliberately flipped" : ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.3, 1.0);
    const ReweightSign sign = flip ? ReweightSign::Flipped : ReweightSign::Standard;
    for (int k = 0; k < trials; ++k) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const PolyBasis basis(n, 6);
        const CoefficientSet c = random_set(rng, n, 0.6);
        const double residual = suzuki_factorization_residual(c, ut(rng), basis, tol, sign);
        r.max_residual = std::max(r.max_residual, residual);
    }
    r.pass = r.max_residual <= r.contract;
    return r;
}

SuiteResult run_substitution(int trials, std::uint64_t seed, double tol) {
    SuiteResult r{"substitution", trials, 0.0, 100.0 * tol, true, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.3, 1.0);
    for (int k = 0; k < trials; ++k) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const PolyBasis basis(n, 5);
        const CoefficientSet c = random_set(rng, n, 0.6);
        r.max_residual = std::max(r.max_residual, substitution_check(c, ut(rng), basis, tol));
    }
    r.pass = r.max_residual <= r.contract;
    return r;
}

SuiteResult run_residual(int trials, std::uint64_t seed) {
    SuiteResult r{"residual", trials, 0.0, 0.0, true,
                  "reported value: |4 - ratio| of the h-halving test"};
    std::mt19937_64 rng(seed);
    for (int k = 0; k < trials; ++k) {
        // First trial is the canonical mean-reverting problem, then random
        // anisotropic 2-D sets.
        CoefficientSet c =
            k == 0 ? from_fpe(FpeCoefficients{
                         1, VectorSchedule::zero(1), ScalarSchedule::constant(-1.0),
                         TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))})
                   : random_smooth_set(rng, 2, 0.7);
        const int n = c.dim;
        const double t = 0.8;
        const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(n, 0.5);

        CoefficientIntegrals ci(c, 1.5);
        PropagatorConfig cfg;
        std::map<double, PropagatorKernel> cache;
        auto u = [&](double s, const Eigen::VectorXd& x) {
            auto it = cache.find(s);
            if (it == cache.end()) it = cache.emplace(s, build_kernel(ci, s, cfg)).first;
            return kernel_eval(it->second, x, y0);
        };

        const PropagatorKernel kt = build_kernel(ci, t, cfg);
        const GaussianState state = propagate_gaussian(kt, GaussianState::point_mass(y0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.cov);
        const double sd = std::sqrt(es.eigenvalues().maxCoeff());

        std::uniform_real_distribution<double> ux(-1.5, 1.5);
        double max1 = 0.0, max2 = 0.0;
        for (int p = 0; p < 50; ++p) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = state.mean[i] + sd * ux(rng);
            max1 = std::max(max1, std::abs(pde_residual(c, u, t, x, 1e-3)));
            max2 = std::max(max2, std::abs(pde_residual(c, u, t, x, 5e-4)));
        }
        const double ratio = max1 / max2;
        r.max_residual = std::max(r.max_residual, std::abs(4.0 - ratio));
        if (ratio < 3.5 || ratio > 4.5) r.pass = false;
    }
    r.contract = 0.5;
    return r;
}

// -------- compare ------------------------------------------------------

bool fpe_equivalent(const CoefficientSet& c, double horizon, FpeCoefficients* out) {
    // The divergence form exists exactly when a1 = n * a3 pointwise.
    for (int k = 0; k <= 256; ++k) {
        const double t = horizon * k / 256.0;
        const double scale = std::max({1.0, std::abs(c.a1(t)), std::abs(c.a3(t))});
        if (std::abs(c.a1(t) - c.dim * c.a3(t)) > 1e-9 * scale) return false;
    }
    *out = FpeCoefficients{c.dim, c.a2.scaled(-1.0), c.a3.scaled(-1.0), c.a4};
    return true;
}

GaussianState mixture_moments(const std::vector<GaussianState>& components) {
    double total = 0.0;
    for (const auto& g : components) total += std::exp(g.log_weight);
    const int n = components.front().dim();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& g : components) mean += std::exp(g.log_weight) / total * g.mean;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : components) {
        const double w = std::exp(g.log_weight) / total;
        const Eigen::VectorXd d = g.mean - mean;
        cov += w * (g.cov + d * d.transpose());
    }
    return GaussianState{std::log(total), mean, cov};
}

}  // namespace

int cmd_solve(const SolveOptions& opt, std::ostream& log) {
    bool ok = false;
    const ProblemSpec spec = load_spec(opt.spec_path, log, &ok);
    if (!ok) return kExitUsage;
    if (opt.format != "csv" && opt.format != "json") {
        log << "solve: unknown format '" << opt.format << "'\n";
        return kExitUsage;
    }
    const std::vector<double> times = opt.times.empty() ? spec.output.times : opt.times;
    if (times.empty()) {
        log << "solve: no output times (give --time or set output.times)\n";
        return kExitUsage;
    }
    for (double t : times) {
        if (t < 0.0 || t > spec.horizon) {
            log << "solve: time " << t << " outside [0, horizon]\n";
            return kExitUsage;
        }
    }
    const std::vector<Eigen::VectorXd> points = spec.output.evaluation_points();
    if (points.empty()) {
        log << "solve: the spec requests no evaluation points\n";
        return kExitUsage;
    }

    const CoefficientSet c = spec.coefficient_set();
    const CoefficientIntegrals ci(c, spec.horizon);
    const auto [stem, ext] = split_ext(opt.out_path);

    json meta;
    meta["spec_version"] = spec.spec_version;
    meta["dim"] = spec.dim;
    meta["times"] = json::array();

    for (std::size_t k = 0; k < times.size(); ++k) {
        const PropagatorKernel kernel = build_kernel(ci, times[k]);
        json entry = kernel_meta(kernel);
        const std::string table_path =
            times.size() == 1 ? opt.out_path
                              : stem + "_t" + std::to_string(k) + (ext.empty() ? ".csv" : ext);
        try {
            const std::vector<double> values = solve(kernel, spec.initial, points);
            if (opt.format == "csv") {
                write_atomic(table_path, values_csv(spec.dim, points, values));
            } else {
                write_atomic(table_path,
                             values_json(times[k], spec.dim, points, values).dump(1) + "\n");
            }
            entry["table"] = table_path;
            log << "t = " << times[k] << ": wrote " << points.size() << " values to "
                << table_path << "\n";
        } catch (const point_mass_error& e) {
            entry["point_mass"] = point_mass_meta(e.state());
            log << "t = " << times[k]
                << ": solution is a point mass (degenerate spread); recorded in metadata\n";
        }
        meta["times"].push_back(entry);
    }

    const std::string meta_path = stem + "_meta.json";
    write_atomic(meta_path, meta.dump(1) + "\n");
    log << "metadata: " << meta_path << "\n";
    return kExitOk;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& log) {
    const bool all = opt.suite == "all";
    if (!all && opt.suite != "commutator" && opt.suite != "suzuki" &&
        opt.suite != "substitution" && opt.suite != "residual") {
        log << "verify: unknown suite '" << opt.suite << "'\n";
        return kExitUsage;
    }
    if (opt.trials == 0) {
        log << "verify: 0 trials requested, nothing to run\n";
        return kExitOk;
    }

    std::vector<SuiteResult> results;
    auto trials_or = [&](int dflt) { return opt.trials > 0 ? opt.trials : dflt; };
    if (all || opt.suite == "commutator")
        results.push_back(run_commutator(trials_or(100), opt.seed));
    if (all || opt.suite == "suzuki")
        results.push_back(run_suzuki(trials_or(20), opt.seed, opt.tol, opt.flip_suzuki_sign));
    if (all || opt.suite == "substitution")
        results.push_back(run_substitution(trials_or(20), opt.seed, opt.tol));
    if (all || opt.suite == "residual") results.push_back(run_residual(trials_or(3), opt.seed));

    bool pass = true;
    log << "verification report (seed " << opt.seed << ", tol " << opt.tol << "):\n";
    for (const SuiteResult& r : results) {
        print_suite(log, r);
        pass = pass && r.pass;
    }
    log << (pass ? "all suites PASS\n" : "contract violation\n");
    return pass ? kExitOk : kExitContractViolation;
}

int cmd_compare(const CompareOptions& opt, std::ostream& log) {
    bool ok = false;
    const ProblemSpec spec = load_spec(opt.spec_path, log, &ok);
    if (!ok) return kExitUsage;
    if (opt.oracle != "fd" && opt.oracle != "mc" && opt.oracle != "both") {
        log << "compare: unknown oracle '" << opt.oracle << "'\n";
        return kExitUsage;
    }
    double t = opt.time;
    if (t < 0.0) {
        if (spec.output.times.empty()) {
            log << "compare: no time given and the spec lists none\n";
            return kExitUsage;
        }
        t = spec.output.times.back();
    }
    if (t <= 0.0 || t > spec.horizon) {
        log << "compare: time outside (0, horizon]\n";
        return kExitUsage;
    }

    const CoefficientSet c = spec.coefficient_set();
    bool pass = true;

    if (opt.oracle == "fd" || opt.oracle == "both") {
        if (spec.dim > 2) {
            log << "compare: fd oracle supports dim <= 2\n";
            return kExitUsage;
        }
        if (!spec.output.grid) {
            log << "compare: fd oracle needs a grid output block\n";
            return kExitUsage;
        }
        const RegularGrid& grid = *spec.output.grid;
        const FdConfig cfg{grid, opt.fd_dt, 0.5};
        const SolutionGrid fd = fd_solve(c, spec.initial, t, cfg);
        std::vector<Eigen::VectorXd> pts;
        pts.reserve(grid.size());
        for (long f = 0; f < grid.size(); ++f) pts.push_back(grid.node(f));
        const std::vector<double> closed = solve(Problem{c, spec.initial}, t, pts);
        const GridErrorNorms norms = grid_error(fd, SolutionGrid{grid, t, closed});
        const bool fd_pass = norms.linf <= opt.fd_tol;
        log << "fd oracle: Linf " << norms.linf << "  L1 " << norms.l1 << "  L2 " << norms.l2
            << "  (tolerance " << opt.fd_tol << ") " << (fd_pass ? "PASS" : "FAIL") << "\n";
        pass = pass && fd_pass;

        if (!opt.out_path.empty()) {
            std::ostringstream outcsv;
            for (int i = 0; i < spec.dim; ++i) outcsv << "x" << (i + 1) << ",";
            outcsv << "closed_form,oracle,abs_diff\n";
            for (long f = 0; f < grid.size(); ++f) {
                for (int i = 0; i < spec.dim; ++i) outcsv << fmt17(pts[f][i]) << ",";
                outcsv << fmt17(closed[f]) << "," << fmt17(fd.values[f]) << ","
                       << fmt17(std::abs(closed[f] - fd.values[f])) << "\n";
            }
            write_atomic(opt.out_path, outcsv.str());
            log << "comparison table: " << opt.out_path << "\n";
        }
    }

    if (opt.oracle == "mc" || opt.oracle == "both") {
        FpeCoefficients fpe{1, VectorSchedule::zero(1), ScalarSchedule::constant(0.0),
                            TensorSchedule::zero(1)};
        if (spec.is_fpe_form()) {
            fpe = *spec.fpe;
        } else if (!fpe_equivalent(c, spec.horizon, &fpe)) {
            log << "compare: mc oracle needs the divergence form, but a1 != dim * a3; "
                   "this problem does not conserve probability\n";
            return kExitUsage;
        }

        StartSampler start = StartSampler::fixed(Eigen::VectorXd::Zero(spec.dim));
        std::vector<GaussianState> components;
        if (const auto* delta = std::get_if<DiracDelta>(&spec.initial)) {
            start = StartSampler::fixed(delta->center);
            components.push_back(GaussianState::point_mass(delta->center));
        } else if (const auto* mix = std::get_if<GaussianMixture>(&spec.initial)) {
            double total = 0.0;
            for (const auto& g : mix->components) total += std::exp(g.log_weight);
            if (std::abs(total - 1.0) > 1e-8) {
                log << "compare: mc oracle needs normalized initial data (total weight "
                    << total << ")\n";
                return kExitUsage;
            }
            components = mix->components;
            std::vector<double> weights;
            std::vector<GaussianState> comps = mix->components;
            for (const auto& g : comps) weights.push_back(std::exp(g.log_weight));
            start = StartSampler::draw([comps, weights](std::mt19937_64& rng) {
                std::discrete_distribution<int> pick(weights.begin(), weights.end());
                const GaussianState& g = comps[pick(rng)];
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.cov);
                std::normal_distribution<double> nd;
                Eigen::VectorXd xi(g.dim());
                for (int i = 0; i < g.dim(); ++i) xi[i] = nd(rng);
                return Eigen::VectorXd(g.mean + es.eigenvectors() *
                                                    es.eigenvalues().cwiseMax(0.0).cwiseSqrt()
                                                        .asDiagonal() *
                                                    xi);
            });
        } else {
            log << "compare: mc oracle needs delta or gaussian_mixture initial data\n";
            return kExitUsage;
        }

        const PropagatorKernel kernel = build_kernel(c, t);
        std::vector<GaussianState> pushed;
        for (const auto& g : components) pushed.push_back(propagate_gaussian(kernel, g));
        const GaussianState reference = mixture_moments(pushed);

        const Eigen::MatrixXd samples =
            mc_sample(fpe, start, t, McConfig{opt.mc_paths, opt.mc_dt, opt.seed});
        const MomentReport rep = compare_moments(samples, reference, opt.mc_z_limit);
        log << "mc oracle: " << opt.mc_paths << " paths, dt " << opt.mc_dt << ", max |z| "
            << rep.max_abs_z << " (limit " << opt.mc_z_limit << ") "
            << (rep.pass ? "PASS" : "FAIL") << "\n";
        for (int i = 0; i < rep.mean_z.size(); ++i)
            log << "  mean[" << i << "]: sample " << rep.sample_mean[i] << " reference "
                << reference.mean[i] << " z " << rep.mean_z[i] << "\n";
        pass = pass && rep.pass;
    }

    log << (pass ? "comparison PASS\n" : "comparison FAIL\n");
    return pass ? kExitOk : kExitContractViolation;
}

int cmd_schedules(const SchedulesOptions& opt, std::ostream& log) {
    bool ok = false;
    const ProblemSpec spec = load_spec(opt.spec_path, log, &ok);
    if (!ok) return kExitUsage;
    if (opt.samples < 2) {
        log << "schedules: need at least 2 samples\n";
        return kExitUsage;
    }

    const CoefficientSet c = spec.coefficient_set();
    const CoefficientIntegrals ci(c, spec.horizon);
    const int n = spec.dim;

    std::ostringstream out;
    out << "t,a1";
    for (int i = 0; i < n; ++i) out << ",a2_" << (i + 1);
    out << ",a3";
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out << ",a4_" << (i + 1) << (j + 1);
    out << ",alpha1";
    for (int i = 0; i < n; ++i) out << ",alpha2_" << (i + 1);
    out << ",alpha3";
    for (int i = 0; i < n; ++i) out << ",shift_" << (i + 1);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out << ",tau_" << (i + 1) << (j + 1);
    out << "\n";

    for (int k = 0; k < opt.samples; ++k) {
        const double t = spec.horizon * k / (opt.samples - 1);
        const IntegratedCoefficients ic = ci.at(t);
        out << fmt17(t) << "," << fmt17(c.a1(t));
        const Eigen::VectorXd a2 = c.a2(t);
        for (int i = 0; i < n; ++i) out << "," << fmt17(a2[i]);
        out << "," << fmt17(c.a3(t));
        const Eigen::MatrixXd a4 = c.a4(t);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out << "," << fmt17(a4(i, j));
        out << "," << fmt17(ic.alpha1);
        for (int i = 0; i < n; ++i) out << "," << fmt17(ic.alpha2[i]);
        out << "," << fmt17(ic.alpha3);
        for (int i = 0; i < n; ++i) out << "," << fmt17(ic.shift[i]);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out << "," << fmt17(ic.tau(i, j));
        out << "\n";
    }

    write_atomic(opt.out_path, out.str());
    log << "schedule table (" << opt.samples << " samples): " << opt.out_path << "\n";
    return kExitOk;
}

}  // namespace fpprop::cli
