#include "isospec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "isospec/oracles.hpp"

namespace isospec {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// fixed salts for the reproducible child streams every runner hands out
constexpr std::uint64_t kSaltFrame = 0x11;
constexpr std::uint64_t kSaltControl = 0x22;
constexpr std::uint64_t kSaltFixedScene = 0x33;
constexpr std::uint64_t kSaltReplica = 0x1000;

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

struct Acc {
    double sum = 0.0, sumsq = 0.0;
    long count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    double mean() const { return sum / count; }
    double se() const {
        if (count < 2) return 0.0;
        double var = std::max(0.0, sumsq / count - mean() * mean());
        return std::sqrt(var / count);
    }
};

// Executes fn(0..count-1) over a worker pool; each index owns its output
// slot and its own derived stream, so scheduling never affects results.
template <typename F>
void parallel_indices(int count, F&& fn) {
    int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<EntrySelector> parse_picks(const std::vector<std::string>& texts) {
    std::vector<EntrySelector> picks;
    picks.reserve(texts.size());
    for (const auto& t : texts) picks.push_back(EntrySelector::parse(t));
    return picks;
}

CoefficientFrame resolve_frame_dense(const ExperimentConfig& cfg, int dim) {
    if (cfg.frame_kind == "entry_picks") {
        return entry_frame(dim, parse_picks(cfg.entry_picks), cfg.field).first;
    }
    if (cfg.frame_kind == "random_traceless") {
        RandomEngine rng(substream(cfg.rng, kSaltFrame));
        std::vector<HermitianMatrix> raw;
        raw.reserve(cfg.d);
        for (int i = 0; i < cfg.d; ++i) raw.push_back(gaussian_ensemble(dim, cfg.field, rng));
        return orthonormalize_traceless(raw);
    }
    if (cfg.frame_kind == "explicit") {
        CoefficientFrame frame;
        for (const auto& j : cfg.frame_matrices) frame.matrices.push_back(matrix_from_json(j));
        // measure the flags instead of trusting the input
        frame.orthonormal = true;
        frame.traceless = true;
        for (int i = 0; i < frame.d(); ++i) {
            if (std::abs(frame.matrices[i].trace()) > 1e-10) frame.traceless = false;
            for (int j = 0; j <= i; ++j) {
                double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(hs_inner(frame.matrices[i], frame.matrices[j]) - target) > 1e-8)
                    frame.orthonormal = false;
            }
        }
        return frame;
    }
    throw std::invalid_argument("unknown frame_kind: " + cfg.frame_kind);
}

Eigen::MatrixXd gaussian_block(int m, int d, RngStream stream) {
    RandomEngine rng(stream);
    Eigen::MatrixXd g(m, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    return g;
}

struct ControlledW1 {
    double w1 = 0.0;
    double control_bias = 0.0;
    double control_sd = 0.0;

    double allowance() const { return 3.0 * (control_bias + control_sd); }
};

// Empirical W1 of a scaled sample against the standard Gaussian, plus
// same-(m,d) Gaussian control runs quantifying the estimator's own bias
// and run-to-run spread.
ControlledW1 w1_with_control(const Eigen::MatrixXd& x, RngStream control_base, int n_controls = 3) {
    int m = static_cast<int>(x.rows());
    int d = static_cast<int>(x.cols());
    ControlledW1 out;
    std::vector<double> controls;
    controls.reserve(n_controls);
    if (d == 1) {
        auto measure = EmpiricalMeasure1D::from_data(x.col(0));
        out.w1 = w1_1d_vs_gaussian(measure, 0.0, 1.0);
        for (int c = 0; c < n_controls; ++c) {
            Eigen::MatrixXd g = gaussian_block(m, 1, substream(control_base, 2 * c));
            controls.push_back(
                w1_1d_vs_gaussian(EmpiricalMeasure1D::from_data(g.col(0)), 0.0, 1.0));
        }
    } else {
        EmpiricalSample sample{x, control_base};
        Eigen::MatrixXd g0 = gaussian_block(m, d, substream(control_base, 1000));
        out.w1 = w1_multi(sample, EmpiricalSample{g0, control_base});
        for (int c = 0; c < n_controls; ++c) {
            Eigen::MatrixXd ga = gaussian_block(m, d, substream(control_base, 2 * c));
            Eigen::MatrixXd gb = gaussian_block(m, d, substream(control_base, 2 * c + 1));
            controls.push_back(
                w1_multi(EmpiricalSample{ga, control_base}, EmpiricalSample{gb, control_base}));
        }
    }
    for (double c : controls) out.control_bias += c;
    out.control_bias /= controls.size();
    double var = 0.0;
    for (double c : controls) var += (c - out.control_bias) * (c - out.control_bias);
    out.control_sd = std::sqrt(var / controls.size());
    return out;
}

void add_assertion(ExperimentReport& report, const std::string& name, double measured,
                   double threshold, const std::string& provenance, bool reported_only = false) {
    Assertion a;
    a.name = name;
    a.measured = measured;
    a.threshold = threshold;
    a.provenance = provenance;
    a.reported_only = reported_only;
    a.pass = reported_only || measured <= threshold;
    report.assertions.push_back(std::move(a));
}

// evaluates one entry pick on a compressed block (indices already remapped)
double eval_pick(const HermitianMatrix& block, const EntrySelector& p) {
    const double sqrt2 = std::sqrt(2.0);
    switch (p.kind) {
        case EntrySelector::Kind::Diag:
            return block.mat()(p.j - 1, p.j - 1).real();
        case EntrySelector::Kind::Re:
            return sqrt2 * block.mat()(p.j - 1, p.k - 1).real();
        case EntrySelector::Kind::Im:
            return sqrt2 * block.mat()(p.j - 1, p.k - 1).imag();
    }
    throw std::logic_error("eval_pick: bad selector kind");
}

// remaps picks onto the compressed row set used by the partial-row sampler
struct CompressedPicks {
    std::vector<int> rows;                // 1-based original rows, sorted
    std::vector<EntrySelector> remapped;  // indices into 1..rows.size()
};

CompressedPicks compress_picks(const std::vector<EntrySelector>& picks) {
    std::set<int> row_set;
    for (const auto& p : picks) {
        row_set.insert(p.j);
        if (p.kind != EntrySelector::Kind::Diag) row_set.insert(p.k);
    }
    CompressedPicks out;
    out.rows.assign(row_set.begin(), row_set.end());
    auto position = [&](int idx) {
        return static_cast<int>(std::lower_bound(out.rows.begin(), out.rows.end(), idx) -
                                out.rows.begin()) + 1;
    };
    for (const auto& p : picks) {
        EntrySelector q = p;
        q.j = position(p.j);
        if (p.kind != EntrySelector::Kind::Diag) q.k = position(p.k);
        out.remapped.push_back(q);
    }
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

RngStream substream(RngStream base, std::uint64_t salt) {
    return RngStream{base.seed, mix64(base.stream_id ^ mix64(salt))};
}

int worker_count() {
    if (const char* env = std::getenv("ISOSPEC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

Spectrum ExperimentConfig::resolve_spectrum() const {
    if (spectrum_kind == "pm_sqrt_n") return Spectrum::pm_sqrt_n(n);
    if (spectrum_kind == "explicit") {
        if (spectrum_values.empty()) throw std::invalid_argument("explicit spectrum: no values");
        if (n != 0 && n != static_cast<int>(spectrum_values.size()))
            throw std::invalid_argument("explicit spectrum: size disagrees with n");
        Eigen::VectorXd v(static_cast<long>(spectrum_values.size()));
        for (std::size_t i = 0; i < spectrum_values.size(); ++i) v[static_cast<long>(i)] = spectrum_values[i];
        return Spectrum{std::move(v)};
    }
    if (spectrum_kind == "file") {
        std::ifstream in(spectrum_file);
        if (!in) throw std::invalid_argument("spectrum file unreadable: " + spectrum_file);
        nlohmann::json j;
        in >> j;
        return spectrum_from_json(j);
    }
    throw std::invalid_argument("unknown spectrum_kind: " + spectrum_kind);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.scenario = j.value("scenario", std::string{});
    cfg.n = j.value("n", 0);
    cfg.d = j.value("d", 1);
    cfg.k = j.value("k", 0);
    cfg.s = j.value("s", 0);
    cfg.m = j.value("m", 0L);
    cfg.replicas = j.value("replicas", 1);
    cfg.epsilon = j.value("epsilon", 1e-3);
    cfg.field = field_from_string(j.value("field", std::string("complex")));
    if (j.contains("rng")) {
        cfg.rng.seed = j["rng"].value("seed", std::uint64_t{0});
        cfg.rng.stream_id = j["rng"].value("stream_id", std::uint64_t{0});
    }
    if (j.contains("constants")) {
        const auto& c = j["constants"];
        cfg.constants.c_r1 = c.value("c_r1", 1.0);
        cfg.constants.c_dallaporta = c.value("c_dallaporta", 1.0);
        cfg.constants.kappa_invariant = c.value("kappa_invariant", 1.0);
    }
    if (j.contains("spectrum")) {
        const auto& s = j["spectrum"];
        cfg.spectrum_kind = s.value("kind", std::string("pm_sqrt_n"));
        if (s.contains("values")) cfg.spectrum_values = s["values"].get<std::vector<double>>();
        cfg.spectrum_file = s.value("file", std::string{});
    }
    if (j.contains("frame")) {
        const auto& f = j["frame"];
        cfg.frame_kind = f.value("kind", std::string("entry_picks"));
        if (f.contains("picks")) cfg.entry_picks = f["picks"].get<std::vector<std::string>>();
        if (f.contains("matrices"))
            cfg.frame_matrices.assign(f["matrices"].begin(), f["matrices"].end());
    }
    if (j.contains("potential")) {
        const auto& p = j["potential"];
        if (p.contains("coeffs")) cfg.potential_coeffs = p["coeffs"].get<std::vector<double>>();
        cfg.mcmc_steps = p.value("mcmc_steps", 0L);
        cfg.mcmc_step_size = p.value("mcmc_step_size", 0.0);
        cfg.burn_in = p.value("burn_in", 0L);
        cfg.gue_shortcut = p.value("gue_shortcut", true);
    }
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["n"] = n;
    j["d"] = d;
    j["k"] = k;
    j["s"] = s;
    j["m"] = m;
    j["replicas"] = replicas;
    j["epsilon"] = epsilon;
    j["field"] = to_string(field);
    j["rng"] = {{"seed", rng.seed}, {"stream_id", rng.stream_id}};
    j["constants"] = {{"c_r1", constants.c_r1},
                      {"c_dallaporta", constants.c_dallaporta},
                      {"kappa_invariant", constants.kappa_invariant}};
    j["spectrum"] = {{"kind", spectrum_kind}};
    if (!spectrum_values.empty()) j["spectrum"]["values"] = spectrum_values;
    if (!spectrum_file.empty()) j["spectrum"]["file"] = spectrum_file;
    j["frame"] = {{"kind", frame_kind}};
    if (!entry_picks.empty()) j["frame"]["picks"] = entry_picks;
    if (!frame_matrices.empty()) j["frame"]["matrices"] = frame_matrices;
    j["potential"] = {{"coeffs", potential_coeffs},
                      {"mcmc_steps", mcmc_steps},
                      {"mcmc_step_size", mcmc_step_size},
                      {"burn_in", burn_in},
                      {"gue_shortcut", gue_shortcut}};
    return j;
}

bool ExperimentReport::passed() const {
    for (const auto& a : assertions)
        if (!a.pass) return false;
    return true;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["config"] = config_echo;
    j["measured"] = measured;
    if (bound) j["bound"] = bound->to_json();
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& a : assertions)
        checks.push_back({{"name", a.name},
                          {"measured", a.measured},
                          {"threshold", a.threshold},
                          {"provenance", a.provenance},
                          {"reported_only", a.reported_only},
                          {"pass", a.pass}});
    j["assertions"] = checks;
    j["pass"] = passed();
    return j;
}

std::string ExperimentReport::replicas_csv() const {
    std::set<std::string> keys;
    for (const auto& row : replica_rows)
        for (const auto& [k, v] : row) keys.insert(k);
    std::string out =
        "# one row per replica: replica index followed by the named per-replica statistics\n";
    out += "replica";
    for (const auto& k : keys) out += "," + k;
    out += "\n";
    for (std::size_t r = 0; r < replica_rows.size(); ++r) {
        out += std::to_string(r + 1);
        for (const auto& k : keys) {
            auto it = replica_rows[r].find(k);
            out += ",";
            if (it != replica_rows[r].end()) out += format_double(it->second);
        }
        out += "\n";
    }
    return out;
}

std::string ExperimentReport::summary_line() const {
    std::string line = scenario + ":";
    // headline: first failing assertion if any, else the first assertion
    const Assertion* shown = nullptr;
    for (const auto& a : assertions)
        if (!a.pass) {
            shown = &a;
            break;
        }
    if (!shown && !assertions.empty()) shown = &assertions.front();
    if (shown)
        line += " " + shown->name + "=" + format_double(shown->measured) +
                " (threshold " + format_double(shown->threshold) + ", " + shown->provenance + ")";
    if (bound) line += " bound[" + bound->theorem_id + "]=" + format_double(bound->value);
    bool reported_only_all = !assertions.empty();
    for (const auto& a : assertions) reported_only_all = reported_only_all && a.reported_only;
    line += passed() ? (reported_only_all ? " REPORTED" : " PASS") : " FAIL";
    return line;
}

// ---------------------------------------------------------------------------
// oracle verification
// ---------------------------------------------------------------------------

ExperimentReport verify_moment_oracles(const ExperimentConfig& cfg) {
    Timer timer;
    if (cfg.n < 2 || cfg.n > 64)
        throw std::invalid_argument("verify_moment_oracles: need 2 <= n <= 64");
    int n = cfg.n;
    long m = cfg.m > 0 ? cfg.m : 1000000;

    // generic nondegenerate spectrum unless the config pins one explicitly
    Spectrum spectrum;
    if (cfg.spectrum_kind == "explicit") {
        spectrum = cfg.resolve_spectrum();
    } else {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = i + 1.0;
        spectrum = Spectrum{v};
    }

    // fixed deterministic test matrices
    RandomEngine fixed(substream(cfg.rng, kSaltFixedScene));
    HermitianMatrix b_gen = gaussian_ensemble(n, FieldTag::Complex, fixed);
    HermitianMatrix c_gen = gaussian_ensemble(n, FieldTag::Complex, fixed);
    CoefficientFrame traceless_pair = orthonormalize_traceless(
        {gaussian_ensemble(n, FieldTag::Complex, fixed), gaussian_ensemble(n, FieldTag::Complex, fixed)});
    const HermitianMatrix& bt = traceless_pair.matrices[0];
    const HermitianMatrix& ct = traceless_pair.matrices[1];
    Eigen::MatrixXcd f_gen(n, n), g_gen(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
            f_gen(r, c) = fixed.complex_normal();
            g_gen(r, c) = fixed.complex_normal();
        }

    struct Check {
        std::string name;
        double oracle;
        Acc acc;
    };
    std::vector<Check> checks;
    auto add_check = [&](const std::string& name, double oracle) {
        checks.push_back({name, oracle, {}});
        return checks.size() - 1;
    };

    std::size_t i_d4a = add_check("deg4_1111", unitary_degree4_moment(1, 1, 1, 1, n));
    std::size_t i_d4b = add_check("deg4_1112", unitary_degree4_moment(1, 1, 1, 2, n));
    std::size_t i_d4c = add_check("deg4_1221", unitary_degree4_moment(1, 2, 2, 1, n));
    HermitianMatrix ea2 = expected_A_squared(spectrum);
    std::size_t i_a2d = add_check("A2_diag", ea2.mat()(0, 0).real());
    std::size_t i_a2o = add_check("A2_offdiag", 0.0);
    std::size_t i_abac = add_check("tr_ABAC", expected_tr_ABAC(spectrum, b_gen, c_gen));
    std::size_t i_qfg = add_check("trQF_trQG", expected_trQF_trQG(f_gen, g_gen, n));
    std::vector<long> a2(n, 0);
    a2[0] = 2;
    std::size_t i_s2 = add_check("sphere_abs2", sphere_abs_moment(a2));
    std::vector<long> a4(n, 0);
    a4[0] = 4;
    std::size_t i_s4 = add_check("sphere_abs4", sphere_abs_moment(a4));
    std::vector<long> a22(n, 0);
    a22[0] = 2;
    a22[1] = 2;
    std::size_t i_s22 = add_check("sphere_abs22", sphere_abs_moment(a22));
    std::size_t i_mx0 = add_check("sphere_mixed_zero",
                                  sphere_mixed_moment(MomentQuery{{1, 1}, {1, 2}, n}));
    std::size_t i_mx1 = add_check("sphere_mixed_match",
                                  sphere_mixed_moment(MomentQuery{{1, 2}, {1, 2}, n}));
    std::size_t i_qc = add_check("quad_form_cov", quad_form_cov(bt, ct));
    std::size_t i_q4s = add_check("quad_form_sq", quad_form_deg4(bt, ct, QuadFormKind::Sq));
    std::size_t i_q4a = add_check("quad_form_abs_sq", quad_form_deg4(bt, ct, QuadFormKind::AbsSq));
    std::size_t i_q4c = add_check("quad_form_cross", quad_form_deg4(bt, ct, QuadFormKind::Cross));
    std::size_t i_q4f = add_check("quad_form_full", quad_form_deg4(bt, ct, QuadFormKind::Full));

    Eigen::VectorXcd lambda_c = spectrum.values.cast<std::complex<double>>();

    RandomEngine haar_rng(substream(cfg.rng, 1));
    for (long t = 0; t < m; ++t) {
        Eigen::MatrixXcd u = haar_matrix(n, FieldTag::Complex, haar_rng);
        auto deg4 = [&](int i, int j, int k, int l) {
            return (u(i - 1, j - 1) * u(k - 1, l - 1) * std::conj(u(i - 1, l - 1)) *
                    std::conj(u(k - 1, j - 1)))
                .real();
        };
        checks[i_d4a].acc.add(deg4(1, 1, 1, 1));
        checks[i_d4b].acc.add(deg4(1, 1, 1, 2));
        checks[i_d4c].acc.add(deg4(1, 2, 2, 1));
        Eigen::MatrixXcd a = u * lambda_c.asDiagonal() * u.adjoint();
        Eigen::MatrixXcd a2 = a * a;
        checks[i_a2d].acc.add(a2(0, 0).real());
        checks[i_a2o].acc.add(a2(0, 1).real());
        checks[i_abac].acc.add((a * b_gen.mat() * a * c_gen.mat()).trace().real());
    }

    RandomEngine q_rng(substream(cfg.rng, 2));
    for (long t = 0; t < m; ++t) {
        Eigen::MatrixXcd v = haar_rows(n, 2, FieldTag::Complex, q_rng).adjoint();
        Eigen::MatrixXcd q = v.col(0) * v.col(1).adjoint() - v.col(1) * v.col(0).adjoint();
        checks[i_qfg].acc.add(((q * f_gen).trace() * (q * g_gen).trace()).real());
    }

    RandomEngine z_rng(substream(cfg.rng, 3));
    for (long t = 0; t < m; ++t) {
        Eigen::VectorXcd z = sphere_uniform(n, FieldTag::Complex, z_rng);
        double abs1 = std::norm(z[0]), abs2 = std::norm(z[1]);
        checks[i_s2].acc.add(abs1);
        checks[i_s4].acc.add(abs1 * abs1);
        checks[i_s22].acc.add(abs1 * abs2);
        checks[i_mx0].acc.add((z[0] * z[0] * std::conj(z[0]) * std::conj(z[1])).real());
        checks[i_mx1].acc.add((z[0] * z[1] * std::conj(z[0]) * std::conj(z[1])).real());
        // <Bz,Cz> = z* C B z for self-adjoint C
        std::complex<double> bz_cz = z.adjoint() * ct.mat() * bt.mat() * z;
        double bz_z = (z.adjoint() * bt.mat() * z)(0).real();
        double cz_z = (z.adjoint() * ct.mat() * z)(0).real();
        checks[i_qc].acc.add(bz_z * cz_z);
        checks[i_q4s].acc.add((bz_cz * bz_cz).real());
        checks[i_q4a].acc.add(std::norm(bz_cz));
        checks[i_q4c].acc.add((bz_cz * bz_z * cz_z).real());
        checks[i_q4f].acc.add(bz_z * bz_z * cz_z * cz_z);
    }

    ExperimentReport report;
    report.scenario = "oracles";
    report.config_echo = cfg.to_json();
    double z_max = 0.0;
    for (auto& c : checks) {
        double se = c.acc.se();
        // some checks are degenerate at small n (the statistic is almost
        // surely zero); below rounding scale, agreement counts as exact
        double tol = 1e-12 * (1.0 + std::abs(c.oracle));
        double z = (se > tol) ? (c.acc.mean() - c.oracle) / se
                              : (std::abs(c.acc.mean() - c.oracle) <= tol ? 0.0 : 1e9);
        report.measured[c.name + "_mc"] = c.acc.mean();
        report.measured[c.name + "_oracle"] = c.oracle;
        report.measured[c.name + "_z"] = z;
        z_max = std::max(z_max, std::abs(z));
        add_assertion(report, c.name + "_abs_z", std::abs(z), 5.0, "control-calibrated");
    }
    report.measured["z_max_abs"] = z_max;
    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// Stein exchangeable-pair conditions
// ---------------------------------------------------------------------------

ExperimentReport verify_stein_conditions(const ExperimentConfig& cfg) {
    Timer timer;
    if (!(cfg.epsilon > 1e-4 && cfg.epsilon < 1e-2))
        throw std::invalid_argument("verify_stein_conditions: epsilon outside (1e-4, 1e-2)");
    Spectrum spectrum = cfg.resolve_spectrum();
    int n = spectrum.n();
    if (n < 2 || n > 64)
        throw std::invalid_argument("verify_stein_conditions: need 2 <= n <= 64");
    if (cfg.n != 0 && cfg.n != n)
        throw std::invalid_argument("verify_stein_conditions: spectrum size != n");
    double eps = cfg.epsilon;
    long m = cfg.m > 0 ? cfg.m : 1000000;

    CoefficientFrame frame = resolve_frame_dense(cfg, n);
    if (frame.d() == 0) {
        // default observables: one diagonal entry and both parts of an
        // off-diagonal entry
        frame = entry_frame(n, {EntrySelector::parse("D 1"), EntrySelector::parse("R 1 2"),
                                EntrySelector::parse("I 1 2")},
                            FieldTag::Complex)
                    .first;
    }
    int d = frame.d();

    // one fixed Haar rotation; both conditions are conditional on U
    RandomEngine fixed(substream(cfg.rng, kSaltFixedScene));
    Eigen::MatrixXcd u = haar_matrix(n, FieldTag::Complex, fixed);
    Eigen::MatrixXcd a = u * spectrum.values.cast<std::complex<double>>().asDiagonal() * u.adjoint();
    HermitianMatrix a_mat(a, FieldTag::Complex);

    // the identity component of A cancels in A' - A, so the drift acts on
    // the recentered matrix; build it from the recentered eigenvalues so a
    // scalar spectrum gives an exact zero target
    Eigen::MatrixXcd a_centered =
        u * spectrum.recentered().cast<std::complex<double>>().asDiagonal() * u.adjoint();
    Eigen::MatrixXcd drift_target = -(2.0 * n / (n * n - 1.0)) * a_centered;
    Eigen::MatrixXd cov_target(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Eigen::MatrixXcd& bi = frame.matrices[i].mat();
            const Eigen::MatrixXcd& bj = frame.matrices[j].mat();
            cov_target(i, j) =
                (2.0 / ((n - 1.0) * (n + 1.0))) *
                ((a_centered * a_centered * bi * bj).trace() +
                 (a_centered * a_centered * bj * bi).trace() -
                 2.0 * (a_centered * bi * a_centered * bj).trace())
                    .real();
        }

    Eigen::MatrixXcd drift_sum = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd drift_sumsq = Eigen::MatrixXd::Zero(n, n);  // of |entry|^2
    Eigen::MatrixXd cov_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd cov_sumsq = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd x0(d);
    for (int i = 0; i < d; ++i) x0[i] = (a * frame.matrices[i].mat()).trace().real();

    RandomEngine rng(substream(cfg.rng, 1));
    double inv_eps2 = 1.0 / (eps * eps);
    for (long t = 0; t < m; ++t) {
        Eigen::MatrixXcd rot = perturbation_rotation(n, eps, FieldTag::Complex, rng);
        Eigen::MatrixXcd w = u * rot;
        Eigen::MatrixXcd a_eps =
            w * spectrum.values.cast<std::complex<double>>().asDiagonal() * w.adjoint();
        Eigen::MatrixXcd diff = (a_eps - a) * inv_eps2;
        drift_sum += diff;
        drift_sumsq += diff.cwiseAbs2();
        Eigen::VectorXd dx(d);
        for (int i = 0; i < d; ++i) dx[i] = ((a_eps - a) * frame.matrices[i].mat()).trace().real();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double v = dx[i] * dx[j] * inv_eps2;
                cov_sum(i, j) += v;
                cov_sumsq(i, j) += v * v;
            }
    }

    Eigen::MatrixXcd drift_mean = drift_sum / static_cast<double>(m);
    Eigen::MatrixXd drift_var =
        (drift_sumsq / static_cast<double>(m) - drift_mean.cwiseAbs2()).cwiseMax(0.0);
    double drift_se_frob = std::sqrt(drift_var.sum() / static_cast<double>(m));

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_err(drift_mean - drift_target);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_tgt(drift_target);
    double target_op = svd_tgt.singularValues()(0);
    // a (near-)scalar spectrum has zero drift target; errors are then absolute
    double spectrum_scale = spectrum.values.cwiseAbs().maxCoeff();
    double scale = target_op > 1e-12 * spectrum_scale ? target_op : 1.0;
    double drift_rel_err = svd_err.singularValues()(0) / scale;
    double drift_rel_se = drift_se_frob / scale;
    double drift_threshold = 5.0 * eps + 5.0 * drift_rel_se;

    double cov_worst_ratio = 0.0;
    double cov_scale = d > 0 ? cov_target.cwiseAbs().maxCoeff() : 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double mean = cov_sum(i, j) / m;
            double var = std::max(0.0, cov_sumsq(i, j) / m - mean * mean);
            double se = std::sqrt(var / m);
            // the last term floors the allowance at the rounding noise of
            // tr((A' - A) B) / eps^2, so exact-zero targets do not trip it
            double allowance = 5.0 * se + 5.0 * eps * cov_scale +
                               1e-12 * (1.0 + spectrum.values.squaredNorm());
            double err = std::abs(mean - cov_target(i, j));
            double ratio = err / allowance;
            cov_worst_ratio = std::max(cov_worst_ratio, ratio);
        }

    ExperimentReport report;
    report.scenario = "stein";
    report.config_echo = cfg.to_json();
    report.measured["drift_rel_op_error"] = drift_rel_err;
    report.measured["drift_rel_se"] = drift_rel_se;
    report.measured["drift_threshold"] = drift_threshold;
    report.measured["cov_worst_allowance_ratio"] = cov_worst_ratio;
    report.measured["cov_target_max_abs"] = cov_scale;
    report.measured["sigma_sq_target"] =
        spectrum.recentered().squaredNorm() / (n * n - 1.0);
    report.measured["alpha_target"] = 2.0 * n / (n * n - 1.0);
    report.measured["x0_norm"] = x0.norm();
    add_assertion(report, "drift_rel_op_error", drift_rel_err, drift_threshold,
                  "control-calibrated");
    add_assertion(report, "cov_worst_allowance_ratio", cov_worst_ratio, 1.0,
                  "control-calibrated");
    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// marginal Gaussianity
// ---------------------------------------------------------------------------

namespace {

// draws m marginal vectors X_i = tr(A B_i); uses the partial-row fast path
// for entry-pick frames, the full sampler otherwise
Eigen::MatrixXd sample_marginals(const ExperimentConfig& cfg, const Spectrum& spectrum,
                                 const CoefficientFrame* dense_frame, long m,
                                 RngStream stream) {
    int n = spectrum.n();
    if (cfg.frame_kind == "entry_picks") {
        CompressedPicks cp = compress_picks(parse_picks(cfg.entry_picks));
        int d = static_cast<int>(cp.remapped.size());
        Eigen::MatrixXd x(m, d);
        RandomEngine rng(stream);
        for (long t = 0; t < m; ++t) {
            HermitianMatrix block = isospectral_entry_marginal(spectrum, cp.rows, cfg.field, rng);
            for (int i = 0; i < d; ++i) x(t, i) = eval_pick(block, cp.remapped[i]);
        }
        return x;
    }
    if (!dense_frame) throw std::logic_error("sample_marginals: missing dense frame");
    int d = dense_frame->d();
    Eigen::MatrixXd x(m, d);
    RandomEngine rng(stream);
    for (long t = 0; t < m; ++t) {
        HermitianMatrix a = isospectral(spectrum, cfg.field, rng);
        Eigen::VectorXd v = marginal_vector(a, *dense_frame);
        x.row(t) = v.transpose();
    }
    return x;
}

bool is_rank_one(const Spectrum& spectrum) {
    int nonzero = 0;
    for (double v : spectrum.values)
        if (std::abs(v) > 1e-12) ++nonzero;
    return nonzero == 1;
}

}  // namespace

// entry-pick frames at large n: the same norms survive compression onto
// the touched rows, and the bounds only read d and the operator norms
CoefficientFrame resolve_bound_frame(const ExperimentConfig& cfg) {
    if (cfg.frame_kind != "entry_picks")
        return resolve_frame_dense(cfg, cfg.n > 0 ? cfg.n
                                                  : cfg.resolve_spectrum().n());
    CompressedPicks cp = compress_picks(parse_picks(cfg.entry_picks));
    int small_n = std::max<int>(2, static_cast<int>(cp.rows.size()));
    return entry_frame(small_n, cp.remapped, cfg.field).first;
}

ExperimentReport run_marginal_gaussianity(const ExperimentConfig& cfg) {
    Timer timer;
    ExperimentReport report;
    report.scenario = "marginals";
    report.config_echo = cfg.to_json();

    Spectrum spectrum = cfg.resolve_spectrum();
    int n = spectrum.n();
    CoefficientFrame frame = resolve_bound_frame(cfg);
    frame.validate();
    if (frame.d() == 0) {  // trivially passing empty report
        report.measured["d"] = 0.0;
        report.runtime_seconds = timer.seconds();
        return report;
    }
    if (!frame.orthonormal || !frame.traceless)
        throw std::invalid_argument("run_marginal_gaussianity: frame must be orthonormal traceless");
    int d = frame.d();
    long m = cfg.m > 0 ? cfg.m : 10000;

    BoundReport bound = bound_t0(spectrum, frame, cfg.field);
    double scaling = bound.ingredients.at("scaling");

    const CoefficientFrame* dense = (cfg.frame_kind == "entry_picks") ? nullptr : &frame;
    Eigen::MatrixXd x = sample_marginals(cfg, spectrum, dense, m, substream(cfg.rng, 1));
    x *= scaling;

    long m_assign = (d == 1) ? m : std::min<long>(m, 2048);
    Eigen::MatrixXd x_w1 = x.topRows(m_assign);
    ControlledW1 w1 = w1_with_control(x_w1, substream(cfg.rng, kSaltControl));

    report.bound = bound;
    report.measured["w1"] = w1.w1;
    report.measured["w1_control_bias"] = w1.control_bias;
    report.measured["w1_control_sd"] = w1.control_sd;
    report.measured["w1_m"] = static_cast<double>(m_assign);
    report.samples["marginal_scaled"] = x.col(0);
    add_assertion(report, "w1", w1.w1, bound.value + w1.allowance(), "paper bound");

    if (d == 1) {
        BoundReport tv_bound = bound_t0_tv(spectrum, frame.matrices[0], cfg.field);
        auto measure = EmpiricalMeasure1D::from_data(x.col(0));
        int bins = tv_default_bins(static_cast<int>(m));
        double tv = tv_1d(measure, 0.0, 1.0, bins);
        // same-size Gaussian control for the histogram estimator's bias
        double tv_bias = 0.0, tv_var = 0.0;
        constexpr int n_ctrl = 3;
        double ctrl[n_ctrl];
        for (int c = 0; c < n_ctrl; ++c) {
            Eigen::MatrixXd g = gaussian_block(static_cast<int>(m), 1,
                                               substream(cfg.rng, kSaltControl + 100 + c));
            ctrl[c] = tv_1d(EmpiricalMeasure1D::from_data(g.col(0)), 0.0, 1.0, bins);
            tv_bias += ctrl[c];
        }
        tv_bias /= n_ctrl;
        for (double c : ctrl) tv_var += (c - tv_bias) * (c - tv_bias);
        double tv_sd = std::sqrt(tv_var / n_ctrl);
        report.measured["tv"] = tv;
        report.measured["tv_bound"] = tv_bound.value;
        report.measured["tv_control_bias"] = tv_bias;
        report.measured["tv_control_sd"] = tv_sd;
        add_assertion(report, "tv", tv, tv_bound.value + 3.0 * (tv_bias + tv_sd), "paper bound");
    }

    if (is_rank_one(spectrum)) {
        BoundReport quartic = statistic_quartic(frame, n, std::nullopt, cfg.constants);
        report.measured["quartic_statistic"] = quartic.value;
        double fitted = (quartic.value > 0.0) ? w1.w1 / quartic.value : 0.0;
        report.measured["c_r1_fitted"] = fitted;
        add_assertion(report, "c_r1_fitted", fitted, 0.0, "reported-only", true);
    }

    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// entry marginals (fast path, diagonal picks allowed)
// ---------------------------------------------------------------------------

ExperimentReport run_entry_marginals(const ExperimentConfig& cfg) {
    Timer timer;
    Spectrum spectrum = cfg.resolve_spectrum();
    if (std::abs(spectrum.trace()) > 1e-8 * spectrum.values.norm())
        throw std::invalid_argument("run_entry_marginals: spectrum must be traceless");
    int n = spectrum.n();
    std::vector<EntrySelector> picks = parse_picks(cfg.entry_picks);
    if (picks.empty()) throw std::invalid_argument("run_entry_marginals: no entry picks");
    int d = static_cast<int>(picks.size());
    long m = cfg.m > 0 ? cfg.m : 10000;

    BoundReport bound = bound_entries(spectrum, d);
    double scaling = bound.ingredients.at("scaling");

    CompressedPicks cp = compress_picks(picks);
    Eigen::MatrixXd x(m, d);
    RandomEngine rng(substream(cfg.rng, 1));
    for (long t = 0; t < m; ++t) {
        HermitianMatrix block = isospectral_entry_marginal(spectrum, cp.rows, cfg.field, rng);
        for (int i = 0; i < d; ++i) x(t, i) = scaling * eval_pick(block, cp.remapped[i]);
    }

    long m_assign = (d == 1) ? m : std::min<long>(m, 2048);
    ControlledW1 w1 = w1_with_control(x.topRows(m_assign), substream(cfg.rng, kSaltControl));

    ExperimentReport report;
    report.scenario = "entries";
    report.config_echo = cfg.to_json();
    report.bound = bound;
    report.measured["w1"] = w1.w1;
    report.measured["w1_control_bias"] = w1.control_bias;
    report.measured["w1_control_sd"] = w1.control_sd;
    report.measured["w1_m"] = static_cast<double>(m_assign);
    report.samples["entry_scaled"] = x.col(0);
    add_assertion(report, "w1", w1.w1, bound.value + w1.allowance(), "paper bound");

    // variance of each scaled coordinate; diagonal picks carry the 1 - 1/n
    // covariance correction
    for (int i = 0; i < d; ++i) {
        double mean = x.col(i).mean();
        double var = (x.col(i).array() - mean).square().sum() / m;
        double target = (picks[i].kind == EntrySelector::Kind::Diag) ? 1.0 - 1.0 / n : 1.0;
        double se = std::sqrt(2.0 / m) * target;  // var of the sample variance under Gaussian
        report.measured["var_" + picks[i].str()] = var;
        add_assertion(report, "var_z_" + picks[i].str(), std::abs(var - target) / se, 5.0,
                      "control-calibrated");
    }
    // distinct entries should be asymptotically uncorrelated
    double corr_se = 1.0 / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            double mi = x.col(i).mean(), mj = x.col(j).mean();
            double cov = ((x.col(i).array() - mi) * (x.col(j).array() - mj)).sum() / m;
            double si = std::sqrt((x.col(i).array() - mi).square().sum() / m);
            double sj = std::sqrt((x.col(j).array() - mj).square().sum() / m);
            double corr = cov / (si * sj);
            std::string name = "corr_" + picks[i].str() + "_" + picks[j].str();
            report.measured[name] = corr;
            add_assertion(report, name + "_abs_z", std::abs(corr) / corr_se, 5.0,
                          "control-calibrated");
        }

    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// submatrix semicircle
// ---------------------------------------------------------------------------

ExperimentReport run_submatrix_semicircle(const ExperimentConfig& cfg) {
    Timer timer;
    Spectrum spectrum = cfg.resolve_spectrum();
    if (std::abs(spectrum.trace()) > 1e-8 * spectrum.values.norm())
        throw std::invalid_argument("run_submatrix_semicircle: spectrum must be traceless");
    int n = spectrum.n();
    int k = cfg.k > 0 ? cfg.k : 32;
    if (k > 64) throw std::invalid_argument("run_submatrix_semicircle: k > 64");
    int replicas = cfg.replicas > 0 ? cfg.replicas : 200;

    BoundReport bound = bound_submatrix_semicircle(spectrum, k, 0.2, cfg.constants);
    double scaling = bound.ingredients.at("scaling") / std::sqrt(static_cast<double>(k));
    bool vacuous = bound.value > 1.0;

    std::vector<int> rows(k);
    for (int i = 0; i < k; ++i) rows[i] = i + 1;

    std::vector<Eigen::VectorXd> trunc_eigs(replicas), gue_eigs(replicas);
    std::vector<double> sc_dist(replicas);
    parallel_indices(replicas, [&](int r) {
        RandomEngine rng(substream(cfg.rng, kSaltReplica + r));
        HermitianMatrix block = isospectral_entry_marginal(spectrum, rows, cfg.field, rng);
        Eigen::VectorXd ev = block.eigenvalues() * scaling;
        sc_dist[r] = (k > 1) ? w1_spectral_semicircle(EmpiricalMeasure1D{ev}) : 0.0;
        trunc_eigs[r] = ev;
        RandomEngine gue_rng(substream(cfg.rng, kSaltReplica + 500000 + r));
        HermitianMatrix g = gaussian_ensemble(k, cfg.field, gue_rng);
        gue_eigs[r] = g.eigenvalues() / std::sqrt(static_cast<double>(k));
    });

    Eigen::VectorXd pooled(static_cast<long>(replicas) * k), pooled_gue(static_cast<long>(replicas) * k);
    double mean_sc = 0.0;
    ExperimentReport report;
    for (int r = 0; r < replicas; ++r) {
        pooled.segment(static_cast<long>(r) * k, k) = trunc_eigs[r];
        pooled_gue.segment(static_cast<long>(r) * k, k) = gue_eigs[r];
        mean_sc += sc_dist[r];
        report.replica_rows.push_back({{"w1_semicircle", sc_dist[r]},
                                       {"min_eig", trunc_eigs[r].minCoeff()},
                                       {"max_eig", trunc_eigs[r].maxCoeff()}});
    }
    mean_sc /= replicas;
    double pooled_w1 = w1_1d(EmpiricalMeasure1D::from_data(pooled),
                             EmpiricalMeasure1D::from_data(pooled_gue));

    report.scenario = "submatrix";
    report.config_echo = cfg.to_json();
    report.bound = bound;
    report.measured["pooled_w1_vs_gue"] = pooled_w1;
    report.measured["mean_w1_semicircle"] = mean_sc;
    report.measured["bound_vacuous"] = vacuous ? 1.0 : 0.0;
    report.samples["pooled_eigs"] = pooled;
    report.samples["pooled_gue_eigs"] = pooled_gue;
    if (k == 1) {
        // degenerate truncation: a single scaled entry, no spectral claim
        add_assertion(report, "pooled_w1_vs_gue", pooled_w1, 0.0, "reported-only", true);
    } else if (vacuous) {
        // the theorem's finite-n right-hand side exceeds 1 at this scale, so
        // the run downgrades to property-based checks and says so
        add_assertion(report, "pooled_w1_vs_gue", pooled_w1, 0.1, "control-calibrated");
        add_assertion(report, "mean_w1_semicircle", mean_sc, 0.2, "control-calibrated");
        add_assertion(report, "bound_value_vacuous_at_this_scale", bound.value, 0.0,
                      "reported-only", true);
    } else {
        add_assertion(report, "mean_w1_semicircle", mean_sc, bound.value, "paper bound");
        add_assertion(report, "pooled_w1_vs_gue", pooled_w1, 0.1, "control-calibrated");
    }
    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// Schur-Horn diagonal
// ---------------------------------------------------------------------------

namespace {

struct DiagonalDraw {
    double w1 = 0.0;
    double max_stat = 0.0;
    Eigen::VectorXd diag;
};

DiagonalDraw schur_horn_replica(const Spectrum& spectrum, FieldTag field, RngStream stream) {
    int n = spectrum.n();
    RandomEngine rng(stream);
    Eigen::MatrixXcd u = haar_matrix(n, field, rng);
    // only the diagonal of U Lambda U* is needed: a_ii = sum_j |u_ij|^2 l_j
    Eigen::VectorXd diag = u.cwiseAbs2() * spectrum.values;
    double mean = spectrum.trace() / n;
    double sigma = spectrum.recentered().norm() / n;
    DiagonalDraw out;
    out.diag = diag;
    out.w1 = w1_1d_vs_gaussian(EmpiricalMeasure1D::from_data(diag), mean, sigma);
    out.max_stat = (diag.maxCoeff() - mean) / (sigma * std::sqrt(std::log(static_cast<double>(n))));
    return out;
}

}  // namespace

ExperimentReport run_schur_horn(const ExperimentConfig& cfg) {
    Timer timer;
    Spectrum spectrum = cfg.resolve_spectrum();
    int n = spectrum.n();
    if (n < 4) throw std::invalid_argument("run_schur_horn: n too small");
    int replicas = cfg.replicas > 0 ? cfg.replicas : 20;

    // the Gaussian claim needs ||Lambda-tilde||_op = o(n); flag configs where
    // the operator norm is already a macroscopic fraction of n
    double op = spectrum.recentered().cwiseAbs().maxCoeff();
    bool hypothesis_ok = op <= 0.5 * n;

    std::vector<DiagonalDraw> draws(replicas);
    parallel_indices(replicas, [&](int r) {
        draws[r] = schur_horn_replica(spectrum, cfg.field, substream(cfg.rng, kSaltReplica + r));
    });

    ExperimentReport report;
    report.scenario = "schurhorn";
    report.config_echo = cfg.to_json();
    int w1_ok = 0;
    double max_stat_lo = 1e300, max_stat_hi = -1e300, mean_w1 = 0.0;
    Eigen::VectorXd all_diag(static_cast<long>(replicas) * n);
    for (int r = 0; r < replicas; ++r) {
        if (draws[r].w1 <= 0.1) ++w1_ok;
        max_stat_lo = std::min(max_stat_lo, draws[r].max_stat);
        max_stat_hi = std::max(max_stat_hi, draws[r].max_stat);
        mean_w1 += draws[r].w1;
        all_diag.segment(static_cast<long>(r) * n, n) = draws[r].diag;
        report.replica_rows.push_back(
            {{"w1_vs_gaussian", draws[r].w1}, {"max_diag_stat", draws[r].max_stat}});
    }
    mean_w1 /= replicas;
    report.measured["mean_w1"] = mean_w1;
    report.measured["replicas_w1_below_0p1"] = static_cast<double>(w1_ok);
    report.measured["max_diag_stat_min"] = max_stat_lo;
    report.measured["max_diag_stat_max"] = max_stat_hi;
    report.measured["hypothesis_op_over_n"] = op / n;
    report.samples["diag_entries"] = all_diag;
    bool reported = !hypothesis_ok;
    add_assertion(report, "replicas_w1_above_0p1",
                  static_cast<double>(replicas - w1_ok),
                  std::max(0.0, replicas - std::ceil(0.9 * replicas)), "control-calibrated",
                  reported);
    add_assertion(report, "max_diag_stat_upper", max_stat_hi, 3.0, "control-calibrated", reported);
    add_assertion(report, "max_diag_stat_lower_margin", 0.5 - max_stat_lo, 0.0,
                  "control-calibrated", reported);

    // coarse n-ladder for the sqrt(log n) trend, a few cheap replicas each
    for (int nn = n / 4; nn >= 64; nn /= 4) {
        Spectrum small = (cfg.spectrum_kind == "pm_sqrt_n" && nn % 2 == 0)
                             ? Spectrum::pm_sqrt_n(nn)
                             : Spectrum{spectrum.values.head(nn)};
        double acc = 0.0;
        constexpr int ladder_reps = 3;
        for (int r = 0; r < ladder_reps; ++r)
            acc += schur_horn_replica(small, cfg.field,
                                      substream(cfg.rng, kSaltReplica + 700000 + nn + r))
                       .max_stat;
        report.measured["ladder_max_stat_n" + std::to_string(nn)] = acc / ladder_reps;
    }
    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// induced quantum states
// ---------------------------------------------------------------------------

ExperimentReport run_induced_state(const ExperimentConfig& cfg) {
    Timer timer;
    int n = cfg.n, s = cfg.s;
    if (n < 2 || s < 1) throw std::invalid_argument("run_induced_state: need n >= 2, s >= 1");
    if (static_cast<long>(n) * s > (1L << 22))
        throw std::invalid_argument("run_induced_state: n*s exceeds the memory guard 2^22");
    long m = cfg.m > 0 ? cfg.m : 2048;

    CoefficientFrame frame = resolve_frame_dense(cfg, n);
    frame.validate();
    if (!frame.traceless)
        throw std::invalid_argument("run_induced_state: frame must be traceless");
    int d = frame.d();
    BoundReport bound = statistic_quartic(frame, n, s, cfg.constants);
    double scaling = bound.ingredients.at("scaling");

    Eigen::MatrixXd x(m, d);
    Eigen::MatrixXcd rho_sum = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd rho_sumsq = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd entry12(m);
    RandomEngine rng(substream(cfg.rng, 1));
    const double sqrt2 = std::sqrt(2.0);
    for (long t = 0; t < m; ++t) {
        HermitianMatrix rho = induced_state(n, s, rng);
        for (int i = 0; i < d; ++i)
            x(t, i) = scaling * (rho.mat() * frame.matrices[i].mat()).trace().real();
        rho_sum += rho.mat();
        rho_sumsq += rho.mat().cwiseAbs2();
        entry12[t] = scaling * sqrt2 * rho.mat()(0, 1).real();
    }

    long m_assign = (d == 1) ? m : std::min<long>(m, 2048);
    ControlledW1 w1 = w1_with_control(x.topRows(m_assign), substream(cfg.rng, kSaltControl));

    ExperimentReport report;
    report.scenario = "induced";
    report.config_echo = cfg.to_json();
    report.bound = bound;
    report.measured["w1"] = w1.w1;
    report.measured["w1_control_bias"] = w1.control_bias;
    report.measured["w1_control_sd"] = w1.control_sd;
    report.measured["w1_m"] = static_cast<double>(m_assign);
    report.samples["induced_scaled"] = x.col(0);

    // fitted universal constant: (empirical W1) * sqrt(s) / sum ||B_j||_4^2.
    // Uses the raw W1 (the control bias is reported separately): subtracting
    // the bias first leaves a noise-dominated numerator whose sign flips
    // between seeds, making the reported constant useless for comparison.
    double quartic_sum = bound.ingredients.at("sum_schatten4_sq");
    double fitted = w1.w1 * std::sqrt(static_cast<double>(s)) / quartic_sum;
    report.measured["c_r1_fitted"] = fitted;
    add_assertion(report, "c_r1_fitted", fitted, 0.0, "reported-only", true);

    // E rho = I/n entrywise within 5 SE
    double mean_rho_worst_z = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::complex<double> mean = rho_sum(i, j) / static_cast<double>(m);
            double var = std::max(0.0, rho_sumsq(i, j) / m - std::norm(mean));
            double se = std::sqrt(var / m);
            double target = (i == j) ? 1.0 / n : 0.0;
            if (se > 0.0)
                mean_rho_worst_z = std::max(mean_rho_worst_z, std::abs(mean - target) / se);
        }
    report.measured["mean_rho_worst_z"] = mean_rho_worst_z;
    add_assertion(report, "mean_rho_worst_z", mean_rho_worst_z, 5.0, "control-calibrated");

    // one scaled off-diagonal entry against its traceless-GUE limit N(0,1)
    double entry_w1 = w1_1d_vs_gaussian(EmpiricalMeasure1D::from_data(entry12), 0.0, 1.0);
    report.measured["entry12_w1_vs_gaussian"] = entry_w1;
    add_assertion(report, "entry12_w1_vs_gaussian", entry_w1, 0.0, "reported-only", true);

    report.runtime_seconds = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------
// invariant ensembles
// ---------------------------------------------------------------------------

ExperimentReport run_invariant_ensemble(const ExperimentConfig& cfg) {
    Timer timer;
    int n = cfg.n;
    if (n < 2) throw std::invalid_argument("run_invariant_ensemble: n < 2");
    long m = cfg.m > 0 ? cfg.m : 2000;

    CoefficientFrame frame = resolve_frame_dense(cfg, n);
    frame.validate();
    if (!frame.orthonormal || !frame.traceless)
        throw std::invalid_argument("run_invariant_ensemble: frame must be orthonormal traceless");
    int d = frame.d();

    bool quadratic = cfg.potential_coeffs.empty() ||
                     (cfg.potential_coeffs.size() == 3 && cfg.potential_coeffs[0] == 0.0 &&
                      cfg.potential_coeffs[1] == 0.0 && cfg.potential_coeffs[2] == 1.0);
    bool shortcut = quadratic && cfg.gue_shortcut;

    InvariantEnsembleSpec mcmc_spec;
    if (!shortcut) {
        std::vector<double> coeffs =
            cfg.potential_coeffs.empty() ? std::vector<double>{0.0, 0.0, 1.0} : cfg.potential_coeffs;
        mcmc_spec.potential = [coeffs](double t) {
            double acc = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
            return acc;
        };
        mcmc_spec.n = n;
        mcmc_spec.burn_in = cfg.burn_in > 0 ? cfg.burn_in : 10000L * n;
        mcmc_spec.mcmc_steps = cfg.mcmc_steps > 0 ? cfg.mcmc_steps : mcmc_spec.burn_in + 1000;
        mcmc_spec.mcmc_step_size =
            cfg.mcmc_step_size > 0.0 ? cfg.mcmc_step_size : 1.0 / std::sqrt(static_cast<double>(n));
    }

    Eigen::MatrixXd x_raw(m, d);
    std::vector<Spectrum> spectra;
    spectra.reserve(m);
    RandomEngine rng(substream(cfg.rng, 1));
    for (long t = 0; t < m; ++t) {
        HermitianMatrix a = [&] {
            if (shortcut) {
                // density exp(-n tr A^2) is the GUE law rescaled by 1/sqrt(2n)
                HermitianMatrix g = gaussian_ensemble(n, cfg.field, rng);
                return HermitianMatrix(g.mat() / std::sqrt(2.0 * n), cfg.field);
            }
            Spectrum lam = invariant_ensemble_eigs(mcmc_spec, rng);
            return isospectral(lam, cfg.field, rng);
        }();
        spectra.push_back(Spectrum{a.eigenvalues()});
        Eigen::VectorXd v = marginal_vector(a, frame);
        x_raw.row(t) = v.transpose();
    }

    BoundReport bound = bound_invariant(spectra, frame, cfg.constants);
    double scaling = bound.ingredients.at("scaling");
    Eigen::MatrixXd x = x_raw * scaling;

    long m_assign = (d == 1) ? m : std::min<long>(m, 2048);
    ControlledW1 w1 = w1_with_control(x.topRows(m_assign), substream(cfg.rng, kSaltControl));

    ExperimentReport report;
    report.scenario = "invariant";
    report.config_echo = cfg.to_json();
    report.bound = bound;
    report.measured["w1"] = w1.w1;
    report.measured["w1_control_bias"] = w1.control_bias;
    report.measured["w1_control_sd"] = w1.control_sd;
    report.samples["invariant_scaled"] = x.col(0);

    double sum_inv = bound.ingredients.at("sum_inv_srank");
    double kappa_fitted = std::max(0.0, w1.w1 - w1.control_bias) *
                          std::sqrt(static_cast<double>(n)) / sum_inv;
    report.measured["kappa_fitted"] = kappa_fitted;
    add_assertion(report, "kappa_fitted", kappa_fitted, 0.0, "reported-only", true);

    double scaled_bound = bound.ingredients.at("bound_scaled");
    bool vacuous = scaled_bound > 1.0;
    add_assertion(report, "w1", w1.w1, scaled_bound + w1.allowance(), "paper bound", vacuous);
    if (vacuous)
        add_assertion(report, "bound_value_vacuous_at_this_scale", scaled_bound, 0.0,
                      "reported-only", true);

    // fluctuation ingredient two ways: plug-in vs bootstrap resampling
    double mean_hs = bound.ingredients.at("mean_hs");
    double plug_in = bound.ingredients.at("mean_abs_hs_dev");
    RandomEngine boot_rng(substream(cfg.rng, kSaltControl + 7));
    double boot = 0.0;
    constexpr int n_boot = 100;
    for (int b = 0; b < n_boot; ++b) {
        double acc = 0.0, hs_mean_b = 0.0;
        std::vector<double> hs_b(m);
        for (long i = 0; i < m; ++i) {
            long pick = static_cast<long>(boot_rng.uniform() * m);
            if (pick >= m) pick = m - 1;
            hs_b[i] = spectra[static_cast<std::size_t>(pick)].recentered().norm();
            hs_mean_b += hs_b[i];
        }
        hs_mean_b /= m;
        for (long i = 0; i < m; ++i) acc += std::abs(hs_b[i] - hs_mean_b);
        boot += acc / m;
    }
    boot /= n_boot;
    report.measured["hs_fluctuation_plug_in"] = plug_in;
    report.measured["hs_fluctuation_bootstrap"] = boot;
    double agreement = (plug_in > 0.0) ? std::abs(boot - plug_in) / plug_in : 0.0;
    report.measured["hs_fluctuation_rel_disagreement"] = agreement;
    add_assertion(report, "hs_fluctuation_rel_disagreement", agreement, 0.1,
                  "control-calibrated", mean_hs == 0.0);

    report.runtime_seconds = timer.seconds();
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.scenario == "oracles") return verify_moment_oracles(cfg);
    if (cfg.scenario == "stein") return verify_stein_conditions(cfg);
    if (cfg.scenario == "marginals") return run_marginal_gaussianity(cfg);
    if (cfg.scenario == "entries") return run_entry_marginals(cfg);
    if (cfg.scenario == "submatrix") return run_submatrix_semicircle(cfg);
    if (cfg.scenario == "schurhorn") return run_schur_horn(cfg);
    if (cfg.scenario == "induced") return run_induced_state(cfg);
    if (cfg.scenario == "invariant") return run_invariant_ensemble(cfg);
    throw std::invalid_argument("unknown scenario: " + cfg.scenario);
}

}  // namespace isospec
