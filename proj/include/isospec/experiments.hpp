#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isospec/bounds.hpp"
#include "isospec/linalg.hpp"
#include "isospec/metrics.hpp"
#include "isospec/rng.hpp"
#include "isospec/samplers.hpp"

namespace isospec {

// Derives a reproducible child stream; used for replicas and control runs
// so that parallel execution never changes the draw sequence.
RngStream substream(RngStream base, std::uint64_t salt);

// Worker cap from ISOSPEC_THREADS (affects speed only, never results).
int worker_count();

struct ExperimentConfig {
    std::string scenario;
    int n = 0;
    int d = 1;
    int k = 0;
    int s = 0;
    long m = 0;          // Monte Carlo sample count
    int replicas = 1;
    double epsilon = 1e-3;
    FieldTag field = FieldTag::Complex;
    RngStream rng;
    ConstantsConfig constants;

    // spectrum: "pm_sqrt_n" | "explicit" | "file"
    std::string spectrum_kind = "pm_sqrt_n";
    std::vector<double> spectrum_values;
    std::string spectrum_file;

    // frame: "entry_picks" | "random_traceless" | "explicit"
    std::string frame_kind = "entry_picks";
    std::vector<std::string> entry_picks;
    std::vector<nlohmann::json> frame_matrices;

    // invariant-ensemble potential: polynomial coefficients of V (low to
    // high degree); empty means V(x) = x^2
    std::vector<double> potential_coeffs;
    long mcmc_steps = 0;
    double mcmc_step_size = 0.0;
    long burn_in = 0;
    bool gue_shortcut = true;  // sample V(x)=x^2 spectra via scaled GUE

    Spectrum resolve_spectrum() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// One pass/fail (or reported-only) check inside a report.  Every assertion
// pairs a measured value with the threshold it was held to and where that
// threshold came from.
struct Assertion {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string provenance;  // "paper bound" | "control-calibrated" | "reported-only"
    bool pass = true;
    bool reported_only = false;
};

struct ExperimentReport {
    std::string scenario;
    std::map<std::string, double> measured;
    std::optional<BoundReport> bound;
    std::vector<Assertion> assertions;
    double runtime_seconds = 0.0;
    nlohmann::json config_echo;

    // named raw sample arrays, kept for plot emission
    std::map<std::string, Eigen::VectorXd> samples;
    // one map per replica, turned into replicas.csv
    std::vector<std::map<std::string, double>> replica_rows;

    bool passed() const;
    // runtime is reported on the summary line, not serialized: report.json
    // must be byte-identical across reruns
    nlohmann::json to_json() const;
    std::string replicas_csv() const;
    std::string summary_line() const;
};

// The coefficient frame a bound evaluation should use.  Entry-pick frames
// are compressed onto the touched rows so large n never materializes an
// n x n matrix; the surviving quantities (d, operator norms) are unchanged.
CoefficientFrame resolve_bound_frame(const ExperimentConfig& cfg);

ExperimentReport verify_moment_oracles(const ExperimentConfig& cfg);
ExperimentReport verify_stein_conditions(const ExperimentConfig& cfg);
ExperimentReport run_marginal_gaussianity(const ExperimentConfig& cfg);
ExperimentReport run_entry_marginals(const ExperimentConfig& cfg);
ExperimentReport run_submatrix_semicircle(const ExperimentConfig& cfg);
ExperimentReport run_schur_horn(const ExperimentConfig& cfg);
ExperimentReport run_induced_state(const ExperimentConfig& cfg);
ExperimentReport run_invariant_ensemble(const ExperimentConfig& cfg);

// dispatch by cfg.scenario
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace isospec
