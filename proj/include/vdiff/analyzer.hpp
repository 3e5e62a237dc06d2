#pragma once

// Predictions of qualitative properties from the algebraic criteria, their
// verification against simulated trajectories, and the named scenarios.

#include "vdiff/semigroup.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vdiff {

/// What to predict/verify. `interval` is used by interval_invariance,
/// `subspace` by subspace_invariance, `dominating` by domination (this
/// scenario dominated by `dominating`).
struct Target {
    PropertyKind kind = PropertyKind::positivity;
    std::optional<OrderInterval> interval;
    std::optional<Subspace> subspace;
    std::shared_ptr<const Scenario> dominating;

    static Target positivity();
    static Target linf_contraction();
    static Target interval_invariance(OrderInterval interval);
    static Target subspace_invariance(Subspace subspace);
    static Target dominated_by(Scenario dominating);
    static Target scalar_domination();
    static Target decay();
    static Target irreducibility();
    static Target symmetry();

    std::string label() const;
};

/// The standard target list: positivity, L-infinity contraction,
/// irreducibility, decay, symmetry, and scalar domination for tensor-form
/// scenarios.
std::vector<Target> default_targets(const Scenario& scenario);

enum class Applicability {
    applicable,
    necessary_only,  ///< only a necessary condition is available
    inapplicable,    ///< hypotheses of the characterization fail
};

struct Criterion {
    std::string name;
    bool value = false;
};

struct Prediction {
    Target target;
    bool predicted = false;
    Applicability applicability = Applicability::applicable;
    std::vector<Criterion> criterion_trace;
    std::string note;
};

struct PredictOptions {
    int n_elements = 16;  ///< mesh used for the discrete kernel dimension
    int samples = 256;    ///< budget of the randomized lattice tests
    std::uint64_t seed = kDefaultSeed;
};

std::vector<Prediction> predict(const Scenario& scenario, const std::vector<Target>& targets,
                                const PredictOptions& options = {});

enum class Verdict {
    confirmed,
    refuted_prediction,
    no_counterexample_found,
    inapplicable,
    numerical_error,
};

std::string to_string(Verdict verdict);
std::string to_string(Applicability applicability);

struct SimConfig {
    int n_elements = 64;
    double dt = 0.0;  ///< <= 0 selects h^2/2
    double t_end = 1.0;
    Scheme scheme = Scheme::implicit_euler;
    MassKind mass = MassKind::lumped;
    int random_trials = 20;    ///< random data per predicted-true row
    int witness_trials = 200;  ///< random data per witness search
    double tol = 1e-9;
    double decay_threshold = 1e-2;  ///< minimal rate counted as decay
    std::uint64_t seed = kDefaultSeed;
    int max_snapshots = 101;  ///< time samples kept in the row's sample trajectory
    bool parallel = true;
};

struct ReportRow {
    Prediction prediction;
    PropertyObservation observation;
    Verdict verdict = Verdict::no_counterexample_found;
    int trials = 0;
    std::string error;
    /// Witness trajectory if one was found, otherwise the first trajectory run.
    std::optional<Trajectory> sample;
};

struct Report {
    Scenario scenario;
    SimConfig config;
    std::vector<ReportRow> rows;

    bool any_refuted() const;
    bool any_numerical_error() const;
};

/// Runs every prediction against simulation. Rows are independent and run
/// concurrently when config.parallel is set; results keep the input order and
/// do not depend on scheduling.
Report verify(const Scenario& scenario, const std::vector<Prediction>& predictions,
              const SimConfig& config);

enum class Preset { dirichlet, neumann, robin, kirchhoff, anti_kirchhoff, mixed_dn, custom };

std::optional<Preset> preset_from_string(const std::string& name);
std::string to_string(Preset preset);
std::vector<Preset> all_presets();

/// D = I and S = rho I (robin only), with
///   dirichlet: Y = {0}, neumann: Y = W, robin: Y = W,
///   kirchhoff: Y = span{1}, anti_kirchhoff: Y = span{1}^perp,
///   mixed_dn: Y_left = {0}, Y_right = W, custom: the neumann template.
Scenario preset(Preset name, Eigen::Index m, double rho = 1.0);
/// Throws std::invalid_argument on an unknown name.
Scenario preset(const std::string& name, Eigen::Index m, double rho = 1.0);

}  // namespace vdiff
