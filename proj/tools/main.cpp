#include "config.hpp"
#include "report_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace vdiff;
using namespace vdiff::cli;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kConfig = 2, kNumerical = 3, kNotSymmetric = 4 };

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_elements;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::string predictions;
    std::optional<int> k;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "Run configuration (JSON)")->required();
    cmd->add_option("--out", f.out, "Output directory (overrides output.dir)");
    cmd->add_option("--seed", f.seed, "Seed for every randomized search");
    cmd->add_option("--n-elements", f.n_elements, "Number of mesh elements")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--dt", f.dt, "Time step")->check(CLI::PositiveNumber);
    cmd->add_option("--t-end", f.t_end, "Final time")->check(CLI::PositiveNumber);
}

RunConfig load(const Flags& f) {
    RunConfig rc = load_config(f.config);
    if (!f.out.empty()) rc.out_dir = f.out;
    if (f.seed) rc.sim.seed = rc.predict.seed = *f.seed;
    if (f.n_elements) rc.sim.n_elements = *f.n_elements;
    if (f.dt) rc.sim.dt = *f.dt;
    if (f.t_end) rc.sim.t_end = *f.t_end;
    if (f.k) rc.spectrum_k = *f.k;
    const double dt = rc.sim.dt > 0 ? rc.sim.dt : default_dt(build_mesh(rc.sim.n_elements));
    if (rc.sim.t_end < dt) throw ConfigError("time.t_end", "must be at least one time step");
    return rc;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_name(std::size_t i, const Target& t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "row_%02zu_", i);
    return buf + to_string(t.kind) + ".csv";
}

void print_predictions(const std::vector<Prediction>& ps) {
    for (const Prediction& p : ps) {
        std::cout << p.target.label() << ": " << (p.predicted ? "true" : "false");
        if (p.applicability != Applicability::applicable) std::cout << " (" << to_string(p.applicability) << ")";
        std::cout << '\n';
    }
}

int cmd_analyze(const Flags& f) {
    const RunConfig rc = load(f);
    const auto predictions = predict(rc.scenario, rc.targets, rc.predict);
    fs::create_directories(rc.out_dir);
    write_file(rc.out_dir / "predictions.json", dump(predictions_document(rc.scenario, predictions)));
    print_predictions(predictions);
    return kOk;
}

int cmd_verify(const Flags& f) {
    const RunConfig rc = load(f);
    auto predictions = predict(rc.scenario, rc.targets, rc.predict);
    if (!f.predictions.empty()) {
        apply_prediction_overrides(predictions, parse_json_text(read_file(f.predictions)));
    }
    const Report report = verify(rc.scenario, predictions, rc.sim);

    fs::create_directories(rc.out_dir);
    std::vector<std::string> names(report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& row = report.rows[i];
        if (!row.sample) continue;
        names[i] = csv_name(i, row.prediction.target);
        std::ostringstream csv;
        write_trajectory_csv(csv, *row.sample);
        write_file(rc.out_dir / names[i], csv.str());
    }
    write_file(rc.out_dir / "report.json", dump(report_document(report, names)));

    for (const ReportRow& row : report.rows) {
        std::cout << row.prediction.target.label() << ": predicted " << (row.prediction.predicted ? "true" : "false")
                  << ", " << to_string(row.verdict) << " (worst " << row.observation.worst_violation << ", "
                  << row.trials << " trials)";
        if (!row.error.empty()) std::cout << " error: " << row.error;
        std::cout << '\n';
    }
    if (report.any_numerical_error()) return kNumerical;
    return report.any_refuted() ? kRefuted : kOk;
}

int cmd_spectrum(const Flags& f) {
    const RunConfig rc = load(f);
    const DiscreteForm form = assemble(rc.scenario, build_mesh(rc.sim.n_elements));
    if (!is_symmetric(form)) {
        std::cerr << "spectrum: scenario '" << rc.scenario.name << "' is not symmetric; use verify instead\n";
        return kNotSymmetric;
    }
    if (rc.spectrum_k > form.n_constrained()) {
        throw ConfigError("spectrum.k", "exceeds the number of unknowns (" + std::to_string(form.n_constrained()) + ")");
    }
    const auto pairs = eigenpairs(form, rc.spectrum_k, rc.spectrum_mass);
    fs::create_directories(rc.out_dir);
    std::ostringstream values, vectors;
    write_spectrum_csv(values, pairs);
    write_eigenvector_csv(vectors, form, pairs);
    write_file(rc.out_dir / "spectrum.csv", values.str());
    write_file(rc.out_dir / "eigenvectors.csv", vectors.str());
    for (std::size_t i = 0; i < pairs.size(); ++i) std::cout << "lambda_" << i + 1 << " = " << pairs[i].lambda << '\n';
    return kOk;
}

int cmd_presets() {
    for (const Preset p : all_presets()) {
        const Scenario s = preset(p, 2);
        std::cout << to_string(p) << ": Y_left dim " << s.y_left.dim() << ", Y_right dim " << s.y_right.dim()
                  << " (m = 2), S = " << (p == Preset::robin ? "rho I" : "0") << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vector-valued diffusion: qualitative property analyzer and simulator"};
    app.require_subcommand(1);
    Flags f;
    auto* analyze = app.add_subcommand("analyze", "Predict properties from the algebraic criteria");
    auto* verify_cmd = app.add_subcommand("verify", "Predict, simulate and report verdicts");
    auto* spectrum = app.add_subcommand("spectrum", "Smallest eigenvalues and eigenvectors");
    auto* presets = app.add_subcommand("presets", "List the named scenarios");
    add_common(analyze, f);
    add_common(verify_cmd, f);
    add_common(spectrum, f);
    verify_cmd->add_option("--predictions", f.predictions, "Predictions file overriding the predicted values");
    spectrum->add_option("--k", f.k, "Number of eigenpairs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*analyze) return cmd_analyze(f);
        if (*verify_cmd) return cmd_verify(f);
        if (*spectrum) return cmd_spectrum(f);
        if (*presets) return cmd_presets();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (smallest pivot " << e.smallest_pivot() << ")\n";
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
