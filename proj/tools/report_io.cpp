#include "report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vdiff::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_or_null(v(i)));
    return a;
}

json piecewise_json(const PiecewiseMatrix& p) {
    json values = json::array();
    for (const Mat& v : p.values()) values.push_back(to_json(v));
    return {{"breakpoints", p.breakpoints()}, {"values", values}};
}

json subspace_json(const Subspace& y) {
    json basis = json::array();
    for (Eigen::Index j = 0; j < y.dim(); ++j) basis.push_back(vec_json(y.basis().col(j)));
    return {{"dim", y.dim()}, {"basis", basis}};
}

}  // namespace

json to_json(const Mat& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(vec_json(a.row(i).transpose()));
    return rows;
}

json to_json(const Scenario& s) {
    json j = {{"name", s.name},
              {"m", s.m},
              {"diffusion", piecewise_json(s.diffusion)},
              {"s_left", to_json(s.s_left)},
              {"s_right", to_json(s.s_right)},
              {"y_left", subspace_json(s.y_left)},
              {"y_right", subspace_json(s.y_right)},
              {"potential", s.potential ? piecewise_json(*s.potential) : json(nullptr)},
              {"gamma", s.gamma}};
    return j;
}

json to_json(const Target& t) {
    json params = json::object();
    if (t.interval) params = {{"lower", vec_json(t.interval->lower())}, {"upper", vec_json(t.interval->upper())}};
    if (t.subspace) params = {{"subspace", subspace_json(*t.subspace)}};
    if (t.dominating) params = {{"dominating", to_json(*t.dominating)}};
    return {{"property", to_string(t.kind)}, {"label", t.label()}, {"parameters", params}};
}

json to_json(const Prediction& p) {
    json trace = json::array();
    for (const Criterion& c : p.criterion_trace) trace.push_back({{"name", c.name}, {"value", c.value}});
    json j = to_json(p.target);
    j["predicted"] = p.predicted;
    j["applicability"] = to_string(p.applicability);
    j["criterion_trace"] = trace;
    j["note"] = p.note;
    return j;
}

json to_json(const PropertyObservation& o) {
    json w = nullptr;
    if (o.witness) w = {{"time", o.witness->time}, {"node", o.witness->node}, {"component", o.witness->component}};
    return {{"property", to_string(o.property)},
            {"holds", o.holds},
            {"worst_violation", o.worst_violation},
            {"tolerance", o.tolerance},
            {"witness", w}};
}

json predictions_document(const Scenario& scenario, const std::vector<Prediction>& predictions) {
    json rows = json::array();
    for (const Prediction& p : predictions) rows.push_back(to_json(p));
    return {{"schema_version", kSchemaVersion}, {"scenario", to_json(scenario)}, {"predictions", rows}};
}

void apply_prediction_overrides(std::vector<Prediction>& predictions, const json& doc) {
    if (!doc.is_object() || !doc.contains("predictions") || !doc["predictions"].is_array()) {
        throw ConfigError("predictions", "expected a predictions document with a 'predictions' array");
    }
    const json& rows = doc["predictions"];
    if (rows.size() != predictions.size()) {
        throw ConfigError("predictions", "has " + std::to_string(rows.size()) + " rows, the config yields " +
                                             std::to_string(predictions.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = "predictions[" + std::to_string(i) + "]";
        const json& r = rows[i];
        if (!r.is_object() || !r.contains("label") || !r["label"].is_string()) throw ConfigError(where + ".label", "missing");
        if (r["label"].get<std::string>() != predictions[i].target.label()) {
            throw ConfigError(where + ".label", "'" + r["label"].get<std::string>() + "' does not match target '" +
                                                    predictions[i].target.label() + "'");
        }
        if (!r.contains("predicted") || !r["predicted"].is_boolean()) throw ConfigError(where + ".predicted", "expected a boolean");
        const bool predicted = r["predicted"].get<bool>();
        if (predicted != predictions[i].predicted) {
            predictions[i].predicted = predicted;
            predictions[i].note += (predictions[i].note.empty() ? "" : "; ") + std::string("predicted value overridden");
        }
    }
}

json report_document(const Report& report, const std::vector<std::string>& csv_names) {
    const SimConfig& c = report.config;
    json config = {{"n_elements", c.n_elements},
                   {"dt", c.dt > 0 ? c.dt : default_dt(build_mesh(c.n_elements))},
                   {"t_end", c.t_end},
                   {"scheme", to_string(c.scheme)},
                   {"mass", to_string(c.mass)},
                   {"random_trials", c.random_trials},
                   {"witness_trials", c.witness_trials},
                   {"tol", c.tol},
                   {"decay_threshold", c.decay_threshold},
                   {"seed", c.seed}};
    json rows = json::array();
    json summary = {{"confirmed", 0}, {"refuted_prediction", 0}, {"no_counterexample_found", 0},
                    {"inapplicable", 0}, {"numerical_error", 0}};
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& r = report.rows[i];
        json row = to_json(r.prediction);
        row["observation"] = to_json(r.observation);
        row["verdict"] = to_string(r.verdict);
        row["trials"] = r.trials;
        row["error"] = r.error.empty() ? json(nullptr) : json(r.error);
        row["trajectory_csv"] = i < csv_names.size() && !csv_names[i].empty() ? json(csv_names[i]) : json(nullptr);
        rows.push_back(row);
        summary[to_string(r.verdict)] = summary[to_string(r.verdict)].get<int>() + 1;
    }
    return {{"schema_version", kSchemaVersion},
            {"scenario", to_json(report.scenario)},
            {"config", config},
            {"rows", rows},
            {"summary", summary}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
    out << "t,node_x,component,value\n";
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        const Mat u = t.nodal(k);
        const std::string time = num(t.times[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const std::string x = num(t.mesh.nodes[static_cast<std::size_t>(i)]);
            for (Eigen::Index c = 0; c < u.cols(); ++c) out << time << ',' << x << ',' << c << ',' << num(u(i, c)) << '\n';
        }
    }
}

void write_spectrum_csv(std::ostream& out, const std::vector<EigenPair>& pairs) {
    out << "index,lambda\n";
    for (std::size_t k = 0; k < pairs.size(); ++k) out << k + 1 << ',' << num(pairs[k].lambda) << '\n';
}

void write_eigenvector_csv(std::ostream& out, const DiscreteForm& form, const std::vector<EigenPair>& pairs) {
    out << "mode,node_x,component,value\n";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Mat u = form.nodal(pairs[k].vector);
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const std::string x = num(form.mesh.nodes[static_cast<std::size_t>(i)]);
            for (Eigen::Index c = 0; c < u.cols(); ++c) out << k + 1 << ',' << x << ',' << c << ',' << num(u(i, c)) << '\n';
        }
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace vdiff::cli
