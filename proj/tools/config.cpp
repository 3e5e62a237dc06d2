#include "config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace vdiff::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void allow_only(const json& node, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = node.begin(); it != node.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(join(path, it.key()), "unknown field");
    }
}

const json& object(const json& node, const std::string& path) {
    if (!node.is_object()) throw ConfigError(path, "expected an object");
    return node;
}

double number(const json& node, const std::string& path) {
    if (!node.is_number()) throw ConfigError(path, "expected a number");
    return node.get<double>();
}

double positive(const json& node, const std::string& path) {
    const double v = number(node, path);
    if (!(v > 0)) throw ConfigError(path, "must be positive");
    return v;
}

long long integer(const json& node, const std::string& path, long long min) {
    if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
    const long long v = node.get<long long>();
    if (v < min) throw ConfigError(path, "must be >= " + std::to_string(min));
    return v;
}

std::string text(const json& node, const std::string& path) {
    if (!node.is_string()) throw ConfigError(path, "expected a string");
    return node.get<std::string>();
}

Vec vector(const json& node, const std::string& path, Eigen::Index m) {
    if (!node.is_array()) throw ConfigError(path, "expected an array of numbers");
    if (static_cast<Eigen::Index>(node.size()) != m) {
        throw ConfigError(path, "expected " + std::to_string(m) + " entries, got " + std::to_string(node.size()));
    }
    Vec v(m);
    for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(node[i], index(path, i));
    return v;
}

/// Bound vector where null stands for an infinite bound of the given sign.
Vec bound(const json& node, const std::string& path, Eigen::Index m, double infinite) {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != m) {
        throw ConfigError(path, "expected an array of " + std::to_string(m) + " numbers or nulls");
    }
    Vec v(m);
    for (std::size_t i = 0; i < node.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = node[i].is_null() ? infinite : number(node[i], index(path, i));
    }
    return v;
}

Mat matrix(const json& node, const std::string& path, Eigen::Index m) {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != m) {
        throw ConfigError(path, "expected a " + std::to_string(m) + "x" + std::to_string(m) + " matrix (array of rows)");
    }
    Mat a(m, m);
    for (std::size_t i = 0; i < node.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = vector(node[i], index(path, i), m);
    return a;
}

PiecewiseMatrix piecewise(const json& node, const std::string& path, Eigen::Index m) {
    if (node.is_array()) return PiecewiseMatrix(matrix(node, path, m));
    object(node, path);
    allow_only(node, path, {"breakpoints", "values"});
    if (!node.contains("breakpoints") || !node.contains("values")) {
        throw ConfigError(path, "piecewise coefficient needs 'breakpoints' and 'values'");
    }
    const json& bp = node["breakpoints"];
    const json& vals = node["values"];
    if (!bp.is_array()) throw ConfigError(join(path, "breakpoints"), "expected an array of numbers");
    if (!vals.is_array()) throw ConfigError(join(path, "values"), "expected an array of matrices");
    std::vector<double> cuts;
    for (std::size_t i = 0; i < bp.size(); ++i) cuts.push_back(number(bp[i], index(join(path, "breakpoints"), i)));
    std::vector<Mat> values;
    for (std::size_t i = 0; i < vals.size(); ++i) values.push_back(matrix(vals[i], index(join(path, "values"), i), m));
    try {
        return PiecewiseMatrix(std::move(cuts), std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

Subspace subspace(const json& node, const std::string& path, Eigen::Index m) {
    if (node.is_string()) {
        const std::string s = node.get<std::string>();
        if (s == "zero") return Subspace::zero(m);
        if (s == "whole") return Subspace::whole(m);
        if (s == "ones") return Subspace::span({Vec::Ones(m)}, m);
        if (s == "ones_perp") return Subspace::span({Vec::Ones(m)}, m).orthogonal_complement();
        throw ConfigError(path, "expected one of zero, whole, ones, ones_perp or {\"span\": [...]}");
    }
    object(node, path);
    allow_only(node, path, {"span"});
    if (!node.contains("span") || !node["span"].is_array()) throw ConfigError(join(path, "span"), "expected an array of vectors");
    std::vector<Vec> gens;
    for (std::size_t i = 0; i < node["span"].size(); ++i) gens.push_back(vector(node["span"][i], index(join(path, "span"), i), m));
    return Subspace::span(gens, m);
}

}  // namespace

std::string to_string(Scheme scheme) {
    return scheme == Scheme::implicit_euler ? "implicit_euler" : "crank_nicolson";
}

std::string to_string(MassKind mass) { return mass == MassKind::lumped ? "lumped" : "consistent"; }

Scheme scheme_from_string(const std::string& s, const std::string& path) {
    if (s == "implicit_euler") return Scheme::implicit_euler;
    if (s == "crank_nicolson") return Scheme::crank_nicolson;
    throw ConfigError(path, "expected implicit_euler or crank_nicolson, got '" + s + "'");
}

MassKind mass_from_string(const std::string& s, const std::string& path) {
    if (s == "lumped") return MassKind::lumped;
    if (s == "consistent") return MassKind::consistent;
    throw ConfigError(path, "expected lumped or consistent, got '" + s + "'");
}

json parse_json_text(const std::string& content) {
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, content.size());
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (content[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string msg = e.what();
        if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column), msg);
    }
}

Scenario parse_scenario(const json& node, const std::string& path) {
    object(node, path);
    allow_only(node, path,
               {"preset", "name", "m", "rho", "diffusion", "s_left", "s_right", "y_left", "y_right", "potential", "gamma"});
    const Eigen::Index m = node.contains("m") ? integer(node["m"], join(path, "m"), 1) : 1;
    const double rho = node.contains("rho") ? number(node["rho"], join(path, "rho")) : 1.0;
    const std::string base = node.contains("preset") ? text(node["preset"], join(path, "preset")) : "custom";
    if (!preset_from_string(base)) throw ConfigError(join(path, "preset"), "unknown preset '" + base + "'");
    Scenario s = preset(base, m, rho);

    if (node.contains("name")) s.name = text(node["name"], join(path, "name"));
    if (node.contains("diffusion")) s.diffusion = piecewise(node["diffusion"], join(path, "diffusion"), m);
    if (node.contains("s_left")) s.s_left = matrix(node["s_left"], join(path, "s_left"), m);
    if (node.contains("s_right")) s.s_right = matrix(node["s_right"], join(path, "s_right"), m);
    if (node.contains("y_left")) s.y_left = subspace(node["y_left"], join(path, "y_left"), m);
    if (node.contains("y_right")) s.y_right = subspace(node["y_right"], join(path, "y_right"), m);
    if (node.contains("potential")) s.potential = piecewise(node["potential"], join(path, "potential"), m);
    if (node.contains("gamma")) s.gamma = positive(node["gamma"], join(path, "gamma"));
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

Target parse_target(const json& node, const std::string& path, Eigen::Index m) {
    const auto simple = [&](const std::string& name) -> std::optional<Target> {
        if (name == "positivity") return Target::positivity();
        if (name == "linf_contraction") return Target::linf_contraction();
        if (name == "scalar_domination") return Target::scalar_domination();
        if (name == "decay") return Target::decay();
        if (name == "irreducibility") return Target::irreducibility();
        if (name == "symmetry") return Target::symmetry();
        return std::nullopt;
    };
    if (node.is_string()) {
        if (auto t = simple(node.get<std::string>())) return *t;
        throw ConfigError(path, "unknown or incomplete target '" + node.get<std::string>() + "'");
    }
    object(node, path);
    if (!node.contains("property")) throw ConfigError(join(path, "property"), "missing");
    const std::string kind = text(node["property"], join(path, "property"));
    if (kind == "interval_invariance") {
        allow_only(node, path, {"property", "lower", "upper"});
        if (!node.contains("lower") || !node.contains("upper")) throw ConfigError(path, "needs 'lower' and 'upper'");
        const double inf = std::numeric_limits<double>::infinity();
        try {
            return Target::interval_invariance(OrderInterval(bound(node["lower"], join(path, "lower"), m, -inf),
                                                             bound(node["upper"], join(path, "upper"), m, inf)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path, e.what());
        }
    }
    if (kind == "subspace_invariance") {
        allow_only(node, path, {"property", "subspace"});
        if (!node.contains("subspace")) throw ConfigError(join(path, "subspace"), "missing");
        return Target::subspace_invariance(subspace(node["subspace"], join(path, "subspace"), m));
    }
    if (kind == "domination") {
        allow_only(node, path, {"property", "dominating"});
        if (!node.contains("dominating")) throw ConfigError(join(path, "dominating"), "missing");
        return Target::dominated_by(parse_scenario(node["dominating"], join(path, "dominating")));
    }
    allow_only(node, path, {"property"});
    if (auto t = simple(kind)) return *t;
    throw ConfigError(join(path, "property"), "unknown property '" + kind + "'");
}

RunConfig parse_config(const json& doc) {
    object(doc, "(root)");
    allow_only(doc, "", {"scenario", "mesh", "time", "search", "predict", "targets", "seed", "spectrum", "output"});
    if (!doc.contains("scenario")) throw ConfigError("scenario", "missing");

    RunConfig rc;
    rc.scenario = parse_scenario(doc["scenario"], "scenario");
    const Eigen::Index m = rc.scenario.m;

    if (doc.contains("seed")) {
        rc.sim.seed = static_cast<std::uint64_t>(integer(doc["seed"], "seed", 0));
        rc.predict.seed = rc.sim.seed;
    }
    if (doc.contains("mesh")) {
        const json& n = object(doc["mesh"], "mesh");
        allow_only(n, "mesh", {"n_elements"});
        if (n.contains("n_elements")) rc.sim.n_elements = static_cast<int>(integer(n["n_elements"], "mesh.n_elements", 2));
    }
    if (doc.contains("time")) {
        const json& t = object(doc["time"], "time");
        allow_only(t, "time", {"dt", "t_end", "scheme", "mass"});
        if (t.contains("dt")) rc.sim.dt = positive(t["dt"], "time.dt");
        if (t.contains("t_end")) rc.sim.t_end = positive(t["t_end"], "time.t_end");
        if (t.contains("scheme")) rc.sim.scheme = scheme_from_string(text(t["scheme"], "time.scheme"), "time.scheme");
        if (t.contains("mass")) rc.sim.mass = mass_from_string(text(t["mass"], "time.mass"), "time.mass");
    }
    if (doc.contains("search")) {
        const json& s = object(doc["search"], "search");
        allow_only(s, "search", {"random_trials", "witness_trials", "tol", "decay_threshold", "max_snapshots", "parallel"});
        if (s.contains("random_trials")) rc.sim.random_trials = static_cast<int>(integer(s["random_trials"], "search.random_trials", 0));
        if (s.contains("witness_trials")) rc.sim.witness_trials = static_cast<int>(integer(s["witness_trials"], "search.witness_trials", 0));
        if (s.contains("tol")) rc.sim.tol = positive(s["tol"], "search.tol");
        if (s.contains("decay_threshold")) rc.sim.decay_threshold = positive(s["decay_threshold"], "search.decay_threshold");
        if (s.contains("max_snapshots")) rc.sim.max_snapshots = static_cast<int>(integer(s["max_snapshots"], "search.max_snapshots", 2));
        if (s.contains("parallel")) {
            if (!s["parallel"].is_boolean()) throw ConfigError("search.parallel", "expected a boolean");
            rc.sim.parallel = s["parallel"].get<bool>();
        }
    }
    if (doc.contains("predict")) {
        const json& p = object(doc["predict"], "predict");
        allow_only(p, "predict", {"n_elements", "samples"});
        if (p.contains("n_elements")) rc.predict.n_elements = static_cast<int>(integer(p["n_elements"], "predict.n_elements", 2));
        if (p.contains("samples")) rc.predict.samples = static_cast<int>(integer(p["samples"], "predict.samples", 1));
    }
    if (doc.contains("targets")) {
        const json& t = doc["targets"];
        if (!t.is_array()) throw ConfigError("targets", "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) rc.targets.push_back(parse_target(t[i], index("targets", i), m));
    } else {
        rc.targets = default_targets(rc.scenario);
    }
    if (doc.contains("spectrum")) {
        const json& s = object(doc["spectrum"], "spectrum");
        allow_only(s, "spectrum", {"k", "mass"});
        if (s.contains("k")) rc.spectrum_k = static_cast<int>(integer(s["k"], "spectrum.k", 1));
        if (s.contains("mass")) rc.spectrum_mass = mass_from_string(text(s["mass"], "spectrum.mass"), "spectrum.mass");
    }
    if (doc.contains("output")) {
        const json& o = object(doc["output"], "output");
        allow_only(o, "output", {"dir"});
        if (o.contains("dir")) rc.out_dir = text(o["dir"], "output.dir");
    }
    return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(parse_json_text(ss.str()));
}

}  // namespace vdiff::cli
