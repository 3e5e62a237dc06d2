#include "vdiff/analyzer.hpp"

#include <stdexcept>

namespace vdiff {

namespace {

constexpr Preset kAll[] = {Preset::dirichlet, Preset::neumann,  Preset::robin,  Preset::kirchhoff,
                           Preset::anti_kirchhoff, Preset::mixed_dn, Preset::custom};

}  // namespace

std::string to_string(Preset preset) {
    switch (preset) {
        case Preset::dirichlet: return "dirichlet";
        case Preset::neumann: return "neumann";
        case Preset::robin: return "robin";
        case Preset::kirchhoff: return "kirchhoff";
        case Preset::anti_kirchhoff: return "anti_kirchhoff";
        case Preset::mixed_dn: return "mixed_dn";
        case Preset::custom: return "custom";
    }
    return "?";
}

std::optional<Preset> preset_from_string(const std::string& name) {
    for (const Preset p : kAll) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

std::vector<Preset> all_presets() { return {std::begin(kAll), std::end(kAll)}; }

Scenario preset(Preset name, Eigen::Index m, double rho) {
    if (m < 1) throw std::invalid_argument("preset: m must be >= 1");
    Scenario s;
    s.name = to_string(name);
    s.m = m;
    s.diffusion = PiecewiseMatrix(Mat::Identity(m, m));
    s.s_left = Mat::Zero(m, m);
    s.s_right = Mat::Zero(m, m);
    s.y_left = Subspace::whole(m);
    s.y_right = Subspace::whole(m);
    s.gamma = 1.0;
    const Subspace ones = Subspace::span({Vec::Ones(m)}, m);
    switch (name) {
        case Preset::dirichlet:
            s.y_left = s.y_right = Subspace::zero(m);
            break;
        case Preset::robin:
            s.s_left = s.s_right = rho * Mat::Identity(m, m);
            break;
        case Preset::kirchhoff:
            s.y_left = s.y_right = ones;
            break;
        case Preset::anti_kirchhoff:
            s.y_left = s.y_right = ones.orthogonal_complement();
            break;
        case Preset::mixed_dn:
            s.y_left = Subspace::zero(m);
            break;
        case Preset::neumann:
        case Preset::custom:
            break;
    }
    return s;
}

Scenario preset(const std::string& name, Eigen::Index m, double rho) {
    const auto p = preset_from_string(name);
    if (!p) throw std::invalid_argument("unknown preset '" + name + "'");
    return preset(*p, m, rho);
}

}  // namespace vdiff
