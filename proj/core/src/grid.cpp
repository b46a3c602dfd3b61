#include "actsim/grid.hpp"

#include <algorithm>
#include <cmath>

#include "actsim/error.hpp"

namespace actsim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TransientKind parse_transient_kind(const std::string& s) {
    if (s == "frequency-step") return TransientKind::FrequencyStep;
    if (s == "phase-step") return TransientKind::PhaseStep;
    throw ConfigError("unknown grid transient kind: \"" + s + "\"");
}

GridModel::GridModel(GridConfig cfg) : cfg_(std::move(cfg)), f_(cfg_.f_nominal), rng_(cfg_.seed) {
    if (cfg_.f_min <= 0 || cfg_.f_max <= cfg_.f_min)
        throw ConfigError("grid: need 0 < f_min < f_max");
    if (cfg_.f_nominal < cfg_.f_min || cfg_.f_nominal > cfg_.f_max)
        throw ConfigError("grid: f_nominal outside [f_min, f_max]");
    if (cfg_.wander_sigma < 0) throw ConfigError("grid: wander_sigma must be >= 0");
    if (cfg_.wander_reversion < 0 || cfg_.wander_reversion > 1)
        throw ConfigError("grid: wander_reversion must be in [0, 1]");
    std::stable_sort(cfg_.transients.begin(), cfg_.transients.end(),
                     [](const GridTransient& a, const GridTransient& b) { return a.at < b.at; });
}

// Box-Muller without caching: two uniforms per sample, deterministic per seed.
double GridModel::gaussian() {
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::int64_t GridModel::spacing_for(double f_hz) {
    return static_cast<std::int64_t>(std::llround(1e12 / f_hz));
}

void GridModel::apply_transient(TransientKind kind, double magnitude) {
    switch (kind) {
        case TransientKind::FrequencyStep:
            f_ = std::clamp(f_ + magnitude, cfg_.f_min, cfg_.f_max);
            break;
        case TransientKind::PhaseStep:
            pending_phase_ps_ += static_cast<std::int64_t>(std::llround(magnitude));
            break;
    }
}

ZeroCrossing GridModel::next_zero_crossing() {
    // Scripted transients fire once simulated grid time has reached them.
    while (next_transient_ < cfg_.transients.size() &&
           !(t_ < cfg_.transients[next_transient_].at)) {
        apply_transient(cfg_.transients[next_transient_].kind,
                        cfg_.transients[next_transient_].magnitude);
        ++next_transient_;
    }

    double step = cfg_.wander_reversion * (cfg_.f_nominal - f_);
    if (cfg_.wander_sigma > 0) step += cfg_.wander_sigma * gaussian();
    f_ = std::clamp(f_ + step, cfg_.f_min, cfg_.f_max);

    t_ += spacing_for(f_) + pending_phase_ps_;
    pending_phase_ps_ = 0;
    return ZeroCrossing{t_, index_++};
}

}  // namespace actsim
