#include "deformsim/engine.hpp"

namespace deformsim {

void EngineConfig::validate() const {
    if (par_ic < 1 || par_oc < 1 || par_taps < 1) {
        throw ConfigError("engine parallel factors must be >= 1");
    }
    if (clock_mhz <= 0.0) {
        throw ConfigError("engine clock must be positive");
    }
    if (elem_bytes < 1) {
        throw ConfigError("engine element width must be >= 1 byte");
    }
}

std::uint64_t compute_cycles(const ConvSpec& spec, const EngineConfig& engine) {
    spec.validate();
    engine.validate();
    if (std::uint64_t(spec.k) * spec.k > engine.par_taps) {
        throw ConfigError("engine supports " + std::to_string(engine.par_taps) +
                          " parallel taps, kernel needs " + std::to_string(spec.k * spec.k));
    }
    const std::uint64_t oh = spec.out_h();
    const std::uint64_t ow = spec.out_w();
    const std::uint64_t ic_groups = (spec.in_shape.c + engine.par_ic - 1) / engine.par_ic;
    std::uint64_t per_item = oh * ow * ic_groups;
    if (!spec.depthwise) {
        per_item *= (spec.oc + engine.par_oc - 1) / engine.par_oc;
    }
    return per_item * spec.in_shape.n;
}

} // namespace deformsim
