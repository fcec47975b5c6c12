#include "herdsim/model_params.hpp"

#include <string>

#include "herdsim/errors.hpp"

namespace herdsim {

namespace {

void require(bool ok, const char* key, const char* constraint) {
    if (!ok) {
        throw ConfigError(std::string("parameter '") + key + "' violates: " + constraint);
    }
}

} // namespace

void ModelParams::validate() const {
    require(eps_cf > 0.0, "eps_cf", "must be > 0");
    require(eps_fc > 0.0, "eps_fc", "must be > 0");
    require(eps_cc > 0.0, "eps_cc", "must be > 0");
    require(freq_ratio >= 1.0, "H", "must be >= 1");
    require(feedback_gain >= 0.0, "a_tau", "must be >= 0");
    require(feedback_exp >= 0.0, "alpha", "must be >= 0");
    require(herd_rate > 0.0, "h", "must be > 0");
    require(tick_days > 0.0, "delta", "must be > 0");
    require(return_gain >= 0.0, "a0", "must be >= 0");
    require(vol_scale > 0.0, "b0", "must be > 0");
    require(season_width > 0.0, "w", "must be > 0");
}

} // namespace herdsim
