#include "esac/amt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esac {

double smooth_l1(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("smooth_l1: non-finite input");
    double d = std::abs(x - y);
    return d < 1.0 ? 0.5 * d * d : d - 0.5;
}

void amt_update(MutationState& state, double r_max, double r_avg) {
    double raw = state.alpha_es / (state.n * state.sigma_current) * smooth_l1(r_max, r_avg);
    double inc = std::clamp(raw, 0.0, state.zeta);
    state.history.push_back({r_max, r_avg, state.sigma_current});
    state.sigma_current += inc;
}

double tuning_multiplier(const std::vector<AmtRecord>& history, double sigma_initial,
                         double alpha_es, int n) {
    double lambda_hat = 1.0;
    double sigma = sigma_initial;  // unclipped iterate
    for (const AmtRecord& rec : history) {
        double factor = 1.0 + alpha_es / (n * sigma * sigma) * smooth_l1(rec.r_max, rec.r_avg);
        lambda_hat *= factor;
        sigma *= factor;
    }
    return lambda_hat;
}

}  // namespace esac
