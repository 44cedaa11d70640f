#pragma once

#include <vector>

namespace esac {

// Huber distance with unit transition point.
double smooth_l1(double x, double y);

struct AmtRecord {
    double r_max = 0.0;
    double r_avg = 0.0;
    double sigma = 0.0;  // mutation rate in force when the update fired
};

// Automatic mutation tuning state. sigma only ever grows: each update adds
// clip((alpha_es / (n * sigma)) * smooth_l1(R_max, R_avg), 0, zeta).
struct MutationState {
    double sigma_current;
    double sigma_initial;
    double zeta;
    double alpha_es;
    int n;
    std::vector<AmtRecord> history;

    MutationState(double sigma0, double zeta_, double alpha_es_, int n_)
        : sigma_current(sigma0), sigma_initial(sigma0), zeta(zeta_),
          alpha_es(alpha_es_), n(n_) {}
};

// Applies one clipped update and appends to the history. R_max is the best
// raw fitness of the generation, R_avg the population mean.
void amt_update(MutationState& state, double r_max, double r_avg);

// Closed-form product expressing the UNCLIPPED recurrence: replaying history's
// (R_max, R_avg) pairs, sigma_t = sigma_1 * prod(1 + alpha_es/(n*s^2) * L)
// where s runs over the unclipped iterates themselves.
double tuning_multiplier(const std::vector<AmtRecord>& history, double sigma_initial,
                         double alpha_es, int n);

}  // namespace esac
