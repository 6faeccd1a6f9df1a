#pragma once

#include "ham/noise_model.hpp"
#include "ham/rng.hpp"

namespace ham {

// Importance sampler for the spectral density phi of a spatial kernel.
// sample() draws xi from a proposal q and returns phi(xi)/q(xi).
class FrequencySampler {
public:
    explicit FrequencySampler(const SpatialKernel& k);

    double sample(PhiloxStream& g, Point& xi) const;
    // Proposal density q(xi).
    double density(const Point& xi) const;
    const SpatialKernel& kernel() const { return k_; }

    // Two-sided one-dimensional proposal for a single axis.
    struct Axis {
        bool gaussian = true;
        double sigma = 1.0;  // proposal N(0, 1/sigma^2) for a gaussian factor
        double beta = 0.5;
        double eps = 0.5;
        double draw(PhiloxStream& g) const;
        double pdf(double x) const;
    };

private:
    SpatialKernel k_;
    Axis ax0_, ax1_;
    double beta_ = 0.5, eps_ = 0.5;
};

}  // namespace ham
