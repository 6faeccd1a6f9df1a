#pragma once

#include <cmath>
#include <numbers>

#include "ham/noise_model.hpp"
#include "ham/quadrature.hpp"

namespace ham {

// Integral over R^d of phi(xi) h(|xi|) for an isotropic kernel (d = 1 or an
// isotropic d = 2 kernel), done radially on [0, cutoff] with panels of the
// given width; the caller adds any tail beyond cutoff.
template <class H>
QuadResult radial_phi_integral(const SpatialKernel& k, H&& h, double width, double cutoff, double tol,
                               long max_evals, double abs_tol = 0.0) {
    if (k.kind == SpatialKernel::Kind::Product)
        throw DomainError("radial spectral integral needs an isotropic kernel");
    const double surf = k.dim == 1 ? 2.0 : 2.0 * std::numbers::pi;
    auto f = [&](double r) {
        const double jac = k.dim == 1 ? 1.0 : r;
        return surf * jac * spectral_density(k, Point{r, 0.0}) * h(r);
    };
    const double alpha = k.kind == SpatialKernel::Kind::Riesz ? 1.0 - k.beta : 0.0;
    return quad::panel_refine(f, 0.0, cutoff, width, tol, max_evals, alpha, 10, abs_tol);
}

}  // namespace ham
