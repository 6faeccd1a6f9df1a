#include "ham/frequency_sampler.hpp"

#include <cmath>
#include <numbers>

namespace ham {

namespace {
constexpr double kPi = std::numbers::pi;

// Radius with density proportional to r^(a-1) on (0,1] and r^(-1-eps) beyond.
double draw_radius(PhiloxStream& g, double a, double eps) {
    const double z0 = 1.0 / a, z1 = 1.0 / eps;
    const double u = g.uniform(), v = g.uniform();
    if (u * (z0 + z1) < z0) return std::pow(v, 1.0 / a);
    return std::pow(v, -1.0 / eps);
}

double radius_pdf(double r, double a, double eps) {
    const double z = 1.0 / a + 1.0 / eps;
    return (r <= 1.0 ? std::pow(r, a - 1.0) : std::pow(r, -1.0 - eps)) / z;
}

FrequencySampler::Axis make_axis(const Kernel1D& f) {
    FrequencySampler::Axis a;
    a.gaussian = f.kind == Kernel1D::Kind::Gaussian;
    a.sigma = f.sigma;
    a.beta = f.beta;
    return a;
}

}  // namespace

double FrequencySampler::Axis::draw(PhiloxStream& g) const {
    if (gaussian) return g.normal() / sigma;
    const double r = draw_radius(g, beta, eps);
    return g.uniform() < 0.5 ? -r : r;
}

double FrequencySampler::Axis::pdf(double x) const {
    if (gaussian) return sigma * std::exp(-0.5 * sigma * sigma * x * x) / std::sqrt(2.0 * kPi);
    return 0.5 * radius_pdf(std::fabs(x), beta, eps);
}

FrequencySampler::FrequencySampler(const SpatialKernel& k) : k_(k) {
    k_.validate();
    if (k.kind == SpatialKernel::Kind::Product) {
        ax0_ = make_axis(k.f1);
        ax1_ = make_axis(k.f2);
    } else if (k.dim == 1) {
        ax0_ = make_axis(k.factor(0));
    } else if (k.kind == SpatialKernel::Kind::Riesz) {
        beta_ = k.beta;
        eps_ = std::min(0.5, 0.5 * (2.0 - k.beta));
    } else {
        ax0_.gaussian = ax1_.gaussian = true;
        ax0_.sigma = ax1_.sigma = k.sigma;
    }
}

double FrequencySampler::density(const Point& xi) const {
    if (k_.dim == 1) return ax0_.pdf(xi[0]);
    if (k_.kind == SpatialKernel::Kind::Riesz) {
        const double r = std::hypot(xi[0], xi[1]);
        return radius_pdf(r, beta_, eps_) / (2.0 * kPi * r);
    }
    return ax0_.pdf(xi[0]) * ax1_.pdf(xi[1]);
}

double FrequencySampler::sample(PhiloxStream& g, Point& xi) const {
    if (k_.dim == 1) {
        xi = {ax0_.draw(g), 0.0};
    } else if (k_.kind == SpatialKernel::Kind::Riesz) {
        const double r = draw_radius(g, beta_, eps_);
        const double th = 2.0 * kPi * g.uniform();
        xi = {r * std::cos(th), r * std::sin(th)};
    } else {
        xi = {ax0_.draw(g), ax1_.draw(g)};
    }
    return spectral_density(k_, xi) / density(xi);
}

}  // namespace ham
