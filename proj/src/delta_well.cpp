#include "declab/delta_well.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace declab {

DeltaWellModel deltawell_model(double g, double hbar) {
    require(g > 0.0 && std::isfinite(g), "deltawell_model: coupling must be positive");
    require(hbar > 0.0 && std::isfinite(hbar), "deltawell_model: hbar must be positive");
    DeltaWellModel m;
    m.g = g;
    m.hbar = hbar;
    m.kappa = g / (hbar * hbar);
    m.omega0 = -0.5 * g * g / (hbar * hbar);
    return m;
}

namespace {

// composite Simpson on a uniform slice [start, start + 2m*h]
double simpson(const std::vector<double>& f, std::size_t start, std::size_t count, double h) {
    double acc = f[start] + f[start + count - 1];
    for (std::size_t i = 1; i + 1 < count; ++i)
        acc += f[start + i] * ((i % 2 == 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// inner product with the kink at q = 0 on a piece boundary
double kink_safe_inner(const std::vector<double>& f, const std::vector<double>& g,
                       std::size_t half, double h) {
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
    return simpson(prod, 0, half + 1, h) + simpson(prod, half, half + 1, h);
}

} // namespace

EigenfunctionReport eigenfunction_check(const DeltaWellModel& model, double length,
                                        int half_points, double probe_omega) {
    require(length > 0.0, "eigenfunction_check: length must be positive");
    require(half_points >= 8 && half_points % 2 == 0,
            "eigenfunction_check: half_points must be even and >= 8");
    require(probe_omega > 0.0, "eigenfunction_check: probe energy must be positive");

    const std::size_t half = static_cast<std::size_t>(half_points);
    const std::size_t n = 2 * half + 1;
    const double h = length / static_cast<double>(half_points);

    std::vector<double> q(n), b(n), ev(n), od(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = -length + static_cast<double>(i) * h;
        b[i] = model.bound(q[i]);
        ev[i] = model.even(probe_omega, q[i]);
        od[i] = model.odd(probe_omega, q[i]);
    }

    EigenfunctionReport rep;

    // finite-difference stationary residual, skipping cells near the kink
    const double hb2 = 0.5 * model.hbar * model.hbar;
    auto residual = [&](const std::vector<double>& psi, double omega) {
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (std::abs(q[i]) < 3.0 * h) continue;
            const double lap = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
            worst = std::max(worst, std::abs(-hb2 * lap - omega * psi[i]));
        }
        return worst;
    };
    rep.bound_residual = residual(b, model.omega0);
    rep.even_residual = residual(ev, probe_omega);
    rep.odd_residual = residual(od, probe_omega);

    rep.bound_norm_defect = std::abs(kink_safe_inner(b, b, half, h) - 1.0);
    rep.parity_cross_overlap = std::abs(kink_safe_inner(ev, od, half, h));
    rep.bound_even_overlap = std::abs(kink_safe_inner(b, ev, half, h));
    return rep;
}

} // namespace declab
