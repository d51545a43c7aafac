#include "mindet/stieltjes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mindet {

namespace {

void validate_spec(const StieltjesFamilySpec& spec) {
    if (!(spec.lambda > 0.0))
        throw Error("StieltjesFamilySpec: lambda must be positive");
    if (std::abs(spec.phi) > std::numbers::pi + 1e-12)
        throw Error("StieltjesFamilySpec: phi must lie in [-pi, pi]");
    if (spec.epsilons.empty())
        throw Error("StieltjesFamilySpec: at least one epsilon required");
    for (double e : spec.epsilons)
        if (!(std::abs(e) <= 1.0))
            throw Error("StieltjesFamilySpec: |epsilon| <= 1 required, got " +
                        std::to_string(e));
    if (spec.n_max < 0 || spec.n_max > 12)
        throw OrderTooHigh("StieltjesFamilySpec: n_max outside [0, 12]");
}

std::vector<double> perturbed(const DensityFunction& P0, double eps,
                              double lambda, double phi) {
    std::vector<double> v(P0.values.size());
    for (size_t j = 0; j < v.size(); ++j) {
        double x = P0.grid.point(static_cast<int>(j));
        v[j] = P0.values[j] * (1.0 + eps * std::cos(lambda * x + phi));
    }
    return v;
}

} // namespace

ExtentConditionReport verify_finite_extent_condition(const CharFn& M0,
                                                     double lambda) {
    ExtentConditionReport rep;
    rep.extent = support_extent(M0, 1e-10);
    rep.margin = lambda - rep.extent;
    rep.pass = rep.margin > 2.0 * M0.grid.dx();
    return rep;
}

std::vector<double> q_derivatives_at_zero(const DensityFunction& P0,
                                          double lambda, double phi,
                                          int n_max) {
    if (n_max < 0 || n_max > 12)
        throw OrderTooHigh("q_derivatives_at_zero: n_max outside [0, 12]");
    const int n = P0.grid.n_points;
    std::vector<double> q(n_max + 1);
    std::vector<double> terms(n);
    std::vector<double> xpow(n, 1.0);
    for (int k = 0; k <= n_max; ++k) {
        for (int j = 0; j < n; ++j) {
            double x = P0.grid.point(j);
            terms[j] = xpow[j] * P0.values[j] * std::cos(lambda * x + phi);
        }
        q[k] = compensated_sum(terms) * P0.grid.dx();
        if (k < n_max)
            for (int j = 0; j < n; ++j) xpow[j] *= P0.grid.point(j);
    }
    return q;
}

StieltjesFamily build_stieltjes_family(const StieltjesFamilySpec& spec,
                                       const Grid& grid) {
    return build_stieltjes_family(spec, grid, StieltjesGrids{});
}

StieltjesFamily build_stieltjes_family(const StieltjesFamilySpec& spec,
                                       const Grid& grid,
                                       const StieltjesGrids& grids) {
    validate_spec(spec);

    StieltjesFamily fam;
    fam.lambda = spec.lambda;
    fam.phi = spec.phi;
    fam.n_max = spec.n_max;
    fam.epsilons = spec.epsilons;
    fam.generator = make_bump(spec.generator, grid);

    Grid theta = grids.have_theta
                     ? grids.theta_grid
                     : Grid::zero_aligned(grid.dx(), grid.n_points);
    fam.charfun = autocorrelation_charfun(fam.generator, theta);

    ExtentConditionReport ext =
        verify_finite_extent_condition(fam.charfun, spec.lambda);
    fam.extent = ext.extent;
    fam.condition_checks.push_back(
        {"finite_extent_margin", ext.pass, ext.margin});
    if (spec.enforce_extent_condition && !ext.pass) {
        std::ostringstream os;
        os << "lambda = " << spec.lambda << " is not above the extent "
           << ext.extent << " by more than 2 dtheta";
        throw LambdaTooSmall(os.str());
    }

    // The sampled generator makes |F|^2 exactly periodic in r with period
    // 2*pi/dx, so alias images sit that far out. Capping the half span at
    // pi/dx keeps them at least a full window away; past the cap their
    // r^n-weighted residue would dominate the high-order moment spreads.
    double r_half = std::min(512.0, std::numbers::pi / grid.dx());
    Grid rg = grids.have_r ? grids.r_grid
                           : Grid::centered(r_half, grid.n_points);

    // base density straight from the construction: P0 = |F|^2, positive by
    // construction and with noise-free tails
    GridFunction F = fourier_transform(fam.generator, rg);
    std::vector<double> p(F.size());
    for (int j = 0; j < F.size(); ++j) p[j] = std::norm(F.values[j]);
    fam.base_density = DensityFunction::checked(rg, std::move(p));

    // the inverse-transform route must give the same density; disagreement
    // means the theta grid truncates M0 or the grids are inconsistent
    DensityFunction inv = density_from_charfun(fam.charfun, rg);
    double inv_err = 0.0;
    for (int j = 0; j < rg.n_points; ++j)
        inv_err = std::max(inv_err,
                           std::abs(inv.values[j] - fam.base_density.values[j]));
    fam.condition_checks.push_back(
        {"inversion_consistency", inv_err <= 1e-8, inv_err});
    if (inv_err > 1e-8) {
        std::ostringstream os;
        os << "inverse-transform density deviates from |F|^2 by " << inv_err;
        throw NotADensity(os.str());
    }

    fam.members.reserve(spec.epsilons.size());
    double worst_norm = 0.0;
    for (double eps : spec.epsilons) {
        std::vector<double> v =
            perturbed(fam.base_density, eps, spec.lambda, spec.phi);
        DensityFunction member =
            spec.enforce_extent_condition
                ? DensityFunction::checked(rg, std::move(v))
                : DensityFunction::measured(rg, std::move(v));
        worst_norm = std::max(worst_norm, member.norm_error);
        fam.members.push_back(std::move(member));
    }
    fam.condition_checks.push_back(
        {"member_normalization", worst_norm <= 1e-8, worst_norm});
    return fam;
}

std::vector<DensityFunction>
stieltjes_members_from_h(const DensityFunction& P0,
                         const std::vector<double>& h,
                         const std::vector<double>& epsilons, int n_max) {
    if (h.size() != P0.values.size())
        throw GridMismatch("stieltjes_members_from_h: h sample count");
    for (double v : h)
        if (!(std::abs(v) <= 1.0 + 1e-12))
            throw Error("stieltjes_members_from_h: |h| <= 1 violated");
    for (double e : epsilons)
        if (!(std::abs(e) <= 1.0))
            throw Error("stieltjes_members_from_h: |epsilon| <= 1 violated");

    // gate: h must annihilate the first n_max moments of P0
    MomentVector ref = moments_from_density(P0, n_max);
    const int n = P0.grid.n_points;
    std::vector<double> terms(n);
    std::vector<double> xpow(n, 1.0);
    for (int k = 0; k <= n_max; ++k) {
        for (int j = 0; j < n; ++j)
            terms[j] = xpow[j] * P0.values[j] * h[j];
        double qk = compensated_sum(terms) * P0.grid.dx();
        if (std::abs(qk) > moment_tolerance(ref, k)) {
            std::ostringstream os;
            os << "h fails the moment-independence gate at order " << k
               << ": |q| = " << std::abs(qk);
            throw Error(os.str());
        }
        if (k < n_max)
            for (int j = 0; j < n; ++j) xpow[j] *= P0.grid.point(j);
    }

    std::vector<DensityFunction> members;
    members.reserve(epsilons.size());
    for (double eps : epsilons) {
        std::vector<double> v(P0.values.size());
        for (size_t j = 0; j < v.size(); ++j)
            v[j] = P0.values[j] * (1.0 + eps * h[j]);
        members.push_back(DensityFunction::checked(P0.grid, std::move(v)));
    }
    return members;
}

} // namespace mindet
