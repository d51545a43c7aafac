#include "mindet/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "mindet/errors.hpp"

namespace mindet {

namespace {

void validate_operator(const OperatorSpec& op) {
    if (op.kind == OperatorKind::gauged_translation) {
        if (!std::isfinite(op.c))
            throw Error("operator: gauge strength c must be finite");
        if (op.power < 1)
            throw Error("operator: gauge exponent must be >= 1");
    }
}

bool has_gauge(const OperatorSpec& op) {
    return op.kind == OperatorKind::gauged_translation && op.c != 0.0;
}

// signed wavenumbers of the trigonometric interpolant, Nyquist zeroed so
// (1/i) d/dx stays exactly anti-Hermitian (same convention as
// spectral_derivative at odd order)
std::vector<double> signed_wavenumbers(const Grid& g) {
    const int n = g.n_points;
    const double dk = 2.0 * std::numbers::pi / (n * g.dx());
    std::vector<double> k(n);
    for (int m = 0; m < n; ++m)
        k[m] = m == n / 2 ? 0.0 : dk * (m < n / 2 ? m : m - n);
    return k;
}

// coefficients of (x+theta)^{p+1} - x^{p+1} as a polynomial in x:
// coef[k] = C(p+1, k) theta^{p+1-k}, k = 0..p
std::vector<double> gauge_phase_coefs(int power, double theta) {
    const int p = power;
    std::vector<double> binom(p + 1);
    binom[0] = 1.0;
    for (int k = 1; k <= p; ++k)
        binom[k] = binom[k - 1] * static_cast<double>(p + 2 - k) / k;
    std::vector<double> coef(p + 1);
    double tpow = theta; // theta^{p+1-k}, built from k = p downward
    for (int k = p; k >= 0; --k) {
        coef[k] = binom[k] * tpow;
        tpow *= theta;
    }
    return coef;
}

// e^{i theta A} restricted to on-grid shifts: zero-filled sample shift by s
// cells, then the gauge phase e^{ic[(x+theta)^{p+1} - x^{p+1}]}. No support
// bookkeeping here; callers decide whether a flow that crosses the grid edge
// is an error (evolve) or meets hard zeros anyway (charfun windows).
GridFunction flow_apply(const OperatorSpec& op, const GridFunction& f,
                        long s) {
    const int n = f.grid.n_points;
    std::vector<cplx> out(n, cplx(0.0));
    for (int j = 0; j < n; ++j) {
        long src = j + s;
        if (src >= 0 && src < n) out[j] = f.values[src];
    }
    if (has_gauge(op) && s != 0) {
        const double theta = s * f.grid.dx();
        const std::vector<double> coef = gauge_phase_coefs(op.power, theta);
        for (int j = 0; j < n; ++j) {
            if (out[j] == cplx(0.0)) continue; // keep hard zeros exact
            const double x = f.grid.point(j);
            double delta = coef[op.power];
            for (int k = op.power - 1; k >= 0; --k) delta = delta * x + coef[k];
            out[j] *= std::polar(1.0, op.c * delta);
        }
    }
    return GridFunction(f.grid, std::move(out));
}

long cells_for(double theta, double dx, const char* who) {
    const double ratio = theta / dx;
    const long s = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(s)) > 1e-9) {
        std::ostringstream os;
        os << who << ": theta = " << theta << " is not a whole number of "
           << "cells (dx = " << dx << ")";
        throw ThetaOffGrid(os.str());
    }
    return s;
}

double peak_modulus(const GridFunction& f) {
    double peak = 0.0;
    for (const cplx& z : f.values) peak = std::max(peak, std::abs(z));
    return peak;
}

void require_theta_spacing(const Grid& theta_grid, const Grid& x_grid,
                           const char* who) {
    if (std::abs(theta_grid.dx() - x_grid.dx()) > 1e-12 * x_grid.dx()) {
        std::ostringstream os;
        os << who << ": theta spacing must equal x spacing";
        throw GridIncompatible(os.str());
    }
}

void require_disjoint(const GridFunction& f1, const GridFunction& f2,
                      const char* who) {
    require_same_grid(f1.grid, f2.grid, who);
    for (int j = 0; j < f1.size(); ++j)
        if (f1.values[j] != cplx(0.0) && f2.values[j] != cplx(0.0)) {
            std::ostringstream os;
            os << who << ": supports share sample " << j << " at x = "
               << f1.grid.point(j);
            throw SupportsOverlap(os.str());
        }
}

} // namespace

GridFunction apply_operator(const OperatorSpec& op, const GridFunction& f) {
    validate_operator(op);
    GridFunction d = spectral_derivative(f, 1);
    const int n = f.grid.n_points;
    const cplx minus_i(0.0, -1.0); // 1/i
    std::vector<cplx> out(n);
    const double scale =
        has_gauge(op) ? op.c * static_cast<double>(op.power + 1) : 0.0;
    for (int j = 0; j < n; ++j) {
        out[j] = minus_i * d.values[j];
        if (scale != 0.0) {
            const double x = f.grid.point(j);
            double xp = 1.0;
            for (int k = 0; k < op.power; ++k) xp *= x;
            out[j] += scale * xp * f.values[j];
        }
    }
    GridFunction result(f.grid, std::move(out));

    // the exact operator preserves support; the trigonometric interpolant
    // leaks only a spectral tail whose share of the output mass must stay
    // negligible
    std::vector<double> leak;
    std::vector<double> total;
    for (int j = 0; j < n; ++j) {
        double a = std::abs(result.values[j]);
        total.push_back(a * a);
        if (f.values[j] == cplx(0.0)) leak.push_back(a * a);
    }
    if (!leak.empty()) {
        const double mass = compensated_sum(leak) * f.grid.dx();
        const double whole = compensated_sum(total) * f.grid.dx();
        if (whole > 0.0 && mass > 1e-10 * whole) {
            std::ostringstream os;
            os << "apply_operator: mass fraction " << mass / whole
               << " leaked outside the input support (bound 1e-10)";
            throw EdgeSupport(os.str());
        }
    }
    return result;
}

GridFunction apply_power(const OperatorSpec& op, const GridFunction& f,
                         int n) {
    if (n < 0 || n > 12) {
        std::ostringstream os;
        os << "apply_power: order " << n << " outside [0, 12]";
        throw OrderTooHigh(os.str());
    }
    validate_operator(op);
    GridFunction out = f;
    for (int k = 0; k < n; ++k) out = apply_operator(op, out);
    return out;
}

GridFunction evolve(const OperatorSpec& op, const GridFunction& f,
                    double theta) {
    validate_operator(op);
    const double dx = f.grid.dx();
    const long s = cells_for(theta, dx, "evolve");
    const int n = f.grid.n_points;

    // samples the shift would push across the grid edge must be (nearly)
    // zero: a flow that moves support off the grid is rejected, not wrapped
    const double peak = peak_modulus(f);
    long lost_lo = 0, lost_hi = 0;
    if (s > 0) {
        lost_lo = 0;
        lost_hi = std::min<long>(s, n);
    } else if (s < 0) {
        lost_lo = std::max<long>(0, n + s);
        lost_hi = n;
    }
    for (long k = lost_lo; k < lost_hi; ++k)
        if (std::abs(f.values[k]) > 1e-12 * peak) {
            std::ostringstream os;
            os << "evolve: theta = " << theta << " carries support at x = "
               << f.grid.point(static_cast<int>(k))
               << " across the grid edge";
            throw EdgeSupport(os.str());
        }

    GridFunction out = flow_apply(op, f, s);
    const double drift = std::abs(norm_l2(out) - norm_l2(f));
    if (drift > 1e-12 * std::max(1.0, norm_l2(f)))
        throw Error("evolve: flow failed to preserve the norm");
    return out;
}

GridFunction evolve_oracle(const OperatorSpec& op, const GridFunction& f,
                           double theta) {
    validate_operator(op);
    const int n = f.grid.n_points;
    if (n > 2048) {
        std::ostringstream os;
        os << "evolve_oracle: " << n
           << " points exceeds the dense-eigendecomposition cap 2048";
        throw GridTooLarge(os.str());
    }
    // spectral differentiation matrix as a circulant: row kernel is the
    // inverse DFT of the signed wavenumbers
    std::vector<double> kt = signed_wavenumbers(f.grid);
    std::vector<cplx> ktc(kt.begin(), kt.end());
    std::vector<cplx> kernel = dft_bins(ktc, +1);
    const double inv_n = 1.0 / n;
    for (cplx& z : kernel) z *= inv_n;

    Eigen::MatrixXcd A(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) A(j, l) = kernel[(j - l + n) % n];
    if (has_gauge(op)) {
        const double scale = op.c * static_cast<double>(op.power + 1);
        for (int j = 0; j < n; ++j) {
            const double x = f.grid.point(j);
            double xp = 1.0;
            for (int k = 0; k < op.power; ++k) xp *= x;
            A(j, j) += scale * xp;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    if (es.info() != Eigen::Success)
        throw Error("evolve_oracle: eigendecomposition failed");

    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = f.values[j];
    Eigen::VectorXcd w = es.eigenvectors().adjoint() * v;
    for (int m = 0; m < n; ++m)
        w(m) *= std::polar(1.0, theta * es.eigenvalues()(m));
    Eigen::VectorXcd u = es.eigenvectors() * w;

    std::vector<cplx> out(n);
    for (int j = 0; j < n; ++j) out[j] = u(j);
    return GridFunction(f.grid, std::move(out));
}

CharFn operator_charfun(const OperatorSpec& op, const GridFunction& f,
                        const Grid& theta_grid) {
    validate_operator(op);
    require_theta_spacing(theta_grid, f.grid, "operator_charfun");
    if (op.kind == OperatorKind::translation || op.c == 0.0)
        // the flow is a pure shift; share the autocorrelation code path so
        // the identity M_A = M_0 is exact
        return autocorrelation_charfun(f, theta_grid);

    const double dx = f.grid.dx();
    std::vector<cplx> M(theta_grid.n_points);
    for (int k = 0; k < theta_grid.n_points; ++k) {
        double ratio = theta_grid.point(k) / dx;
        long s = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(s)) > 1e-9)
            throw GridIncompatible(
                "operator_charfun: theta sample is not a whole number of "
                "cells; use a zero-aligned theta grid");
        M[k] = inner_product(f, flow_apply(op, f, s));
    }
    return CharFn::checked(theta_grid, std::move(M), 1e-8);
}

CrossComponents cross_charfun_components(const OperatorSpec& op,
                                         const GridFunction& f1,
                                         const GridFunction& f2, double beta,
                                         const Grid& theta_grid) {
    validate_operator(op);
    if (!std::isfinite(beta))
        throw Error("cross_charfun_components: beta must be finite");
    require_disjoint(f1, f2, "cross_charfun_components");
    require_theta_spacing(theta_grid, f1.grid, "cross_charfun_components");

    const double dx = f1.grid.dx();
    const int nt = theta_grid.n_points;
    const cplx eib = std::polar(1.0, beta);
    std::vector<cplx> m11(nt), m22(nt), m12(nt), m21(nt), ma(nt);
    for (int k = 0; k < nt; ++k) {
        double ratio = theta_grid.point(k) / dx;
        long s = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(s)) > 1e-9)
            throw GridIncompatible(
                "cross_charfun_components: theta sample is not a whole "
                "number of cells; use a zero-aligned theta grid");
        GridFunction u1 = flow_apply(op, f1, s);
        GridFunction u2 = flow_apply(op, f2, s);
        m11[k] = inner_product(f1, u1);
        m22[k] = inner_product(f2, u2);
        m12[k] = inner_product(f1, u2);
        m21[k] = inner_product(f2, u1);
        ma[k] = m11[k] + m22[k] + eib * m12[k] + std::conj(eib) * m21[k];
    }

    CrossComponents out;
    out.m11 = GridFunction(theta_grid, std::move(m11));
    out.m22 = GridFunction(theta_grid, std::move(m22));
    out.m12 = GridFunction(theta_grid, std::move(m12));
    out.m21 = GridFunction(theta_grid, std::move(m21));
    out.assembled = CharFn::checked(theta_grid, std::move(ma), 1e-8);

    std::vector<cplx> combined(f1.values);
    for (int j = 0; j < f1.size(); ++j) combined[j] += eib * f2.values[j];
    CharFn direct = operator_charfun(
        op, GridFunction(f1.grid, std::move(combined)), theta_grid);
    double err = 0.0;
    for (int k = 0; k < nt; ++k)
        err = std::max(err,
                       std::abs(out.assembled.values[k] - direct.values[k]));
    out.assembly_error = err;
    if (err > 1e-12) {
        std::ostringstream os;
        os << "cross_charfun_components: assembled charfun deviates from the "
           << "direct one by " << err;
        throw Error(os.str());
    }
    return out;
}

CrossTermReport operator_cross_terms(const OperatorSpec& op,
                                     const GridFunction& f1,
                                     const GridFunction& f2, int n_max) {
    if (n_max < 0 || n_max > 12) {
        std::ostringstream os;
        os << "operator_cross_terms: order " << n_max << " outside [0, 12]";
        throw OrderTooHigh(os.str());
    }
    validate_operator(op);
    require_same_grid(f1.grid, f2.grid, "operator_cross_terms");

    // |<f1, A^k f2>| = |d^k/dtheta^k <f1, e^{i theta A} f2>| at theta = 0,
    // estimated from compact stencils on the cross charfun. For hard-zero
    // supports separated by more than the stencil width every sample is an
    // exact zero and so is the difference; any genuine overlap is amplified
    // by dx^{-k} and caught by the caller's threshold.
    const double dx = f1.grid.dx();
    const int reach = n_max / 2 + n_max % 2;
    std::vector<cplx> fwd(2 * reach + 1), bwd(2 * reach + 1);
    for (int j = -reach; j <= reach; ++j) {
        GridFunction u1 = flow_apply(op, f1, j);
        GridFunction u2 = flow_apply(op, f2, j);
        fwd[j + reach] = inner_product(f1, u2);
        bwd[j + reach] = inner_product(f2, u1);
    }

    CrossTermReport report;
    report.forward.resize(n_max + 1);
    report.backward.resize(n_max + 1);
    std::vector<cplx> terms;
    for (int k = 0; k <= n_max; ++k) {
        const int base = k / 2; // offsets i - base, i = 0..k
        double hk = 1.0;
        for (int i = 0; i < k; ++i) hk *= dx;
        for (int dir = 0; dir < 2; ++dir) {
            const std::vector<cplx>& vals = dir == 0 ? fwd : bwd;
            terms.clear();
            double c = 1.0; // C(k, i) with alternating sign folded in
            for (int i = 0; i <= k; ++i) {
                double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
                terms.push_back(sign * c * vals[i - base + reach]);
                c = c * static_cast<double>(k - i) / (i + 1);
            }
            double mag = std::abs(compensated_sum(terms)) / hk;
            (dir == 0 ? report.forward : report.backward)[k] = mag;
            report.worst = std::max(report.worst, mag);
        }
    }
    return report;
}

MomentVector operator_moments(const OperatorSpec& op, const GridFunction& f1,
                              const GridFunction& f2, double beta,
                              int n_max) {
    if (n_max < 0 || n_max > 12) {
        std::ostringstream os;
        os << "operator_moments: order " << n_max << " outside [0, 12]";
        throw OrderTooHigh(os.str());
    }
    validate_operator(op);
    if (!std::isfinite(beta))
        throw Error("operator_moments: beta must be finite");
    require_same_grid(f1.grid, f2.grid, "operator_moments");

    CrossTermReport cross = operator_cross_terms(op, f1, f2, n_max);
    if (cross.worst > 1e-8) {
        std::ostringstream os;
        os << "operator_moments: cross term of magnitude " << cross.worst
           << " — supports leak into each other, the diagonal sum would "
           << "not be beta-independent";
        throw CrossTermLeak(os.str());
    }

    // diagonal bilinears <f_l, A^n f_l> in the operator's own eigenbasis:
    // gauge-conjugate to a translation, whose discrete eigenbasis is the DFT
    const Grid& g = f1.grid;
    const int n = g.n_points;
    const std::vector<double> kt = signed_wavenumbers(g);
    std::vector<double> weights(n, 0.0);
    for (const GridFunction* f : {&f1, &f2}) {
        std::vector<cplx> w(f->values);
        if (has_gauge(op)) {
            for (int j = 0; j < n; ++j) {
                if (w[j] == cplx(0.0)) continue;
                const double x = g.point(j);
                double xp = x; // x^{power+1}
                for (int k = 0; k < op.power; ++k) xp *= x;
                w[j] *= std::polar(1.0, op.c * xp);
            }
        }
        std::vector<cplx> bins = dft_bins(w, -1);
        for (int m = 0; m < n; ++m) weights[m] += std::norm(bins[m]);
    }
    const double scale = g.dx() / n;

    MomentVector mv;
    mv.n_max = n_max;
    mv.values.resize(n_max + 1);
    std::vector<double> kpow(n, 1.0), terms(n);
    for (int order = 0; order <= n_max; ++order) {
        for (int m = 0; m < n; ++m) terms[m] = kpow[m] * weights[m];
        mv.values[order] = compensated_sum(terms) * scale;
        for (int m = 0; m < n; ++m) kpow[m] *= kt[m];
    }
    if (n_max >= 2) {
        const double var =
            mv.values[2] - mv.values[1] * mv.values[1];
        mv.sigma_ref = std::sqrt(std::max(var, 0.0));
    }
    return mv;
}

double check_self_adjoint(const OperatorSpec& op, const GridFunction& f,
                          const GridFunction& g) {
    validate_operator(op);
    require_same_grid(f.grid, g.grid, "check_self_adjoint");
    GridFunction af = apply_operator(op, f);
    GridFunction ag = apply_operator(op, g);
    return std::abs(inner_product(af, g) - inner_product(f, ag));
}

OperatorFamily build_operator_family(const OperatorFamilySpec& spec) {
    validate_operator(spec.op);
    if (spec.betas.empty())
        throw Error("operator family: at least one beta is required");
    for (double b : spec.betas)
        if (!std::isfinite(b))
            throw Error("operator family: beta must be finite");
    if (spec.n_max < 0 || spec.n_max > 12) {
        std::ostringstream os;
        os << "operator family: n_max " << spec.n_max << " outside [0, 12]";
        throw OrderTooHigh(os.str());
    }

    const Grid& xg = spec.x_grid;
    auto [f1, f2] = make_disjoint_pair(spec.pair, xg);
    const Grid theta_grid = spec.have_theta_grid
                                ? spec.theta_grid
                                : Grid::zero_aligned(xg.dx(), xg.n_points);
    // keep the default r window modest: high moments weight the far tail by
    // r^n, and past the density's decay that only amplifies roundoff
    const Grid r_grid =
        spec.have_r_grid ? spec.r_grid : Grid::centered(128.0, xg.n_points);

    // the charfun must be resolvable out to the farthest shift at which the
    // two supports still interact
    const double span = std::abs(spec.pair.right.center -
                                 spec.pair.left.center) +
                        spec.pair.left.half_width +
                        spec.pair.right.half_width;
    const double theta_max =
        std::max(-theta_grid.x_min, theta_grid.x_max);
    if (theta_max < span * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "operator family: theta grid reaches " << theta_max
           << " but the pair interacts out to " << span;
        throw GridIncompatible(os.str());
    }

    OperatorFamily fam;
    fam.op = spec.op;
    fam.n_max = spec.n_max;

    CrossComponents comp = cross_charfun_components(
        spec.op, f1, f2, spec.betas.front(), theta_grid);
    fam.m11 = comp.m11;
    fam.m22 = comp.m22;
    fam.m12 = comp.m12;
    fam.m21 = comp.m21;

    // edge drop: hard-zero supports make |M_A| exactly zero at the theta
    // edge; a hot edge means the theta grid is too short to invert
    const double extent = support_extent(comp.assembled, 1e-10);

    fam.cross_terms = operator_cross_terms(spec.op, f1, f2, spec.n_max);
    fam.operator_route_moments =
        operator_moments(spec.op, f1, f2, spec.betas.front(), spec.n_max);

    double worst_norm_err = 0.0;
    double worst_moment_ratio = 0.0;
    const int nt = theta_grid.n_points;
    for (double beta : spec.betas) {
        const cplx eib = std::polar(1.0, beta);
        std::vector<cplx> ma(nt);
        for (int k = 0; k < nt; ++k)
            ma[k] = comp.m11.values[k] + comp.m22.values[k] +
                    eib * comp.m12.values[k] +
                    std::conj(eib) * comp.m21.values[k];
        OperatorFamilyMember member;
        member.beta = beta;
        member.charfun = CharFn::checked(theta_grid, std::move(ma), 1e-8);
        member.density = density_from_charfun(member.charfun, r_grid);
        worst_norm_err = std::max(worst_norm_err, member.density.norm_error);

        MomentVector dm = moments_from_density(member.density, spec.n_max);
        for (int order = 0; order <= spec.n_max; ++order) {
            double tol = moment_tolerance(fam.operator_route_moments, order);
            double diff = std::abs(dm.values[order] -
                                   fam.operator_route_moments.values[order]);
            if (tol > 0.0)
                worst_moment_ratio = std::max(worst_moment_ratio, diff / tol);
        }
        fam.density_route_moments.push_back(std::move(dm));
        fam.members.push_back(std::move(member));
    }

    fam.f1 = std::move(f1);
    fam.f2 = std::move(f2);
    fam.condition_checks.push_back(
        {"assembly_identity", comp.assembly_error <= 1e-12,
         comp.assembly_error});
    fam.condition_checks.push_back({"charfun_edge_drop", true, extent});
    fam.condition_checks.push_back(
        {"cross_terms", fam.cross_terms.worst <= 1e-10,
         fam.cross_terms.worst});
    fam.condition_checks.push_back(
        {"moment_agreement", worst_moment_ratio <= 1.0, worst_moment_ratio});
    fam.condition_checks.push_back(
        {"member_normalization", worst_norm_err <= 1e-8, worst_norm_err});
    return fam;
}

} // namespace mindet
