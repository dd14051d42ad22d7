#include "nsc/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "nsc/errors.hpp"

namespace nsc::linear {

namespace {

using lcplx = std::complex<long double>;

lcplx horner(const std::vector<long double>& c, lcplx z) {
    lcplx acc = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::vector<long double> derivative(const std::vector<long double>& c) {
    std::vector<long double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<long double>(k) * c[k]);
    return d;
}

// Newton on p, keeping an iterate only while it reduces |p|.
lcplx polish(const std::vector<long double>& c, const std::vector<long double>& dc, lcplx z) {
    long double best = std::abs(horner(c, z));
    for (int it = 0; it < 20 && best > 0.0L; ++it) {
        const lcplx d = horner(dc, z);
        if (d == lcplx(0.0L)) break;
        const lcplx next = z - horner(c, z) / d;
        const long double val = std::abs(horner(c, next));
        if (!(val < best)) break;
        z = next;
        best = val;
    }
    return z;
}

double rel_gap(cplx a, cplx b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace

ModeSymbol symbol_matrix(const Vec3& xi, const FluidParams& params) {
    const double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const cplx ie(0.0, 1.0 / params.eps);
    Mat4 A = Mat4::Zero();
    for (int j = 0; j < 3; ++j) {
        A(0, 1 + j) = ie * xi[j];
        A(1 + j, 0) = ie * xi[j];
        for (int k = 0; k < 3; ++k) A(1 + j, 1 + k) = (params.mu + params.mu_prime) * xi[j] * xi[k];
        A(1 + j, 1 + j) += params.mu * xi2;
    }
    // Omega e3 x u = Omega (-u2, u1, 0)
    A(1, 2) += -params.Omega;
    A(2, 1) += params.Omega;
    return {xi, A};
}

std::array<double, 5> characteristic_quartic(const Vec3& xi, const FluidParams& params) {
    const double mu = params.mu, mp = params.mu_prime, W2 = params.Omega * params.Omega;
    const double e2 = params.eps * params.eps;
    const double x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const double x4 = x2 * x2, x6 = x4 * x2, x3sq = xi[2] * xi[2];
    return {
        mu * mu * x6 / e2 + W2 * x3sq / e2,
        -(2.0 * mu * x4 / e2 + mu * mu * x6 + W2 * mu * x2 + W2 * (mu + mp) * x3sq),
        x2 / e2 + mu * (5.0 * mu + 2.0 * mp) * x4 + W2,
        -(4.0 * mu + mp) * x2,
        1.0,
    };
}

std::vector<cplx> polynomial_roots(const std::vector<double>& coeffs) {
    require(coeffs.size() >= 2 && coeffs.back() != 0.0, "roots: leading coefficient must be nonzero");
    const int deg = static_cast<int>(coeffs.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<lcplx> roots;
    for (int i = 0; i < deg; ++i) roots.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());

    std::vector<long double> c(coeffs.begin(), coeffs.end());
    const auto dc = derivative(c);
    const auto ddc = derivative(dc);
    for (auto& z : roots) z = polish(c, dc, z);

    // A double root is a simple root of p'; re-solve clusters there.
    long double scale = 0.0L;
    for (const auto& z : roots) scale = std::max(scale, std::abs(z));
    scale = std::max(scale, 1e-300L);
    for (int i = 0; i < deg; ++i) {
        for (int k = i + 1; k < deg; ++k) {
            if (std::abs(roots[i] - roots[k]) > 1e-6L * scale) continue;
            const lcplx mid = 0.5L * (roots[i] + roots[k]);
            const lcplx z = polish(dc, ddc, mid);
            if (std::abs(horner(c, z)) <= std::abs(horner(c, roots[i])) + std::abs(horner(c, roots[k]))) {
                roots[i] = z;
                roots[k] = z;
            }
        }
    }
    std::vector<cplx> out;
    for (const auto& z : roots) out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    return out;
}

void sort_spectrum(std::array<cplx, 4>& values) {
    std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

double spectrum_distance(const std::array<cplx, 4>& x, const std::array<cplx, 4>& y, bool relative) {
    std::array<int, 4> perm = {0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double d = relative ? rel_gap(x[i], y[perm[i]]) : std::abs(x[i] - y[perm[i]]);
            worst = std::max(worst, d);
        }
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

EigenReport eigen_report(const Vec3& xi, const FluidParams& params) {
    EigenReport rep;
    const auto sym = symbol_matrix(xi, params);
    Eigen::ComplexEigenSolver<Mat4> es(sym.matrix, false);
    for (int i = 0; i < 4; ++i) rep.values[i] = es.eigenvalues()[i];
    const auto q = characteristic_quartic(xi, params);
    const auto roots = polynomial_roots({q.begin(), q.end()});
    std::copy(roots.begin(), roots.end(), rep.quartic_roots.begin());
    sort_spectrum(rep.values);
    sort_spectrum(rep.quartic_roots);
    rep.mismatch = spectrum_distance(rep.values, rep.quartic_roots, false);
    rep.agree = rep.mismatch <= 1e-8 || spectrum_distance(rep.values, rep.quartic_roots, true) <= 1e-6;
    return rep;
}

std::array<cplx, 4> eigenvalues(const Vec3& xi, const FluidParams& params) {
    const auto rep = eigen_report(xi, params);
    if (!rep.agree) {
        throw NumericalError("eigenvalues: quartic roots and matrix eigenvalues differ by " +
                             std::to_string(rep.mismatch) + " (ill-conditioned or defective point)");
    }
    return rep.values;
}

ModePropagator::ModePropagator(const Vec3& xi, const FluidParams& params)
    : a_(symbol_matrix(xi, params).matrix), omega_(params.Omega) {
    if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) {
        zero_mode_ = true;
        lambda_ << 0.0, 0.0, cplx(0.0, params.Omega), cplx(0.0, -params.Omega);
        return;
    }
    Eigen::ComplexEigenSolver<Mat4> es(a_);
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
    Eigen::JacobiSVD<Mat4> svd(v_);
    const auto& sv = svd.singularValues();
    condition_ = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
    fallback_ = !(condition_ <= kConditionLimit);
    if (!fallback_) v_inv_ = v_.partialPivLu().inverse();
}

double ModePropagator::min_real_part() const {
    double s = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) s = std::min(s, lambda_(i).real());
    return s;
}

Mat4 ModePropagator::shifted(double t, double shift) const {
    require(t >= 0.0, "propagator: t >= 0 required");
    if (zero_mode_) {
        Mat4 R = Mat4::Identity();
        const double c = std::cos(omega_ * t), s = std::sin(omega_ * t);
        R(1, 1) = c;
        R(1, 2) = s;
        R(2, 1) = -s;
        R(2, 2) = c;
        return R * std::exp(t * shift);
    }
    if (fallback_) {
        Mat4 M = -t * (a_ - shift * Mat4::Identity());
        return M.exp();
    }
    Eigen::Matrix<cplx, 4, 1> e;
    for (int i = 0; i < 4; ++i) e(i) = std::exp(-t * (lambda_(i) - shift));
    return v_ * e.asDiagonal() * v_inv_;
}

Mat4 ModePropagator::operator()(double t) const { return shifted(t, 0.0); }

Vec4 ModePropagator::apply(double t, const Vec4& U) const {
    if (zero_mode_ || fallback_) return shifted(t, 0.0) * U;
    require(t >= 0.0, "propagator: t >= 0 required");
    Vec4 c = v_inv_ * U;
    for (int i = 0; i < 4; ++i) c(i) *= std::exp(-t * lambda_(i));
    return v_ * c;
}

Mat4 ModePropagator::slow_projector(int count) const {
    require(count >= 0 && count <= 4, "slow_projector: count must lie in [0, 4]");
    require(!zero_mode_ && !fallback_, "slow_projector: needs a diagonalizable nonzero mode");
    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return std::abs(lambda_(x).imag()) < std::abs(lambda_(y).imag()); });
    Eigen::Matrix<cplx, 4, 1> keep = Eigen::Matrix<cplx, 4, 1>::Zero();
    for (int i = 0; i < count; ++i) keep(order[i]) = 1.0;
    return v_ * keep.asDiagonal() * v_inv_;
}

double ModePropagator::log_norm(double t) const {
    const double s = zero_mode_ ? 0.0 : min_real_part();
    Eigen::JacobiSVD<Mat4> svd(shifted(t, s));
    return -t * s + std::log(svd.singularValues()(0));
}

Mat4 propagator(double t, const Vec3& xi, const FluidParams& params) { return ModePropagator(xi, params)(t); }

double decay_rate_kappa(double xi_norm, double omega_eps) {
    require(xi_norm != 0.0 || omega_eps != 0.0, "kappa: |xi| and Omega eps cannot both vanish");
    const double x2 = xi_norm * xi_norm;
    return x2 * x2 / (omega_eps * omega_eps + x2);
}

double energy_V_squared(const Vec4& U, const Vec3& xi, const FluidParams& params, double beta) {
    require(beta >= 1.0, "energy_V: beta >= 1 required");
    const double xn = norm(xi);
    require(xn <= 2.0 * beta / params.eps * (1.0 + 1e-14), "energy_V: |xi| > 2 beta / eps");
    const double delta = params.mu_lower() / (16.0 * beta * beta);
    const double we = params.Omega * params.eps;
    double cross = 0.0;  // Re <i eps xi a, u>
    for (int k = 0; k < 3; ++k) cross += (cplx(0.0, params.eps * xi[k]) * U(0) * std::conj(U(1 + k))).real();
    return (we * we + xn * xn) * U.squaredNorm() + 2.0 * delta * xn * xn * cross;
}

double energy_V(const Vec4& U, const Vec3& xi, const FluidParams& params, double beta) {
    return std::sqrt(std::max(0.0, energy_V_squared(U, xi, params, beta)));
}

DecayReport decay_report(const FluidParams& params, double beta, const Vec3& xi, double horizon) {
    params.validate();
    require(beta >= 1.0, "decay: beta >= 1 required");
    const double xn = norm(xi);
    require(xn > 0.0, "decay: xi = 0 does not decay");
    require(xn <= 2.0 * beta / params.eps * (1.0 + 1e-14), "decay: |xi| > 2 beta / eps");
    require(std::abs(params.Omega) * params.eps <= beta / params.eps, "decay: |Omega| eps > beta / eps");

    DecayReport rep;
    rep.xi = xi;
    rep.kappa = decay_rate_kappa(xn, params.Omega * params.eps);
    rep.bound = rep.kappa / (48.0 * beta * beta);
    rep.weighted_bound = params.mu_lower() * rep.bound;

    const ModePropagator prop(xi, params);
    const auto spec = eigenvalues(xi, params);
    double s = std::numeric_limits<double>::infinity();
    for (const auto& l : spec) s = std::min(s, l.real());
    rep.abscissa = -s;
    if (!(rep.abscissa < 0.0)) {
        throw LemmaViolation("decay: mode does not decay (abscissa " + std::to_string(rep.abscissa) + ")");
    }
    rep.abscissa_ok = rep.abscissa <= -rep.bound + 1e-12;
    rep.weighted_ok = rep.abscissa <= -rep.weighted_bound + 1e-12;

    rep.horizon = horizon > 0.0 ? horizon : std::min(10.0 / rep.bound, 1e4);
    const double T = rep.horizon;
    constexpr int kFit = 41;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (int i = 0; i < kFit; ++i) {
        const double t = 0.5 * T + 0.5 * T * i / (kFit - 1);
        const double y = prop.log_norm(t);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double slope = (kFit * sty - st * sy) / (kFit * stt - st * st);
    rep.fitted_rate = -slope;
    rep.rate_ok = rep.fitted_rate >= rep.bound;

    constexpr int kScan = 129;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
        const double t = T * i / (kScan - 1);
        worst = std::max(worst, prop.log_norm(t) + rep.bound * t);
    }
    rep.prefactor = std::exp(worst);
    return rep;
}

std::vector<DecayReport> verify_decay_bound(const FluidParams& params, double beta, const std::vector<Vec3>& modes,
                                            double horizon) {
    std::vector<DecayReport> out;
    out.reserve(modes.size());
    for (const auto& xi : modes) out.push_back(decay_report(params, beta, xi, horizon));
    return out;
}

void write_decay_csv(std::ostream& out, const std::vector<DecayReport>& reports) {
    const auto old = out.precision(17);
    out << "xi1,xi2,xi3,kappa,abscissa,fitted_rate,prefactor\n";
    for (const auto& r : reports) {
        out << r.xi[0] << ',' << r.xi[1] << ',' << r.xi[2] << ',' << r.kappa << ',' << r.abscissa << ','
            << r.fitted_rate << ',' << r.prefactor << '\n';
    }
    out.precision(old);
}

Vec4 duhamel_solution(double t, const Vec3& xi, const FluidParams& params, const Vec4& U0,
                      const std::function<Vec4(double)>& forcing, int panels) {
    require(t >= 0.0 && panels >= 1, "duhamel: t >= 0 and panels >= 1 required");
    static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
    static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                0.1012285362903763};
    const ModePropagator prop(xi, params);
    Vec4 acc = prop(t) * U0;
    const double h = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double tau = mid + sgn * 0.5 * h * x[i];
                acc += 0.5 * h * w[i] * (prop(t - tau) * forcing(tau));
            }
        }
    }
    return acc;
}

}  // namespace nsc::linear
