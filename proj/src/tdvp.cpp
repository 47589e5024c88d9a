#include "scarsim/tdvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "gsl_quiet.hpp"
#include "scarsim/kernels.hpp"
#include "scarsim/optimize.hpp"

namespace scarsim {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

using Mat2 = std::array<cplx, 4>;

void check_cell(int n_sites, std::size_t K) {
    if (K == 0 || n_sites % static_cast<int>(K) != 0)
        fail(ErrorKind::Shape, "unit cell of size " + std::to_string(K) + " does not divide N=" + std::to_string(n_sites));
}

// Row vector times 2x2 matrix.
inline void vec_mul(cplx& a, cplx& b, const Mat2& m) {
    cplx na = a * m[0] + b * m[2];
    cplx nb = a * m[1] + b * m[3];
    a = na;
    b = nb;
}

inline Mat2 mat_mul(const Mat2& x, const Mat2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

using Mat4 = Eigen::Matrix4cd;

Mat4 transfer(const SiteTensors& t) {
    Mat4 e = Mat4::Zero();
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int ip = 0; ip < 2; ++ip)
                    for (int jp = 0; jp < 2; ++jp)
                        e(2 * i + ip, 2 * j + jp) += std::conj(t.a[s][2 * i + j]) * t.a[s][2 * ip + jp];
    return e;
}

}  // namespace

SiteTensors site_tensors(const TdvpPoint& p) {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    SiteTensors t;
    t.a[0] = {c, 0.0, s, 0.0};
    t.a[1] = {0.0, kI * std::polar(1.0, -p.phi), 0.0, 0.0};
    return t;
}

double mps_norm2(int n_sites, BoundaryCondition bc, const std::vector<TdvpPoint>& cell) {
    check_cell(n_sites, cell.size());
    Mat4 prod = Mat4::Identity();
    for (int j = 0; j < n_sites; ++j) prod = prod * transfer(site_tensors(cell[static_cast<std::size_t>(j) % cell.size()]));
    if (bc == BoundaryCondition::Periodic) return prod.trace().real();
    const double r1 = std::sin(cell[0].theta);
    Eigen::Vector4cd l(1.0, 0.0, 0.0, 0.0);
    Eigen::Vector4cd r(1.0, r1, r1, r1 * r1);
    return (l.transpose() * prod * r)(0, 0).real();
}

CVector mps_state(const ConstrainedBasis& basis, const std::vector<TdvpPoint>& cell) {
    const int n = basis.n_sites();
    check_cell(n, cell.size());
    std::vector<SiteTensors> tensors;
    for (const auto& p : cell) tensors.push_back(site_tensors(p));
    const std::size_t K = cell.size();
    const double r1 = std::sin(cell[0].theta);
    CVector psi(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Config s = basis.state(i);
        cplx amp;
        if (basis.bc() == BoundaryCondition::Periodic) {
            Mat2 m{1.0, 0.0, 0.0, 1.0};
            for (int j = 0; j < n; ++j) m = mat_mul(m, tensors[static_cast<std::size_t>(j) % K].a[s >> j & 1u]);
            amp = m[0] + m[3];
        } else {
            cplx a = 1.0, b = 0.0;
            for (int j = 0; j < n; ++j) vec_mul(a, b, tensors[static_cast<std::size_t>(j) % K].a[s >> j & 1u]);
            amp = a + b * r1;
        }
        psi[static_cast<Eigen::Index>(i)] = amp;
    }
    const double norm2 = mps_norm2(n, basis.bc(), cell);
    if (!(norm2 > 0.0)) fail(ErrorKind::Solver, "MPS state has vanishing norm");
    psi /= std::sqrt(norm2);
    return psi;
}

CVector mps_state(const ConstrainedBasis& basis, const TdvpPoint& point) {
    return mps_state(basis, std::vector<TdvpPoint>{point});
}

Rhs eom_rhs(const TdvpPoint& p, double mu) {
    const double s = std::sin(p.theta), c = std::cos(p.theta);
    const double sp = std::sin(p.phi), cp = std::cos(p.phi);
    double ratio;
    if (std::abs(s) < kPoleCutoff) {
        ratio = std::abs(sp) < kPoleCutoff ? 0.0 : sp / std::copysign(kPoleCutoff, s);
    } else {
        ratio = sp / s;
    }
    const double s2 = s * s;
    return {-c * cp * (1.0 + s2), mu + ratio * (1.0 - 4.0 * s2 - s2 * s2)};
}

std::array<double, 2> eom_rhs_uv(double u, double v, double mu) {
    const double r2 = u * u + v * v;
    return {-1.0 + r2 * r2 + 4.0 * v * v - mu * v, mu * u - 4.0 * u * v};
}

double energy_density(const TdvpPoint& p, double mu) {
    const double s = std::sin(p.theta), c = std::cos(p.theta);
    return s / (1.0 + s * s) * (mu * s + 2.0 * c * c * std::sin(p.phi));
}

double energy_density_uv(double u, double v, double mu) {
    const double r2 = u * u + v * v;
    return (mu * r2 + 2.0 * (1.0 - r2) * v) / (1.0 + r2);
}

double leakage(double theta) {
    const double s2 = std::pow(std::sin(theta), 2);
    return s2 * s2 * s2 / (1.0 + s2);
}

TdvpPoint antipodal_point(double mu) {
    const double s = (std::abs(mu) - std::sqrt(mu * mu + 16.0)) / 4.0;
    return {std::asin(s), mu >= 0.0 ? kPi / 2 : -kPi / 2};
}

namespace {

int uv_system(double, const double y[], double dydt[], void* params) {
    const double mu = *static_cast<double*>(params);
    auto r = eom_rhs_uv(y[0], y[1], mu);
    dydt[0] = r[0];
    dydt[1] = r[1];
    return GSL_SUCCESS;
}

// Continuous (theta, phi) lift of a regular-chart point, nearest to the previous sample.
TdvpPoint lift(double u, double v, const TdvpPoint& prev) {
    const double r = std::min(1.0, std::hypot(u, v));
    const double ta = std::asin(r);
    const double pa = (r == 0.0) ? prev.phi : std::atan2(v, u);
    const std::array<std::pair<double, double>, 4> families{
        std::pair{ta, pa}, std::pair{-ta, pa + kPi}, std::pair{kPi - ta, pa}, std::pair{ta - kPi, pa + kPi}};
    TdvpPoint best = prev;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto [th, ph] : families) {
        double dth = th - prev.theta;
        th -= 2.0 * kPi * std::round(dth / (2.0 * kPi));
        ph -= 2.0 * kPi * std::round((ph - prev.phi) / (2.0 * kPi));
        const double d = std::pow(th - prev.theta, 2) + std::pow(ph - prev.phi, 2);
        if (d < best_d) {
            best_d = d;
            best = {th, ph};
        }
    }
    return best;
}

struct Stepper {
    gsl_odeiv2_system sys;
    gsl_odeiv2_step* step;

    Stepper(double* mu) : sys{uv_system, nullptr, 2, mu}, step(gsl_odeiv2_step_alloc(gsl_odeiv2_step_rkck, 2)) {}
    ~Stepper() { gsl_odeiv2_step_free(step); }
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    // Single fixed step of size h from (t0, y0).
    std::array<double, 2> advance(double t0, const std::array<double, 2>& y0, double h) {
        std::array<double, 2> y = y0, err{};
        if (h == 0.0) return y;
        gsl_odeiv2_step_reset(step);
        gsl_odeiv2_step_apply(step, t0, h, y.data(), err.data(), nullptr, nullptr, &sys);
        return y;
    }
};

// Root of g along a single step [0, h] by bisection on re-stepped states.
template <class G>
double refine(Stepper& st, double t0, const std::array<double, 2>& y0, double h, G g) {
    double lo = 0.0, hi = h;
    const double g_lo = g(y0);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, t0); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(st.advance(t0, y0, mid));
        if ((gm < 0.0) == (g_lo < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TdvpOrbit integrate_orbit(const TdvpPoint& start, double mu, double t_end, double tol, double dt_out) {
    if (!std::isfinite(start.theta) || !std::isfinite(start.phi) || !std::isfinite(mu) || !std::isfinite(t_end))
        fail(ErrorKind::Config, "orbit inputs must be finite");
    if (!(tol > 0.0) || !(dt_out > 0.0) || t_end < 0.0) fail(ErrorKind::Config, "invalid orbit settings");
    detail::quiet_gsl();
    double mu_param = mu;
    gsl_odeiv2_system sys{uv_system, nullptr, 2, &mu_param};
    gsl_odeiv2_step* step = gsl_odeiv2_step_alloc(gsl_odeiv2_step_rkck, 2);
    // Tighter local control keeps the accumulated energy drift inside the requested tolerance.
    gsl_odeiv2_control* control = gsl_odeiv2_control_y_new(0.01 * tol, 0.0);
    gsl_odeiv2_evolve* evolve = gsl_odeiv2_evolve_alloc(2);
    Stepper refiner(&mu_param);

    TdvpOrbit orbit;
    orbit.mu = mu;
    const double s0 = std::sin(start.theta);
    std::array<double, 2> y{s0 * std::cos(start.phi), s0 * std::sin(start.phi)};
    const std::array<double, 2> y0 = y;
    TdvpPoint prev = start;
    auto push_sample = [&](double t, const std::array<double, 2>& yy) {
        TdvpPoint p = orbit.times.empty() ? start : lift(yy[0], yy[1], prev);
        prev = p;
        orbit.times.push_back(t);
        orbit.points.push_back(p);
        orbit.energy_density.push_back(energy_density_uv(yy[0], yy[1], mu));
    };
    push_sample(0.0, y);

    auto dist2 = [&](const std::array<double, 2>& yy) {
        return std::pow(yy[0] - y0[0], 2) + std::pow(yy[1] - y0[1], 2);
    };
    auto approach = [&](const std::array<double, 2>& yy) {
        auto f = eom_rhs_uv(yy[0], yy[1], mu);
        return (yy[0] - y0[0]) * f[0] + (yy[1] - y0[1]) * f[1];
    };
    const double return_radius = std::max(1e-6, 100.0 * tol);
    bool left_start = false;

    double t = 0.0, h = std::min(1e-3, std::max(dt_out, 1e-6));
    std::size_t sample = 1;
    while (t < t_end) {
        const double t_target = std::min(t_end, static_cast<double>(sample) * dt_out);
        while (t < t_target) {
            const double t_prev = t;
            const std::array<double, 2> y_prev = y;
            int status = gsl_odeiv2_evolve_apply(evolve, control, step, &sys, &t, t_target, &h, y.data());
            if (status != GSL_SUCCESS) {
                gsl_odeiv2_evolve_free(evolve);
                gsl_odeiv2_control_free(control);
                gsl_odeiv2_step_free(step);
                fail(ErrorKind::Solver, "orbit integration failed at t=" + std::to_string(t));
            }
            ++orbit.steps;
            const double dt_step = t - t_prev;
            // Turning points of theta: u changes sign away from the pole.
            if ((y_prev[0] < 0.0) != (y[0] < 0.0) && std::hypot(y[0], y[1]) > 1e-3) {
                double tau = refine(refiner, t_prev, y_prev, dt_step, [](const std::array<double, 2>& yy) { return yy[0]; });
                auto yt = refiner.advance(t_prev, y_prev, tau);
                orbit.turning_times.push_back(t_prev + tau);
                orbit.turning_points.push_back(lift(yt[0], yt[1], prev));
            }
            if (!left_start && dist2(y) > 1e-4) left_start = true;
            if (left_start && approach(y_prev) < 0.0 && approach(y) >= 0.0) {
                double tau = refine(refiner, t_prev, y_prev, dt_step, approach);
                auto yt = refiner.advance(t_prev, y_prev, tau);
                const double d = std::sqrt(dist2(yt));
                orbit.closest_return = std::min(orbit.closest_return, d);
                if (std::isnan(orbit.period) && d < return_radius) orbit.period = t_prev + tau;
            }
        }
        push_sample(t, y);
        ++sample;
    }
    gsl_odeiv2_evolve_free(evolve);
    gsl_odeiv2_control_free(control);
    gsl_odeiv2_step_free(step);
    return orbit;
}

double finite_size_leakage(const ConstrainedBasis& basis, const TdvpPoint& point, double mu) {
    const int n = basis.n_sites();
    SparseOperator H = build_pxp(basis, {1.0, mu});
    const double h = 1e-5;
    CVector psi = mps_state(basis, point);
    CVector dth = (mps_state(basis, {point.theta + h, point.phi}) - mps_state(basis, {point.theta - h, point.phi})) / (2 * h);
    CVector dph = (mps_state(basis, {point.theta, point.phi + h}) - mps_state(basis, {point.theta, point.phi - h})) / (2 * h);
    CVector r = -kI * H.apply(psi);
    auto orth = [&](CVector& x) { x -= psi * psi.dot(x); };
    orth(dth);
    orth(dph);
    orth(r);
    Eigen::Matrix2d G;
    Eigen::Vector2d b;
    G << dth.dot(dth).real(), dth.dot(dph).real(), dph.dot(dth).real(), dph.dot(dph).real();
    b << dth.dot(r).real(), dph.dot(r).real();
    Eigen::Vector2d x = G.ldlt().solve(b);
    CVector res = r - x[0] * dth - x[1] * dph;
    return res.squaredNorm() / n;
}

ManifoldOverlap::ManifoldOverlap(const ConstrainedBasis& basis, const CVector& psi)
    : n_sites_(basis.n_sites()), bc_(basis.bc()) {
    if (static_cast<std::size_t>(psi.size()) != basis.size())
        fail(ErrorKind::Basis, "manifold projection requires a full-basis state");
    sums_.assign(static_cast<std::size_t>(n_sites_) + 1, {cplx(0.0), cplx(0.0)});
    counts_.assign(static_cast<std::size_t>(n_sites_) + 1, {0.0, 0.0});
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Config s = basis.state(i);
        const auto n = static_cast<std::size_t>(popcount(s));
        const int last = bc_ == BoundaryCondition::Open ? static_cast<int>(s >> (n_sites_ - 1) & 1u) : 0;
        sums_[n][last] += psi[static_cast<Eigen::Index>(i)];
        counts_[n][last] += 1.0;
    }
}

double ManifoldOverlap::operator()(const TdvpPoint& p) const {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    const cplx x = kI * s * std::polar(1.0, -p.phi);
    cplx ov = 0.0;
    double norm = 0.0;
    for (std::size_t n = 0; n < sums_.size(); ++n) {
        for (int b = 0; b < 2; ++b) {
            if (counts_[n][b] == 0.0) continue;
            const int cexp = n_sites_ - 2 * static_cast<int>(n) + b;
            const cplx a = std::pow(c, cexp) * std::pow(x, static_cast<int>(n));
            ov += std::conj(a) * sums_[n][b];
            norm += counts_[n][b] * std::norm(a);
        }
    }
    if (!(norm > 0.0)) return 0.0;
    return std::norm(ov) / norm;
}

ManifoldProjection project_to_manifold(const ConstrainedBasis& basis, const CVector& psi) {
    ManifoldOverlap overlap(basis, psi);
    const int steps = 128;
    const double dx = 2.0 * kPi / steps;
    std::vector<GridCell> cells;
    cells.reserve(steps * steps);
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            TdvpPoint p{-kPi + i * dx, -kPi + j * dx};
            cells.push_back({p, overlap(p)});
        }
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a].overlap > cells[b].overlap; });
    ManifoldProjection out;
    for (std::size_t idx : order) {
        const auto& cand = cells[idx];
        bool separate = std::all_of(out.top_cells.begin(), out.top_cells.end(), [&](const GridCell& g) {
            return std::abs(g.point.theta - cand.point.theta) > 2.5 * dx || std::abs(g.point.phi - cand.point.phi) > 2.5 * dx;
        });
        if (separate) out.top_cells.push_back(cand);
        if (out.top_cells.size() == 3) break;
    }
    const TdvpPoint seed = out.top_cells.front().point;
    auto res = minimize_simplex([&](const std::vector<double>& x) { return 1.0 - overlap({x[0], x[1]}); },
                                {seed.theta, seed.phi}, {dx, dx}, 1e-10, 4000);
    out.point = {res.x[0], res.x[1]};
    out.overlap = 1.0 - res.value;
    if (out.overlap < out.top_cells.front().overlap) {
        out.point = seed;
        out.overlap = out.top_cells.front().overlap;
    }
    return out;
}

}  // namespace scarsim
