#include "bhchain/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bhchain/kernels.hpp"

namespace bhchain {

// ---------------------------------------------------------------- schedules

std::vector<double> log_schedule(double t_min, double t_end, int points_per_decade) {
    if (!(t_min > 0.0) || !(t_end > t_min))
        throw std::invalid_argument("log_schedule: need 0 < t_min < t_end");
    if (points_per_decade < 1)
        throw std::invalid_argument("log_schedule: points_per_decade must be >= 1");

    const double decades = std::log10(t_end / t_min);
    const long n = std::lround(decades * points_per_decade);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 2);
    for (long k = 0; k <= n; ++k) {
        double t = t_min * std::pow(10.0, static_cast<double>(k) / points_per_decade);
        if (t > t_end) break;
        out.push_back(t);
    }
    if (out.empty() || out.back() < t_end * (1.0 - 1e-12)) out.push_back(t_end);
    else out.back() = t_end;  // snap the final point
    // dedupe (relative)
    std::vector<double> uniq;
    uniq.reserve(out.size());
    for (double t : out)
        if (uniq.empty() || t > uniq.back() * (1.0 + 1e-12)) uniq.push_back(t);
    return uniq;
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
    if (!(constraint_tol > 0.0) || !(constraint_tol < 1.0))
        throw std::invalid_argument("IntegratorConfig: constraint_tol must be in (0,1)");
    if (!(t_end > 0.0))
        throw std::invalid_argument("IntegratorConfig: t_end must be > 0");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] < 0.0 || sample_times[i] > t_end * (1.0 + 1e-12))
            throw std::invalid_argument("IntegratorConfig: sample_times outside [0, t_end]");
        if (i > 0 && sample_times[i] <= sample_times[i - 1])
            throw std::invalid_argument("IntegratorConfig: sample_times must be increasing");
    }
}

// ------------------------------------------------------------------- dopri5

namespace {

// Dormand-Prince RK5(4)7M tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat (embedded 4th-order error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 5.0;

}  // namespace

Dopri5::Dopri5(const OdeSystem& sys, double rel_tol, double abs_tol, double h_max,
               std::uint64_t max_steps)
    : sys_(sys), n_(sys.dim()), rtol_(rel_tol), atol_(abs_tol), h_max_(h_max),
      max_steps_(max_steps) {
    y_.resize(n_);
    y_prev_.resize(n_);
    k1_.resize(n_); k2_.resize(n_); k3_.resize(n_); k4_.resize(n_);
    k5_.resize(n_); k6_.resize(n_); k7_.resize(n_);
    ytmp_.resize(n_);
    cont_.resize(5 * static_cast<std::size_t>(n_));
}

void Dopri5::init(const std::vector<double>& y0, double t0) {
    if (static_cast<int>(y0.size()) != n_)
        throw std::invalid_argument("Dopri5::init: dimension mismatch");
    y_ = y0;
    y_prev_ = y0;
    t_ = t_prev_ = t0;
    sys_.rhs(y_.data(), k1_.data());
    ++n_rhs_;
    have_f0_ = true;
    h_next_ = initial_step();
    n_accepted_ = n_rejected_ = 0;
}

double Dopri5::initial_step() const {
    // Hairer-style estimate from the scaled norms of y and f.
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double sc = atol_ + rtol_ * std::abs(y_[i]);
        d0 += (y_[i] / sc) * (y_[i] / sc);
        d1 += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / n_);
    d1 = std::sqrt(d1 / n_);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    if (h_max_ > 0.0) h0 = std::min(h0, h_max_);
    // one explicit Euler probe to bound the second derivative
    std::vector<double> y1(n_), f1(n_);
    for (int i = 0; i < n_; ++i) y1[i] = y_[i] + h0 * k1_[i];
    sys_.rhs(y1.data(), f1.data());
    double d2 = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double sc = atol_ + rtol_ * std::abs(y_[i]);
        const double df = (f1[i] - k1_[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / n_) / h0;
    const double dm = std::max(d1, d2);
    double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dm, 0.2);
    double h = std::min(100.0 * h0, h1);
    if (h_max_ > 0.0) h = std::min(h, h_max_);
    return h;
}

Dopri5::StepResult Dopri5::step() {
    if (!have_f0_) throw std::logic_error("Dopri5::step before init");
    double h = h_next_;
    bool rejected_before = false;
    for (;;) {
        if (n_accepted_ + n_rejected_ > max_steps_) return StepResult::MaxStepsExceeded;
        if (!(h > std::abs(t_) * 1e-14) || !(h > 1e-300))
            return StepResult::StepSizeUnderflow;
        if (h_max_ > 0.0) h = std::min(h, h_max_);

        const double* y = y_.data();
        for (int i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * a21 * k1_[i];
        sys_.rhs(ytmp_.data(), k2_.data());
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        sys_.rhs(ytmp_.data(), k3_.data());
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        sys_.rhs(ytmp_.data(), k4_.data());
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        sys_.rhs(ytmp_.data(), k5_.data());
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] +
                                   a64 * k4_[i] + a65 * k5_[i]);
        sys_.rhs(ytmp_.data(), k6_.data());
        // 5th-order solution into ytmp_
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] +
                                   b5 * k5_[i] + b6 * k6_[i]);
        sys_.rhs(ytmp_.data(), k7_.data());  // FSAL
        n_rhs_ += 6;

        double err = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(ytmp_[i]));
            const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] +
                                  e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n_);

        if (err <= 1.0) {
            double fac = kSafety * std::pow(err > 0.0 ? 1.0 / err : 1e10, 0.2);
            fac = std::min(rejected_before ? 1.0 : kFacMax, std::max(kFacMin, fac));
            t_prev_ = t_;
            t_ = t_ + h;
            h_ = h;
            std::swap(y_prev_, y_);
            y_ = ytmp_;  // copy; ytmp_ reused next step
            build_dense();
            std::swap(k1_, k7_);  // FSAL
            h_next_ = h * fac;
            ++n_accepted_;
            return StepResult::Ok;
        }
        const double fac = std::max(kFacMin, kSafety * std::pow(1.0 / err, 0.2));
        h *= fac;
        rejected_before = true;
        ++n_rejected_;
    }
}

void Dopri5::build_dense() {
    const double h = h_;
    double* c = cont_.data();
    for (int i = 0; i < n_; ++i) {
        const double ydiff = y_[i] - y_prev_[i];
        const double bspl = h * k1_[i] - ydiff;
        c[i] = y_prev_[i];
        c[n_ + i] = ydiff;
        c[2 * n_ + i] = bspl;
        c[3 * n_ + i] = ydiff - h * k7_[i] - bspl;
        c[4 * n_ + i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] +
                             d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
    }
}

void Dopri5::interpolate(double t_query, double* out) const {
    const double h = t_ - t_prev_;
    const double th = (h != 0.0) ? (t_query - t_prev_) / h : 0.0;
    const double th1 = 1.0 - th;
    const double* c = cont_.data();
    for (int i = 0; i < n_; ++i) {
        out[i] = c[i] + th * (c[n_ + i] + th1 * (c[2 * n_ + i] +
                 th * (c[3 * n_ + i] + th1 * c[4 * n_ + i])));
    }
}

void Dopri5::refresh_rhs() {
    sys_.rhs(y_.data(), k1_.data());
    ++n_rhs_;
}

Dopri5::StepResult Dopri5::advance_to(double t_target) {
    while (t_ < t_target) {
        const double remain = t_target - t_;
        if (h_next_ > remain) h_next_ = remain;
        const StepResult r = step();
        if (r != StepResult::Ok) return r;
    }
    return StepResult::Ok;
}

// ------------------------------------------------------------ orbit driver

void PQSystem::rhs(const double* y, double* dydt) const {
    const int L = p_.L;
    kernels::table().eom_rhs(y, y + L, dydt, dydt + L, L, p_.J, p_.U, p_.mu,
                             p_.periodic());
}

namespace {

PQState unpack(const double* y, int L) {
    PQState s(L);
    std::copy(y, y + L, s.P.begin());
    std::copy(y + L, y + 2 * L, s.Q.begin());
    return s;
}

void record_sample(Trajectory& traj, double t, const double* y, const ChainParams& p) {
    traj.times.push_back(t);
    traj.states.push_back(unpack(y, p.L));
    traj.energy.push_back(kernels::energy(y, y + p.L, p.L, p.J, p.U, p.mu, p.periodic()));
    traj.constraint.push_back(kernels::constraint(y, y + p.L, p.L));
}

}  // namespace

IntegrationOutcome integrate_orbit(const PQState& initial, const ChainParams& params,
                                   const IntegratorConfig& cfg) {
    params.validate();
    cfg.validate();
    if (initial.size() != params.L)
        throw std::invalid_argument("integrate_orbit: state/params dimension mismatch");

    const auto t_start = std::chrono::steady_clock::now();
    const int L = params.L;

    std::vector<double> samples = cfg.sample_times;
    if (samples.empty()) samples = {0.0, cfg.t_end};
    if (samples.front() > 0.0) samples.insert(samples.begin(), 0.0);

    const double c0 = constraint_value(initial);
    const double v0 = std::abs(c0 - params.norm) / params.norm;
    if (v0 > cfg.constraint_tol)
        throw std::invalid_argument("integrate_orbit: initial state violates the constraint");

    std::vector<double> y0(2 * L);
    std::copy(initial.P.begin(), initial.P.end(), y0.begin());
    std::copy(initial.Q.begin(), initial.Q.end(), y0.begin() + L);

    PQSystem sys(params);
    Dopri5 stepper(sys, cfg.rel_tol, cfg.abs_tol, cfg.h_max, cfg.max_steps);
    stepper.init(y0);

    IntegrationOutcome out;
    out.stats.max_constraint_violation = v0;

    std::size_t next = 0;
    if (samples[0] == 0.0) {
        record_sample(out.trajectory, 0.0, y0.data(), params);
        next = 1;
    }

    const double t_final = samples.back();
    std::vector<double> yq(2 * L);

    while (stepper.t() < t_final) {
        const Dopri5::StepResult r = stepper.step();
        if (r != Dopri5::StepResult::Ok) {
            out.status = IntegrationStatus::StepFailure;
            out.fail_time = stepper.t();
            break;
        }
        const double* y = stepper.y().data();
        const double cv = kernels::constraint(y, y + L, L);
        const double viol = std::abs(cv - params.norm) / params.norm;
        if (viol > out.stats.max_constraint_violation)
            out.stats.max_constraint_violation = viol;
        if (viol > cfg.constraint_tol) {
            // unreliable tail: stop at the last accepted physical sample
            out.status = IntegrationStatus::ConstraintBreach;
            out.fail_time = stepper.t();
            break;
        }
        while (next < samples.size() && samples[next] <= stepper.t()) {
            stepper.interpolate(samples[next], yq.data());
            record_sample(out.trajectory, samples[next], yq.data(), params);
            ++next;
        }
        if (cfg.mode == IntegrationMode::Projected) {
            const double scale = std::sqrt(params.norm / cv);
            for (double& v : stepper.y_mutable()) v *= scale;
            stepper.refresh_rhs();
        }
    }

    out.stats.steps_accepted = stepper.n_accepted();
    out.stats.steps_rejected = stepper.n_rejected();
    out.stats.rhs_evals = stepper.n_rhs();
    out.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

}  // namespace bhchain
