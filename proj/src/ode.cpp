#include "disclin/ode.hpp"

#include <algorithm>
#include <cmath>

#include "disclin/errors.hpp"

namespace disclin::ode {

namespace {

// Dormand-Prince 4(5) tableau. The seventh stage equals the new derivative
// (FSAL), so an accepted step costs six right-side evaluations.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Error weights: fifth-order advancing solution minus the embedded fourth.
constexpr double kE[7] = {
    35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695, 125.0 / 192 - 393.0 / 640,
    -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100, -1.0 / 40,
};

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.17;  // 1/5 - 0.75 * kBeta (PI control)
constexpr double kBeta = 0.04;
constexpr double kMaxGrow = 5.0;
constexpr double kMaxShrink = 0.2;
constexpr long kMaxSteps = 20'000'000;

double step_floor(double t) { return 1e-14 * std::max(1.0, std::abs(t)); }

}  // namespace

void Step::eval(double t, std::vector<double>& out) const {
    const double h = t1 - t0;
    double th = h > 0.0 ? (t - t0) / h : 0.0;
    th = std::clamp(th, 0.0, 1.0);
    const double u = th - 1.0;
    // Cubic Hermite: y0, y1 and slopes h*f0, h*f1.
    const double b0 = (1.0 + 2.0 * th) * u * u;
    const double b1 = th * th * (3.0 - 2.0 * th);
    const double c0 = th * u * u * h;
    const double c1 = th * th * u * h;
    out.resize(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) {
        out[i] = b0 * y0[i] + b1 * y1[i] + c0 * f0[i] + c1 * f1[i];
    }
}

Result integrate(const Rhs& rhs, std::vector<double>& y, const Settings& s, const Observer& observer,
                 const StepGuard& guard) {
    const std::size_t n = y.size();
    if (s.t1 <= s.t0) return {Outcome::reached_end, s.t0};

    std::vector<double> k[7];
    for (auto& v : k) v.assign(n, 0.0);
    std::vector<double> ytmp(n), ynew(n);

    double t = s.t0;
    rhs(t, y, k[0]);

    // Conservative first step from the initial derivative scale.
    double f_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = s.abs_tol + s.rel_tol * std::abs(y[i]);
        f_scale = std::max(f_scale, std::abs(k[0][i]) / sc);
    }
    double h = std::min(s.max_step, f_scale > 0.0 ? 0.01 / f_scale : s.max_step);
    h = std::min(h, s.t1 - t);

    double err_old = 1e-4;
    bool just_rejected = false;
    long steps = 0;

    while (t < s.t1 - 1e-15 * std::max(1.0, std::abs(s.t1))) {
        if (++steps > kMaxSteps) throw IntegrationError("step budget exhausted");
        h = std::min(h, s.t1 - t);
        if (h < step_floor(t)) return {Outcome::step_collapse, t};

        bool singular = false;
        try {
            for (int st = 1; st < 7; ++st) {
                for (std::size_t i = 0; i < n; ++i) {
                    double acc = y[i];
                    for (int j = 0; j < st; ++j) acc += h * kA[st][j] * k[j][i];
                    ytmp[i] = acc;
                }
                if (st == 6) ynew = ytmp;  // fifth-order solution (row 6 of kA)
                rhs(t + kC[st] * h, ytmp, k[st]);
            }
        } catch (const CoincidentPositionsError&) {
            singular = true;
        }
        if (singular) {
            h *= 0.25;
            just_rejected = true;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
            e *= h;
            const double sc = s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err > 1.0) {
            h *= std::max(kMaxShrink, kSafety * std::pow(err, -0.2));
            just_rejected = true;
            continue;
        }

        if (guard && !guard(Step{t, t + h, y, ynew, k[0], k[6]})) {
            h *= 0.25;
            just_rejected = true;
            continue;
        }

        const double t_new = t + h;
        std::swap(y, ynew);  // y now holds the new state, ynew the previous one
        const Step step{t, t_new, ynew, y, k[0], k[6]};
        const ObserverAction act = observer ? observer(step, y) : ObserverAction::proceed;
        t = t_new;

        if (act == ObserverAction::halt) return {Outcome::halted, t};
        if (act == ObserverAction::state_modified) {
            rhs(t, y, k[0]);  // FSAL cache is stale after an external edit
        } else {
            k[0] = k[6];
        }

        double fac = kSafety * std::pow(std::max(err, 1e-16), -kAlpha) * std::pow(err_old, kBeta);
        fac = std::clamp(fac, kMaxShrink, just_rejected ? 1.0 : kMaxGrow);
        h = std::min(s.max_step, h * fac);
        err_old = std::max(err, 1e-4);
        just_rejected = false;
    }
    return {Outcome::reached_end, t};
}

double bisect_time(const Step& step, const std::function<double(double, const std::vector<double>&)>& f,
                   double lo, double hi, double time_tol) {
    std::vector<double> y;
    step.eval(lo, y);
    double flo = f(lo, y);
    if (flo == 0.0) return lo;
    while (hi - lo > time_tol) {
        const double mid = 0.5 * (lo + hi);
        step.eval(mid, y);
        const double fm = f(mid, y);
        if (fm == 0.0) return mid;
        if ((flo > 0.0) == (fm > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // Return the far end of the bracket, not its midpoint: the state there has
    // already crossed, so a caller that resumes integration from it sees a sign
    // consistent with the event it just handled. A midpoint can land a hair
    // before the zero, and resuming from such a state replays the crossing as
    // a spurious pair of extra events.
    return hi;
}

}  // namespace disclin::ode
