#include "capstrip/bachelier.hpp"

#include "capstrip/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace capstrip {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;
constexpr double kLogInvSqrt2Pi = -0.918938533204672741780329736406;  // log(1/sqrt(2 pi))
constexpr double kDirectLimit = 2.5;
constexpr int kFractionDepth = 120;
constexpr double kIntrinsicSlack = 1e-14;

// C(x) = 1/(x + 2/(x + 3/(x + ...))), so that the Mills ratio is Phi(-x)/phi(x) = 1/(x + C(x)).
double mills_tail(double x) noexcept {
    double t = x;
    for (int k = kFractionDepth; k >= 2; --k) t = x + k / t;
    return 1.0 / t;
}

struct TailTerms {
    double log_g;      // log of phi(x) - x Phi(-x)
    double phi_over_g; // phi(x) / g(x) = d log h / d log s
};

TailTerms tail_terms(double x) noexcept {
    if (x <= kDirectLimit) {
        const double g = normalised_time_value(x);
        return {std::log(g), normal_pdf(x) / g};
    }
    const double c = mills_tail(x);
    return {kLogInvSqrt2Pi - 0.5 * x * x + std::log(c) - std::log(x + c), (x + c) / c};
}

void validate(double expiry, double accrual, double pay_df) {
    if (!(expiry > 0.0)) throw std::domain_error("bachelier: expiry must be positive");
    if (!(accrual > 0.0)) throw std::domain_error("bachelier: accrual must be positive");
    if (!(pay_df > 0.0)) throw std::domain_error("bachelier: discount factor must be positive");
}

void validate(const CapletQuoteInputs& in) {
    validate(in.expiry, in.accrual, in.pay_df);
    if (in.vol < 0.0 || std::isnan(in.vol)) throw std::domain_error("bachelier: volatility must be non-negative");
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5); }

double normalised_time_value(double x) noexcept {
    x = std::abs(x);
    if (x <= kDirectLimit) {
        return normal_pdf(x) - x * normal_cdf(-x);
    }
    const double c = mills_tail(x);
    return normal_pdf(x) * c / (x + c);
}

double intrinsic(const CapletQuoteInputs& in) noexcept {
    const double payoff = in.side == OptionSide::Call ? in.forward - in.strike : in.strike - in.forward;
    return in.pay_df * in.accrual * std::max(payoff, 0.0);
}

double time_value(const CapletQuoteInputs& in) {
    validate(in);
    if (in.vol == 0.0) return 0.0;
    const double s = in.vol * std::sqrt(in.expiry);
    return in.pay_df * in.accrual * s * normalised_time_value((in.forward - in.strike) / s);
}

double price(const CapletQuoteInputs& in) {
    validate(in);
    return intrinsic(in) + time_value(in);
}

double vega(const CapletQuoteInputs& in) {
    validate(in);
    const double root_t = std::sqrt(in.expiry);
    if (in.vol == 0.0) {
        return in.forward == in.strike ? in.pay_df * in.accrual * root_t * kInvSqrt2Pi : 0.0;
    }
    return in.pay_df * in.accrual * root_t * normal_pdf((in.forward - in.strike) / (in.vol * root_t));
}

double implied_vol_from_time_value(double target_time_value, double forward, double strike, double expiry,
                                   double accrual, double pay_df) {
    validate(expiry, accrual, pay_df);
    if (target_time_value < -kIntrinsicSlack) throw NegativeTimeValueError(-target_time_value);
    if (!(target_time_value > 0.0)) return 0.0;

    const double root_t = std::sqrt(expiry);
    const double ntv = target_time_value / (pay_df * accrual);  // = s g(a / s), s = sigma sqrt(t)
    const double a = std::abs(forward - strike);
    if (a == 0.0) return ntv * kSqrt2Pi / root_t;

    // h(s) = s g(a/s) is increasing, and s phi(0) - a/2 <= h(s) <= s phi(0).
    const double log_target = std::log(ntv);
    double lo = std::log(ntv * kSqrt2Pi);
    double hi = std::log((ntv + 0.5 * a) * kSqrt2Pi);

    auto objective = [&](double u, double& slope) {
        const TailTerms tt = tail_terms(a * std::exp(-u));
        slope = tt.phi_over_g;
        return u + tt.log_g - log_target;
    };

    // Start from whichever regime fits better: near the money h ~ s phi(0) - a/2, far out of the
    // money log g(x) ~ -x^2/2 - 2 log x - log sqrt(2 pi).
    double u = hi;
    {
        const double log_ratio = log_target - std::log(a);  // log(g(x)/x)
        if (log_ratio < -2.0) {
            double x = std::sqrt(-2.0 * log_ratio);
            for (int j = 0; j < 4; ++j) {
                const double rhs = -log_ratio + kLogInvSqrt2Pi - 3.0 * std::log(x);
                if (rhs <= 0.0) break;
                x = std::sqrt(2.0 * rhs);
            }
            const double guess = std::log(a / x);
            if (guess > lo && guess < hi) u = guess;
        }
    }

    double slope = 0.0;
    double f = objective(u, slope);
    for (int iter = 0; iter < 200 && f != 0.0; ++iter) {
        if (f > 0.0) hi = u; else lo = u;
        double next = u - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - u;
        u = next;
        f = objective(u, slope);
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) break;
    }
    return std::exp(u) / root_t;
}

double implied_vol(double target_price, double forward, double strike, double expiry, double accrual,
                   double pay_df, OptionSide side) {
    validate(expiry, accrual, pay_df);
    const CapletQuoteInputs zero_vol{forward, strike, 0.0, expiry, accrual, pay_df, side};
    const double tv = target_price - intrinsic(zero_vol);
    return implied_vol_from_time_value(tv, forward, strike, expiry, accrual, pay_df);
}

}  // namespace capstrip
