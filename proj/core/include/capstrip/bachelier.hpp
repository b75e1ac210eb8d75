#pragma once

namespace capstrip {

enum class OptionSide { Call, Put };

/// Inputs of one Bachelier caplet (or floorlet).
struct CapletQuoteInputs {
    double forward = 0.0;
    double strike = 0.0;
    double vol = 0.0;      ///< normal vol, decimal per sqrt(year)
    double expiry = 0.0;   ///< years to fixing
    double accrual = 0.0;  ///< year fraction
    double pay_df = 1.0;
    OptionSide side = OptionSide::Call;
};

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

/// phi(x) - x * Phi(-x) for x >= 0: the undiscounted OTM Bachelier price per unit of sigma sqrt(t).
/// Stable in the far tail (continued fraction of the Mills ratio), underflows to 0 only past x ~ 38.
double normalised_time_value(double x) noexcept;

/// pay_df * accrual * max(+-(F - K), 0).
double intrinsic(const CapletQuoteInputs& in) noexcept;

double price(const CapletQuoteInputs& in);
double time_value(const CapletQuoteInputs& in);
double vega(const CapletQuoteInputs& in);

/// Normal vol reproducing target_price. Newton on log(sigma) inside a guaranteed bracket,
/// bisection when a step leaves it. Throws NegativeTimeValueError below intrinsic.
double implied_vol(double target_price, double forward, double strike, double expiry, double accrual,
                   double pay_df, OptionSide side = OptionSide::Call);

/// Same inversion keyed on the time value directly (price minus intrinsic), avoiding the
/// cancellation of subtracting the intrinsic from an in-the-money price.
double implied_vol_from_time_value(double target_time_value, double forward, double strike, double expiry,
                                   double accrual, double pay_df);

}  // namespace capstrip
