#include "capstrip/errors.hpp"
#include "capstrip/solvers.hpp"
#include "capstrip/stripping.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace capstrip {
namespace {

using testing::kBp;
using testing::sample_clean_quotes;
using testing::sample_curves;
using testing::sample_quotes;

constexpr double kMonth = 1.0 / 12.0;

StripConfig make_config(StripMethod method, NodePlacement placement, VolFamilySpec family,
                        Positivity positivity = Positivity::None) {
    StripConfig c;
    c.method = method;
    c.placement = placement;
    c.family = family;
    c.positivity = positivity;
    return c;
}

// Quote set whose cap prices come from a known caplet curve: flat vols are backed out cap by cap.
CapQuoteSet quotes_from_curve(const RateCurves& curves, double strike, const std::vector<int>& maturities,
                              const VolCurve& curve) {
    const CapQuoteSet probe(curves, strike, maturities, std::vector<double>(maturities.size(), 0.01));
    const std::vector<double> target = model_cap_prices(probe, curve);
    std::vector<double> flat;
    for (std::size_t q = 0; q < maturities.size(); ++q) {
        const std::size_t n = probe.caplet_counts()[q];
        const auto root = brent(
            [&](double v) { return cap_price_from_flat_vol(probe.schedule(), v, strike, n) - target[q]; }, 1e-6,
            0.2, 1e-18);
        flat.push_back(root->x);
    }
    return {curves, strike, maturities, flat};
}

TEST(PlaceNodes, Conventions) {
    const std::vector<int> m{2, 3, 12, 24, 180};
    const auto at = place_nodes(m, 1, NodePlacement::AtMaturity);
    EXPECT_DOUBLE_EQ(at[0], 1 * kMonth);
    EXPECT_DOUBLE_EQ(at[4], 179 * kMonth);
    const auto mid = place_nodes(m, 1, NodePlacement::Midpoint);
    EXPECT_DOUBLE_EQ(mid[0], 1 * kMonth);
    EXPECT_DOUBLE_EQ(mid[1], 1.5 * kMonth);
    EXPECT_DOUBLE_EQ(mid[3], 17 * kMonth);
    const auto sample = place_nodes(sample_quotes().maturities(), 1, NodePlacement::Midpoint);
    EXPECT_DOUBLE_EQ(sample.back(), 149 * kMonth);
    const auto raw = place_nodes(m, 1, NodePlacement::MidpointUnshifted);
    EXPECT_DOUBLE_EQ(raw[3], 18 * kMonth);
    EXPECT_THROW(place_nodes(std::vector<int>{1, 2}, 1, NodePlacement::AtMaturity), InputError);
    EXPECT_THROW(place_nodes(std::vector<int>{3, 2}, 1, NodePlacement::AtMaturity), InputError);
}

TEST(FarQuote, AppendsAtTheEnd) {
    const CapQuoteSet q = sample_quotes();
    const CapQuoteSet far = add_synthetic_far_quote(q, 600);
    ASSERT_EQ(far.size(), 14u);
    EXPECT_EQ(far.maturities().back(), 600);
    EXPECT_EQ(far.flat_vols().back(), q.flat_vols().back());
    EXPECT_THROW(add_synthetic_far_quote(q, 180), InputError);
    EXPECT_THROW(add_synthetic_far_quote(q, 120), InputError);
}

TEST(FarQuote, LocalInterpolationOnlyMovesTheLastInterval) {
    const CapQuoteSet q = sample_clean_quotes();
    StripConfig cfg = make_config(StripMethod::TimeValue, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant());
    cfg.tv_interp = TimeValueInterp::Linear;
    const StripResult base = strip(q, cfg);
    const StripResult ext = strip(add_synthetic_far_quote(q, 181), cfg);
    ASSERT_EQ(ext.caplet_vols.size(), base.caplet_vols.size() + 1);
    for (std::size_t i = 0; i < base.caplet_vols.size(); ++i) EXPECT_EQ(ext.caplet_vols[i], base.caplet_vols[i]) << i;
}

TEST(TimeValueMethod, RepricesCleanQuotes) {
    for (TimeValueInterp interp : {TimeValueInterp::MonotoneCubic, TimeValueInterp::Linear}) {
        StripConfig cfg = make_config(StripMethod::TimeValue, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant());
        cfg.tv_interp = interp;
        const StripResult r = strip(sample_clean_quotes(), cfg);
        EXPECT_LE(r.max_abs_residual_bp, 1e-9);
        EXPECT_EQ(r.negative_increments, 0u);
        EXPECT_GE(r.min_vol, 0.0);
        EXPECT_EQ(r.caplet_vols.size(), 179u);
    }
}

TEST(TimeValueMethod, PriceInterpolationLosesMonotonicity) {
    StripConfig cfg = make_config(StripMethod::TimeValue, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant());
    cfg.interpolate_prices = true;
    const StripResult r = strip(sample_clean_quotes(), cfg);
    EXPECT_GT(r.negative_increments, 0u);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(TimeValueMethod, ArbitrageFilterDropsTheOffendingQuotes) {
    StripConfig cfg = make_config(StripMethod::TimeValue, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant());
    cfg.arbitrage_filter = true;
    const StripResult r = strip(sample_quotes(), cfg);
    EXPECT_FALSE(r.removed_quotes.empty());
    EXPECT_EQ(r.negative_increments, 0u);
    EXPECT_LE(r.max_abs_residual_bp, 1e-9);
}

TEST(TimeValueMethod, SingleQuote) {
    const RateCurves c = sample_curves();
    const CapQuoteSet q(c, 0.0, {2}, {79.30 * kBp});
    const StripResult r = strip(q, make_config(StripMethod::TimeValue, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant()));
    ASSERT_EQ(r.caplet_vols.size(), 1u);
    EXPECT_NEAR(r.caplet_vols[0], 79.30 * kBp, 1e-12);
}

TEST(Bootstrap, RepricesCleanQuotesExactly) {
    const StripResult r = strip(sample_clean_quotes(), StripConfig{});
    EXPECT_LE(r.max_abs_residual_bp, 1e-9);
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(r.node_values.size(), 11u);
}

TEST(Bootstrap, KernelNodesEqualStepNodes) {
    const CapQuoteSet q = sample_clean_quotes();
    const StripResult step = strip(q, StripConfig{});
    for (Kernel k : {Kernel::Rect, Kernel::Smoothstep}) {
        for (double beta : {0.25, 0.5, 1.0}) {
            const StripResult r = strip(q, make_config(StripMethod::Bootstrap, NodePlacement::AtMaturity,
                                                       VolFamilySpec::kernel_ramp(k, beta)));
            for (std::size_t i = 0; i < step.node_values.size(); ++i) {
                EXPECT_LE(std::abs(r.node_values[i] - step.node_values[i]), 1e-12 * std::abs(step.node_values[i]));
            }
        }
    }
}

TEST(Bootstrap, SingleCapIsItsFlatVol) {
    const CapQuoteSet q(sample_curves(), 0.01, {12}, {0.0085});
    const StripResult r = strip(q, StripConfig{});
    EXPECT_NEAR(r.node_values[0], 0.0085, 1e-14);
}

TEST(Bootstrap, RejectsMidpointForCoupledFamilies) {
    EXPECT_THROW(strip(sample_clean_quotes(),
                       make_config(StripMethod::Bootstrap, NodePlacement::Midpoint, VolFamilySpec::linear())),
                 InputError);
}

TEST(Bootstrap, ClampsWhenNoRootAboveTheFloor) {
    const StripResult r = strip(sample_quotes(), StripConfig{});
    EXPECT_FALSE(r.warnings.empty());
    EXPECT_GT(r.max_abs_residual_bp, 1e-3);
    EXPECT_GE(r.min_node_value, 0.0);
}

TEST(Global, RepricesCleanQuotesForMidpointFamilies) {
    const CapQuoteSet q = sample_clean_quotes();
    for (const VolFamilySpec& f : {VolFamilySpec::linear(), VolFamilySpec::cubic(), VolFamilySpec::hyman()}) {
        const StripResult r = strip(q, make_config(StripMethod::Global, NodePlacement::Midpoint, f));
        EXPECT_LE(r.max_abs_residual_bp, 1e-9) << to_string(f.family);
        EXPECT_TRUE(r.converged);
    }
}

TEST(RoundTrip, RecoversKnownNodes) {
    const RateCurves c = sample_curves();
    const std::vector<int> m{3, 6, 12, 24, 36, 60, 120};
    struct Case {
        StripMethod method;
        NodePlacement placement;
        VolFamilySpec family;
    };
    for (const Case& cs : {Case{StripMethod::Bootstrap, NodePlacement::AtMaturity, VolFamilySpec::piecewise_constant()},
                           Case{StripMethod::Global, NodePlacement::AtMaturity, VolFamilySpec::linear()},
                           Case{StripMethod::Global, NodePlacement::Midpoint, VolFamilySpec::linear()},
                           Case{StripMethod::Global, NodePlacement::Midpoint, VolFamilySpec::cubic()},
                           Case{StripMethod::Global, NodePlacement::Midpoint, VolFamilySpec::hyman()}}) {
        const std::vector<double> nodes = place_nodes(m, 1, cs.placement);
        std::vector<double> values;
        for (double t : nodes) values.push_back((70.0 + 25.0 * std::exp(-t / 3.0) * std::sin(2.0 * t)) * kBp);
        const VolCurve truth(nodes, values, cs.family, kMonth);
        const CapQuoteSet q = quotes_from_curve(c, 0.015, m, truth);
        const StripResult r = strip(q, make_config(cs.method, cs.placement, cs.family));
        ASSERT_EQ(r.node_values.size(), values.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            EXPECT_NEAR(r.node_values[k], values[k], 1e-8 * values[k])
                << to_string(cs.method) << " " << to_string(cs.placement) << " " << to_string(cs.family.family) << " k=" << k;
        }
    }
}

TEST(Jacobian, TriangularForStepsAtMaturity) {
    const CapQuoteSet q = sample_clean_quotes();
    const auto nodes = place_nodes(q.maturities(), 1, NodePlacement::AtMaturity);
    const std::vector<double> v(q.flat_vols().begin(), q.flat_vols().end());
    const auto j = cap_price_jacobian(q, nodes, v, VolFamilySpec::piecewise_constant());
    for (std::size_t r = 0; r < j.size(); ++r) {
        EXPECT_GT(j[r][r], 0.0);
        for (std::size_t k = r + 1; k < j[r].size(); ++k) EXPECT_LE(std::abs(j[r][k]), 1e-12) << r << "," << k;
    }
}

TEST(Jacobian, NotTriangularAtMidpoints) {
    const CapQuoteSet q = sample_clean_quotes();
    const std::vector<double> v(q.flat_vols().begin(), q.flat_vols().end());
    for (const VolFamilySpec& f : {VolFamilySpec::piecewise_constant(), VolFamilySpec::linear()}) {
        const auto nodes = place_nodes(q.maturities(), 1, NodePlacement::Midpoint);
        const auto j = cap_price_jacobian(q, nodes, v, f);
        bool upper = false;
        for (std::size_t r = 0; r < j.size(); ++r) {
            for (std::size_t k = r + 1; k < j[r].size(); ++k) upper = upper || std::abs(j[r][k]) > 0.0;
        }
        EXPECT_TRUE(upper) << to_string(f.family);
    }
}

TEST(LinearNodes, NewCapletsCarryAboutHalfTheWeight) {
    // Caplets of the 24M cap beyond the 12M cap fix at 12..23M; nodes sit at 11M and 23M.
    const std::vector<double> nodes{11 * kMonth, 23 * kMonth};
    const VolCurve unit(nodes, {0.0, 1.0}, VolFamilySpec::linear(), kMonth);
    double total = 0.0;
    for (int m = 12; m <= 23; ++m) total += unit(m * kMonth);
    const double mean = total / 12.0;
    EXPECT_GE(mean, 0.45);
    EXPECT_LE(mean, 0.60);
}

TEST(Positivity, ExpTransformKeepsNodesPositive) {
    const StripResult r = strip(sample_quotes(), make_config(StripMethod::Global, NodePlacement::Midpoint,
                                                             VolFamilySpec::linear(), Positivity::ExpTransform));
    EXPECT_GT(r.min_node_value, 0.0);
}

TEST(Positivity, NonnegSplineAndFloor) {
    const StripResult h = strip(sample_quotes(), make_config(StripMethod::Global, NodePlacement::Midpoint,
                                                             VolFamilySpec::cubic(), Positivity::NonnegSpline));
    EXPECT_GE(h.min_node_value, 0.0);
    EXPECT_GE(h.min_vol, 0.0);
    StripConfig cfg = make_config(StripMethod::Global, NodePlacement::Midpoint, VolFamilySpec::hyman(), Positivity::Floor);
    cfg.floor = 10 * kBp;
    const StripResult f = strip(sample_quotes(), cfg);
    EXPECT_GE(f.min_node_value, 10 * kBp);
}

TEST(Positivity, CapletVolsAreNeverNegative) {
    const StripResult r = strip(sample_quotes(), make_config(StripMethod::Global, NodePlacement::AtMaturity,
                                                             VolFamilySpec::linear()));
    EXPECT_LT(r.min_node_value, 0.0);
    EXPECT_GE(r.min_vol, 0.0);
}

}  // namespace
}  // namespace capstrip
