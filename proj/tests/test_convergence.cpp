#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "ptgrid/convergence.hpp"

using namespace ptgrid;
using namespace ptgrid::convergence;

namespace {

ConvergenceOptions quick() {
    ConvergenceOptions o;
    o.eval_points = 20000;
    return o;
}

} // namespace

TEST(StratifiedCloud, SamePatternInEveryCell) {
    const std::size_t r = 9, density = 5;
    const auto c = stratified_cloud(2, r, density);
    ASSERT_EQ(c.points(0), (r - 1) * (r - 1) * density);
    std::map<std::pair<int, int>, int> per_cell;
    const double h = grid_spacing(r);
    for (std::size_t p = 0; p < c.points(0); ++p) {
        const auto x = c.point(0, p);
        const int i = static_cast<int>(std::floor((x[0] + 1.0) / h));
        const int j = static_cast<int>(std::floor((x[1] + 1.0) / h));
        ++per_cell[{i, j}];
        // Offset within the cell matches the offset in cell (0,0).
        const std::size_t k = p % density;
        const auto ref = c.point(0, k);
        EXPECT_NEAR(x[0] - i * h, ref[0], 1e-12);
        EXPECT_NEAR(x[1] - j * h, ref[1], 1e-12);
    }
    EXPECT_EQ(per_cell.size(), (r - 1) * (r - 1));
    for (const auto& [cell, n] : per_cell) EXPECT_EQ(n, static_cast<int>(density));
}

TEST(Convergence, SmoothFieldIsSecondOrder) {
    const auto rep = run_convergence(sine_product(), quick());
    ASSERT_FALSE(rep.exact);
    EXPECT_GE(*rep.rms_slope(), 1.8);
    EXPECT_LE(*rep.rms_slope(), 2.2);
    EXPECT_GE(rep.rms_fit->r_squared, 0.95);
    for (const auto& row : rep.rows) {
        ASSERT_TRUE(row.pointwise_bound.has_value());
        EXPECT_LE(row.max_abs, 2.0 * *row.pointwise_bound) << "r=" << row.resolution;
        EXPECT_GT(row.rms, 0.0);
    }
    // Halving h cuts the max error by roughly 2^2.
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const double ratio = rep.rows[i - 1].max_abs / rep.rows[i].max_abs;
        EXPECT_GT(ratio, 3.0);
        EXPECT_LT(ratio, 5.0);
    }
}

TEST(Convergence, KinkMaxErrorIsFirstOrder) {
    const auto rep = run_convergence(abs_kink(), quick());
    EXPECT_NEAR(*rep.max_slope(), 1.0, 0.2);
    EXPECT_GE(rep.rms_fit->r_squared, 0.95);
}

TEST(Convergence, HolderMaxErrorIsHalfOrder) {
    const auto rep = run_convergence(holder_sqrt(), quick());
    EXPECT_NEAR(*rep.max_slope(), 0.5, 0.15);
}

TEST(Convergence, AffineFieldIsExact) {
    const auto rep = run_convergence(affine(), quick());
    EXPECT_TRUE(rep.exact);
    EXPECT_FALSE(rep.rms_slope().has_value());
}

TEST(Convergence, CaseMetadata) {
    EXPECT_EQ(sine_product().label, Smoothness::C2);
    EXPECT_EQ(abs_kink().expected_order, 1.0);
    EXPECT_EQ(holder_sqrt().expected_order, 0.5);
    const auto h = holder_derivative(0.25);
    EXPECT_EQ(h.label, Smoothness::C1_alpha);
    EXPECT_DOUBLE_EQ(h.expected_order, 1.25);
    for (const auto& c : {sine_product(), abs_kink(), holder_sqrt(), h, affine()}) {
        EXPECT_GE(c.expected_order, 0.0);
        EXPECT_LE(c.expected_order, 2.0);
    }
}

TEST(Convergence, RejectsBadOptions) {
    auto o = quick();
    o.resolutions = {17, 33, 65};
    EXPECT_THROW((void)run_convergence(sine_product(), o), ValidationError);
    o.resolutions = {17, 33, 33, 65};
    EXPECT_THROW((void)run_convergence(sine_product(), o), ValidationError);
    o = quick();
    o.density = 3;
    EXPECT_THROW((void)run_convergence(sine_product(), o), ValidationError);
}

TEST(Stats, LinearFitRecoversLine) {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{1, 3, 5, 7, 9};
    const auto f = stats::linear_fit(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
    EXPECT_THROW((void)stats::linear_fit(std::vector<double>{1, 1}, std::vector<double>{1, 2}), ValidationError);
    EXPECT_EQ(stats::median({3, 1, 2}), 2.0);
    EXPECT_EQ(stats::median({4, 1, 2, 3}), 2.5);
}
