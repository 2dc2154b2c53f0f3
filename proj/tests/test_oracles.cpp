#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "blowup/oracles/comparison.hpp"
#include "blowup/oracles/cutoff.hpp"
#include "blowup/oracles/heat_kernel.hpp"
#include "blowup/oracles/ode.hpp"
#include "blowup/oracles/rescale.hpp"
#include "blowup/oracles/supersolution.hpp"

using namespace blowup;
using namespace blowup::oracles;

TEST(OdeOracle, Examples)
{
    const auto a = exact_ode_blowup(1.0, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(a.T, 1.0);
    EXPECT_NEAR(a(0.75), 4.0, 1e-12);
    const auto b = exact_ode_blowup(1.0, 3.0, 1.0);
    EXPECT_DOUBLE_EQ(b.T, 0.5);
    EXPECT_NEAR(b(0.25), std::pow(2.0 * 0.25, -0.5), 1e-12);
    EXPECT_THROW(exact_ode_blowup(0.0, 2.0, 1.0), Error);
    EXPECT_THROW(exact_ode_blowup(1.0, 1.0, 1.0), Error);
    EXPECT_THROW(exact_ode_blowup(1.0, 2.0, -1.0), Error);
}

TEST(OdeOracleProperty, SolvesTheOde)
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double u0 = U(rng), p = 1.0 + U(rng), A = U(rng);
        const auto ode = exact_ode_blowup(u0, p, A);
        EXPECT_NEAR(ode(0.0), u0, 1e-12 * u0);
        const double t = 0.7 * ode.T, h = 1e-6 * ode.T;
        const double du = (ode(t + h) - ode(t - h)) / (2.0 * h);
        EXPECT_NEAR(du, A * std::pow(ode(t), p), 1e-6 * A * std::pow(ode(t), p));
    }
}

TEST(Supersolution, FlatPotentialSmallBeta)
{
    const Supersolution w{1.0, 1e-3, 0.2, 0.0, 1.0, 1.0};
    std::vector<double> grid;
    for (int i = 0; i < 10000; ++i)
        grid.push_back(-0.2 + 0.4 * i / 9999.0);
    const auto res = supersolution_residual(w, [](double) { return 0.0; }, 1.0, 2.0, grid);
    EXPECT_GT(res.condition_min, 0.0);
    EXPECT_GT(res.min_residual, 0.0);
}

TEST(Supersolution, LargeBetaFails)
{
    const Supersolution w{1.0, 0.9, 0.2, 0.0, 1.0, 1.0};
    std::vector<double> grid;
    for (int i = 0; i < 1001; ++i)
        grid.push_back(-0.2 + 0.4 * i / 1000.0);
    EXPECT_LT(supersolution_residual(w, [](double) { return 0.0; }, 1.0, 2.0, grid).condition_min, 0.0);
}

TEST(Supersolution, RejectsNodesOutsideBall)
{
    const Supersolution w{1.0, 0.1, 0.2, 0.0, 1.0, 1.0};
    EXPECT_THROW(supersolution_residual(w, [](double) { return 0.0; }, 1.0, 2.0, {0.0, 0.3}), Error);
}

TEST(Supersolution, QuadraticPotentialShrinksRadius)
{
    SupersolutionSearch in;
    in.M = 2.0;
    in.rho = 1.0;
    in.T = 1.0;
    in.p = 2.0;
    in.V = [](double x) { return x * x; };
    const auto fit = find_supersolution(in);
    const double coef = 2.0 * in.C / fit.w.alpha * std::pow(fit.w.K, in.p - 1.0);
    EXPECT_GT(fit.w.K, in.M);
    EXPECT_LT(fit.w.r, 0.5);
    EXPECT_LE(coef * fit.w.r * fit.w.r, 1.0 / 3.0 + 1e-9);
    EXPECT_GT(fit.residual.condition_min, 0.0);
    EXPECT_GE(fit.residual.min_residual, 0.0);
    EXPECT_GT(fit.w.beta, 0.0);
    EXPECT_LT(fit.w.beta, 1.0);
}

TEST(SupersolutionProperty, ConditionImpliesNonnegativeResidual)
{
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double p = 1.5 + U(rng);
        Supersolution w{0.5 + U(rng), 1e-3 + 0.2 * U(rng), 0.05 + 0.3 * U(rng), 0.0, 1.0, 1.0 / (p - 1.0)};
        const double c = 0.5 * U(rng);
        std::vector<double> grid;
        for (int i = 0; i < 401; ++i)
            grid.push_back(-w.r + 2.0 * w.r * i / 400.0);
        const auto res = supersolution_residual(w, [c](double x) { return c * x * x; }, 1.0, p, grid);
        if (res.condition_min >= 0.0) {
            EXPECT_GE(res.min_residual, -1e-9) << "trial " << trial;
        }
    }
}

TEST(Cutoff, PlateauAndSupport)
{
    const auto prof = cutoff_build(2.0, 2, 1.0);
    EXPECT_EQ(prof(0.8), 1.0);
    EXPECT_EQ(prof(-0.8), 1.0);
    EXPECT_EQ(prof(1.4), 0.0);
    for (double v : prof.phi) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    for (std::size_t i = 1; i < prof.phi.size(); ++i)
        EXPECT_LE(prof.phi[i], prof.phi[i - 1] + 1e-15);
    EXPECT_TRUE(std::isfinite(prof.C_inferred));
    EXPECT_GT(prof.C_inferred, 0.0);
}

TEST(Cutoff, BlendingPolynomialMeetsContactData)
{
    const CutoffPoly h;
    const auto inner = h.eval(kCutoffInner);
    EXPECT_NEAR(inner[0], 1.0, 1e-12);
    EXPECT_NEAR(inner[1], 0.0, 1e-10);
    EXPECT_NEAR(inner[2], 0.0, 1e-8);
    const auto outer = h.eval(kCutoffOuter);
    EXPECT_EQ(outer[0], 0.0);
    EXPECT_EQ(outer[1], 0.0);
    EXPECT_EQ(outer[2], 0.0);
    EXPECT_NEAR(outer[3], -6.0, 1e-12);
    // psi ~ (a - s)^(3l) at the contact point.
    const auto prof = cutoff_build(1.0, 3, 1.0);
    const double d = 1e-8;
    EXPECT_NEAR(prof.evaluate(kCutoffOuter - d) / std::pow(d, 9.0), 1.0, 1e-3);
}

TEST(Cutoff, Feasibility)
{
    const auto ok = cutoff_feasibility(2, 1.0);
    EXPECT_TRUE(ok.gradient_ok);
    EXPECT_TRUE(ok.laplacian_ok);
    EXPECT_EQ(ok.gradient_exponent, 10.0);
    EXPECT_EQ(ok.target_exponent, 6.0);
    try {
        (void)cutoff_build(1.0, 2, 1.9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Infeasible);
        EXPECT_NE(std::string(e.what()).find("2(3l-1)"), std::string::npos);
    }
    EXPECT_NO_THROW(cutoff_build(1.0, 7, 1.9));
    EXPECT_THROW(cutoff_build(1.0, 1, 1.0), Error);
    EXPECT_THROW(cutoff_build(1.0, 2, 2.0), Error);
}

TEST(Cutoff, InferredConstantStableUnderRefinement)
{
    for (double sigma : {0.5, 1.0, 1.5}) {
        for (int n : {1, 3}) {
            const int l = sigma > 1.2 ? 4 : 2;
            const double c1 = cutoff_build(1.0, l, sigma, 4001, n).C_inferred;
            const double c2 = cutoff_build(1.0, l, sigma, 8001, n).C_inferred;
            EXPECT_LT(std::abs(c1 - c2), 0.05 * c2) << "sigma " << sigma << " n " << n;
        }
    }
}

TEST(CutoffProperty, ConstantScalesWithRadius)
{
    // Every term of the bound carries R^-2.
    const double c1 = cutoff_build(1.0, 2, 1.0).C_inferred;
    const double c2 = cutoff_build(2.0, 2, 1.0).C_inferred;
    EXPECT_NEAR(c1 / c2, 4.0, 1e-6);
}

TEST(Comparison, Examples)
{
    const auto ok = comparison_threshold_check(2.0, 1.0, 0.5, 0.1, 0.05, 1.0);
    EXPECT_DOUBLE_EQ(ok.B, 0.75);
    EXPECT_NEAR(ok.margin, 0.0375, 1e-15);
    EXPECT_TRUE(ok.ok);
    const auto bad = comparison_threshold_check(2.0, 1.0, 0.5, 0.2, 0.05, 1.0);
    EXPECT_LT(bad.margin, 0.0);
    EXPECT_FALSE(bad.ok);
    EXPECT_THROW(comparison_threshold_check(2.0, 1.0, 1.0, 0.1, 0.0, 1.0), Error);
}

TEST(ComparisonProperty, MarginTendsToMinusEpsilonAsKApproachesKappa)
{
    for (double p : {1.5, 2.0, 3.0}) {
        const double alpha = 1.0 / (p - 1.0), kappa = std::pow(alpha, alpha);
        const auto c = comparison_threshold_check(p, 1.7, kappa * (1.0 - 1e-9), 0.05, 0.0, 1.0);
        EXPECT_NEAR(c.margin, -0.05, 1e-6);
    }
}

TEST(NondegeneracyExponent, FeasibleAndInfeasible)
{
    EXPECT_NEAR(nondegeneracy_exponent(2.0, 0.5, 0.1), 0.6, 1e-15);
    try {
        (void)nondegeneracy_exponent(2.0, 0.95, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Infeasible);
    }
}

namespace {

Trajectory synthetic(const Domain& dom, const std::vector<double>& times, double (*u)(double, double))
{
    Trajectory traj;
    for (double t : times) {
        SolutionState s;
        s.t = t;
        for (std::size_t i = 0; i < dom.size(); ++i)
            s.u.push_back(u(t, dom.coordinate(i)));
        traj.snapshots.push_back(std::move(s));
    }
    traj.status = TerminalStatus::BlowupDetected;
    return traj;
}

} // namespace

TEST(Rescale, IdentityWindow)
{
    const auto dom = Domain::interval(-2.0, 2.0, 65, Boundary::Neumann);
    std::vector<double> times;
    for (int k = 0; k <= 30; ++k)
        times.push_back(0.05 * k);
    const auto traj = synthetic(dom, times, [](double t, double x) { return (1.0 + t) * (3.0 + x); });
    const auto w = rescale_window(traj, dom, 2.0, 1.0, 1.0, 0.0, -0.5, 0.5, 1.0, 11, 21);
    EXPECT_DOUBLE_EQ(w.lambda, 1.0);
    for (std::size_t i = 0; i < w.s.size(); ++i)
        for (std::size_t j = 0; j < w.y.size(); ++j)
            EXPECT_NEAR(w.at(i, j), (2.0 + w.s[i]) * (3.0 + w.y[j]), 1e-12);
    EXPECT_THROW(rescale_window(traj, dom, 2.0, 1.0, 1.0, 0.0, -0.5, 0.5, 3.0), Error);
}

TEST(Rescale, OdeProfileIsSelfSimilar)
{
    const auto dom = Domain::interval(-1.0, 1.0, 33, Boundary::Neumann);
    std::vector<double> times;
    for (int k = 0; k <= 6000; ++k)
        times.push_back(1.0 - std::pow(10.0, -k / 1000.0));
    const auto traj = synthetic(dom, times, [](double t, double) { return 1.0 / (1.0 - t); });
    for (double lambda : {0.3, 0.1, 0.03}) {
        const auto w = rescale_window(traj, dom, 1.0, 1.0, 1.0 - lambda * lambda, 0.0, -1.0, 0.9, 0.5, 20, 9);
        for (std::size_t i = 0; i < w.s.size(); ++i)
            for (std::size_t j = 0; j < w.y.size(); ++j)
                EXPECT_NEAR(w.at(i, j) * (1.0 - w.s[i]), 1.0, 1e-3);
    }
}

TEST(Rescale, RoundTripThroughInverse)
{
    const auto dom = Domain::interval(-1.0, 1.0, 1025, Boundary::Neumann);
    std::vector<double> times;
    for (int k = 0; k <= 400; ++k)
        times.push_back(0.9 * k / 400.0);
    const auto traj =
        synthetic(dom, times, [](double t, double x) { return (1.0 + std::cos(2.0 * x)) / (1.0 - t) + 1.0; });
    const auto w = rescale_window(traj, dom, 1.0, 1.0, 0.5, 0.1, -0.5, 0.5, 1.0, 129, 257);
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> S(-0.5, 0.5), Y(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double t = 0.5 + w.lambda * w.lambda * S(rng);
        const double x = 0.1 + w.lambda * Y(rng);
        const double ref = sample_trajectory(traj, dom, t, x);
        EXPECT_NEAR(w.unscale(t, x), ref, 1e-3 * ref);
    }
}

TEST(Rescale, PdeBlowupApproachesFlatProfile)
{
    const auto dom = Domain::interval(-1.0, 1.0, 513, Boundary::DirichletZero);
    const ProblemSpec spec(dom, Potential::constant(1.0), Nonlinearity::power(2.0),
                           Field::expression("50*(1 - x^2)^2"));
    SolverOptions opt;
    opt.u_blow = 1e9;
    const auto run = run_to_blowup(spec, opt);
    ASSERT_EQ(run.trajectory.status, TerminalStatus::BlowupDetected);
    const double T = run.report.T_hat;
    std::size_t k = 0;
    while (run.trajectory.snapshots[k].max_u() < 1e4)
        ++k;
    const double t_hat = run.trajectory.snapshots[k].t;
    const auto w = rescale_window(run.trajectory, dom, T, 1.0, t_hat, 0.0, 0.0, 0.5, 1.0, 2, 41);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t j = 0; j < w.y.size(); ++j) {
        lo = std::min(lo, w.at(0, j));
        hi = std::max(hi, w.at(0, j));
    }
    EXPECT_LT((hi - lo) / hi, 0.1);
    EXPECT_NEAR(hi, 1.0, 0.1);  // kappa A^-alpha = 1
}

TEST(RescaledNonlinearity, Examples)
{
    EXPECT_DOUBLE_EQ(rescaled_nonlinearity(Nonlinearity::power(2.0), 0.37, 3.0), 9.0);
    EXPECT_NEAR(rescaled_nonlinearity(Nonlinearity::shifted_power(2.0), 0.1, 1.0), 1.0201, 1e-12);
    double worst = 0.0;
    const auto f = Nonlinearity::shifted_power(2.0);
    for (int i = 0; i <= 1000; ++i) {
        const double v = 10.0 * i / 1000.0;
        worst = std::max(worst, std::abs(rescaled_nonlinearity(f, 1e-3, v) - v * v));
    }
    EXPECT_LT(worst, 1e-2);
    EXPECT_THROW(rescaled_nonlinearity(Nonlinearity::log_power(1.5), 0.1, 1.0), Error);
}

TEST(HeatKernel, SymmetryAndTruncation)
{
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double t = std::pow(10.0, -2.0 + 2.0 * U(rng)), x = U(rng), y = U(rng);
        const auto a = dirichlet_heat_kernel(t, x, y), b = dirichlet_heat_kernel(t, y, x);
        EXPECT_NEAR(a.G, b.G, 1e-12);
        EXPECT_LT(a.tail_bound, 1e-12);
        EXPECT_NEAR(dirichlet_heat_kernel(t, x, y, a.terms + 50).G, a.G, 1e-12);
    }
    EXPECT_THROW(dirichlet_heat_kernel(0.0, 0.5, 0.5), Error);
}

TEST(HeatKernel, MassIsSubMarkovian)
{
    for (double t : {1e-3, 1e-2, 0.04, 0.06, 0.1, 1.0})
        for (double x : {0.1, 0.5, 0.9}) {
            const double m = heat_kernel_mass(t, x);
            EXPECT_GT(m, 0.0);
            // Strict only where the deficit is above roundoff.
            if (std::erfc(std::min(x, 1.0 - x) / std::sqrt(4.0 * t)) > 1e-14)
                EXPECT_LT(m, 1.0);
            else
                EXPECT_LE(m, 1.0);
        }
    EXPECT_LE(heat_kernel_mass(1e-5, 0.5), 1.0);
    EXPECT_NEAR(heat_kernel_mass(1e-4, 0.5), 1.0, 1e-12);
    EXPECT_NEAR(heat_kernel_mass(1e-2, 0.1), 1.0 - std::erfc(0.5), 1e-6);
    // Image sum and eigen series agree where both are accurate.
    EXPECT_NEAR(heat_kernel_mass(0.03, 0.3), heat_kernel_mass(0.03, 0.3, 400), 1e-13);
    // Series mass against trapezoid quadrature of G.
    double q = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i)
        q += (i == 0 || i == n ? 0.5 : 1.0) * dirichlet_heat_kernel(0.05, 0.3, i / double(n)).G / n;
    EXPECT_NEAR(q, heat_kernel_mass(0.05, 0.3), 1e-6);
}

TEST(HeatKernel, BoundaryFluxMatchesDifference)
{
    const double t = 0.03, x = 0.4, h = 1e-6;
    const auto g = dirichlet_heat_kernel(t, x, 0.0);
    EXPECT_NEAR(g.G, 0.0, 1e-14);
    const double fd = dirichlet_heat_kernel(t, x, h).G / h;
    EXPECT_NEAR(g.flux, fd, 1e-4 * std::abs(g.flux));
}

TEST(HeatKernel, LowerBoundShapeFits)
{
    std::vector<HeatKernelSample> samples;
    for (int a = 0; a <= 12; ++a) {
        const double t = 0.01 * std::pow(100.0, a / 12.0);
        for (int i = 1; i < 20; ++i)
            for (int j = 1; j < 20; ++j)
                samples.push_back({t, i / 20.0, j / 20.0});
    }
    const auto fit = fit_heat_kernel_lower_bound(samples);
    EXPECT_GT(fit.c1, 0.0);
    EXPECT_GT(fit.c2, 0.0);
    EXPECT_EQ(fit.violations, 0u);
    EXPECT_EQ(heat_kernel_bound_violations(samples, fit.c1, fit.c2), 0u);
}
