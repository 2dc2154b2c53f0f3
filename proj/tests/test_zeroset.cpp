#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "blowup/domain.hpp"
#include "blowup/zeroset.hpp"

using namespace blowup;

namespace {

struct Sampled {
    std::vector<double> xs, V;
};

template <class F>
Sampled sample(double a, double b, std::size_t n, F fn)
{
    Sampled s;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        s.xs.push_back(x);
        s.V.push_back(fn(x));
    }
    return s;
}

bool contiguous(const std::vector<std::size_t>& idx)
{
    for (std::size_t k = 1; k < idx.size(); ++k)
        if (idx[k] != idx[k - 1] + 1)
            return false;
    return true;
}

} // namespace

TEST(SublevelComponents, QuadraticWell)
{
    const auto s = sample(-1.0, 1.0, 4097, [](double x) { return x * x; });
    const auto dec = sublevel_components(s.V, 0.25);
    ASSERT_EQ(dec.component_count(), 1u);
    EXPECT_FALSE(dec.touches_boundary[0]);
    const auto idx = dec.mask(0).indices();
    EXPECT_NEAR(s.xs[idx.front()], -0.5, 1e-12);
    EXPECT_NEAR(s.xs[idx.back()], 0.5, 1e-12);
}

TEST(SublevelComponents, TwoBoundaryComponents)
{
    const auto s = sample(-1.0, 1.0, 1001, [](double x) { return 1.0 - x * x; });
    const auto dec = sublevel_components(s.V, 0.1);
    ASSERT_EQ(dec.component_count(), 2u);
    EXPECT_TRUE(dec.touches_boundary[0]);
    EXPECT_TRUE(dec.touches_boundary[1]);
    EXPECT_EQ(dec.labels[0], 0);
    EXPECT_EQ(dec.labels[1000], 1);
    EXPECT_EQ(dec.labels[500], -1);
}

TEST(SublevelComponents, TwoDimensionalGridUsesAxisNeighbours)
{
    // Two cells touching only diagonally stay separate.
    const GridShape shape{3, 3};
    std::vector<double> V(9, 1.0);
    V[0] = 0.0;
    V[4] = 0.0;
    const auto dec = sublevel_components(V, shape, 0.5);
    EXPECT_EQ(dec.component_count(), 2u);
    EXPECT_TRUE(dec.touches_boundary[static_cast<std::size_t>(dec.labels[0])]);
    EXPECT_FALSE(dec.touches_boundary[static_cast<std::size_t>(dec.labels[4])]);
}

TEST(SublevelComponentsProperty, NestedAcrossThresholds)
{
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double c[4];
        for (double& v : c)
            v = U(rng);
        const auto s = sample(-1.0, 1.0, 1024, [&](double x) {
            return 0.6 + 0.25 * (c[0] * std::cos(3 * x) + c[1] * std::sin(7 * x) + c[2] * std::cos(13 * x) +
                                 c[3] * std::sin(23 * x));
        });
        std::vector<ComponentDecomposition> decs;
        for (int m = 1; m <= 64; ++m)
            decs.push_back(sublevel_components(s.V, 1.0 / m));
        for (std::size_t a = 0; a < decs.size(); ++a)
            for (std::size_t b = 0; b < a; ++b) {
                // decs[a] has the lower threshold.
                EXPECT_TRUE(components_nested(decs[a], decs[b]));
                std::vector<int> host(decs[a].component_count(), -2);
                for (std::size_t k = 0; k < s.V.size(); ++k) {
                    const int la = decs[a].labels[k];
                    if (la < 0)
                        continue;
                    const int lb = decs[b].labels[k];
                    ASSERT_GE(lb, 0);
                    auto& h = host[static_cast<std::size_t>(la)];
                    if (h == -2)
                        h = lb;
                    ASSERT_EQ(h, lb);
                }
            }
    }
}

TEST(IsolatingSubdomain, QuadraticOnFineGrid)
{
    const auto s = sample(-1.0, 1.0, 4096, [](double x) { return x * x; });
    const std::size_t x0 = 2047;  // nearest node to 0
    auto V = s.V;
    V[x0] = 0.0;
    const auto z = isolating_subdomain(V, x0);
    EXPECT_EQ(z.m, 2.0);
    const auto idx = z.omega0.indices();
    ASSERT_FALSE(idx.empty());
    EXPECT_TRUE(z.omega0[x0]);
    EXPECT_TRUE(contiguous(idx));
    const double h = 2.0 / 4095.0;
    const double delta = 1.0 / std::sqrt(z.m);
    EXPECT_NEAR(s.xs[idx.front()], -delta, h);
    EXPECT_NEAR(s.xs[idx.back()], delta, h);
    EXPECT_NEAR(z.eta, 1.0 / z.m, 0.02 / z.m);
    for (std::size_t k : z.omega0.boundary_nodes())
        EXPECT_GE(V[k], z.eta);
}

TEST(IsolatingSubdomain, SeparatesNeighbouringZero)
{
    const auto s = sample(-0.5, 1.5, 2001, [](double x) { return x * x * (1.0 - x) * (1.0 - x); });
    const std::size_t x0 = 500;
    const std::size_t x1 = 1500;
    ASSERT_NEAR(s.xs[x0], 0.0, 1e-12);
    ASSERT_NEAR(s.xs[x1], 1.0, 1e-12);
    auto V = s.V;
    V[x0] = V[x1] = 0.0;
    const auto z = isolating_subdomain(V, x0);
    EXPECT_TRUE(z.omega0[x0]);
    EXPECT_FALSE(z.omega0[x1]);
    EXPECT_GT(z.eta, 0.0);
}

TEST(IsolatingSubdomain, ZeroTouchingBoundaryAndNonZero)
{
    const auto s = sample(0.0, 1.0, 201, [](double x) { return std::max(0.0, 0.5 - x); });
    try {
        (void)isolating_subdomain(s.V, 150);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroTouchesBoundary);
    }
    try {
        (void)isolating_subdomain(s.V, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAZero);
    }
}

TEST(IsolatingSubdomain, BallOriginIsInterior)
{
    const auto dom = Domain::ball(3, 1.0, 257, Boundary::DirichletZero);
    std::vector<double> V(dom.size());
    for (std::size_t i = 0; i < V.size(); ++i)
        V[i] = dom.coordinate(i) * dom.coordinate(i);
    const auto z = isolating_subdomain(V, dom, 0);
    EXPECT_TRUE(z.omega0[0]);
    EXPECT_EQ(z.m, 2.0);
    // Only the outer edge of omega0 is a boundary node.
    const auto bn = z.omega0.boundary_nodes();
    ASSERT_EQ(bn.size(), 1u);
    EXPECT_GT(bn[0], 0u);
}

TEST(IsolatingSubdomainProperty, NestedInM)
{
    const auto s = sample(-1.0, 1.0, 2049, [](double x) { return x * x * (1.2 + std::sin(5.0 * x)); });
    const std::size_t x0 = 1024;
    for (int m = 1; m <= 64; ++m) {
        const auto outer = sublevel_components(s.V, 1.0 / m);
        const auto inner = sublevel_components(s.V, 1.0 / (m + 1));
        EXPECT_TRUE(inner.mask(inner.labels[x0]).subset_of(outer.mask(outer.labels[x0])));
    }
}

TEST(IsolatingSubdomainProperty, RandomWellsGiveValidCertificates)
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c = -0.5 + U(rng), w = 0.5 + 3.0 * U(rng), b = U(rng);
        auto s = sample(-1.0, 1.0, 801, [&](double x) {
            const double d = x - c;
            return w * d * d * (1.0 + 0.5 * b * std::cos(9.0 * x));
        });
        std::size_t x0 = 0;
        for (std::size_t i = 1; i < s.xs.size(); ++i)
            if (std::abs(s.xs[i] - c) < std::abs(s.xs[x0] - c))
                x0 = i;
        s.V[x0] = 0.0;
        const auto z = isolating_subdomain(s.V, x0);
        const auto idx = z.omega0.indices();
        EXPECT_TRUE(z.omega0[x0]);
        EXPECT_TRUE(contiguous(idx));
        EXPECT_GT(idx.front(), 0u);
        EXPECT_LT(idx.back(), s.V.size() - 1);
        for (std::size_t k : z.omega0.boundary_nodes())
            EXPECT_GE(s.V[k], z.eta);
        EXPECT_GE(z.eta, 0.0);
    }
}

TEST(IsolatingSubdomainProperty, StableUnderRefinement)
{
    const auto V = [](double x) { return x * x * (1.0 + 0.3 * std::sin(4.0 * x)) + 0.2 * x * x * x * x; };
    const auto coarse = sample(-1.0, 1.0, 1025, V);
    const auto fine = sample(-1.0, 1.0, 2049, V);
    const auto zc = isolating_subdomain(coarse.V, 512);
    const auto zf = isolating_subdomain(fine.V, 1024);
    ASSERT_EQ(zc.m, zf.m);
    double modulus = 0.0;
    for (std::size_t i = 0; i + 1 < coarse.V.size(); ++i)
        modulus = std::max(modulus, std::abs(coarse.V[i + 1] - coarse.V[i]));
    EXPECT_LT(std::abs(zc.eta - zf.eta), modulus);
}

TEST(WriteMask, ZeroOneCsv)
{
    const auto s = sample(-1.0, 1.0, 65, [](double x) { return x * x; });
    const auto z = isolating_subdomain(s.V, 32);
    const auto path = std::filesystem::temp_directory_path() / "blowup_mask.csv";
    write_mask(z.omega0, s.xs, path);
    const auto table = csv::read_table(path);
    ASSERT_EQ(table.rows.size(), 65u);
    std::size_t ones = 0;
    for (const auto& r : table.rows) {
        EXPECT_TRUE(r[1] == 0.0 || r[1] == 1.0);
        ones += r[1] == 1.0;
    }
    EXPECT_EQ(ones, z.omega0.count());
    std::filesystem::remove(path);
}
