#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "psde/angular.hpp"

using namespace psde;

TEST_SUITE("angular")
{
    TEST_CASE("geometric schemes keep unit norm; naive Euler drifts upward on average")
    {
        AngularDemoConfig c;
        c.n_paths = 500;
        for (Scheme s : {Scheme::geometric_euler, Scheme::milstein_rkmk, Scheme::euler_renorm})
        {
            c.scheme = s;
            const AngularDemoResult r = angular_demo(c);
            CHECK(*std::max_element(r.max_norm_dev.begin(), r.max_norm_dev.end()) <= 1e-12);
        }
        c.scheme = Scheme::euler_naive;
        const AngularDemoResult r = angular_demo(c);
        CHECK(r.mean_norm.size() == c.n_steps() + 1);
        CHECK(r.mean_norm.front() == 1.0);
        // Monotone in expectation: compare block averages of the mean norm.
        double prev = 0.0;
        for (std::size_t b = 0; b < 5; ++b)
        {
            double m = 0.0;
            for (std::size_t n = b * 100 + 1; n <= (b + 1) * 100; ++n)
                m += r.mean_norm[n] / 100;
            CHECK(m > prev);
            prev = m;
        }
        const auto off = std::count_if(r.final_norm.begin(), r.final_norm.end(),
                                       [](double v) { return std::abs(v - 1.0) > 1e-3; });
        CHECK(off > 0.99 * c.n_paths);
    }

    TEST_CASE("histogram covers all paths")
    {
        AngularDemoConfig c;
        c.n_paths = 300;
        c.t_max = 0.5;
        const AngularDemoResult r = angular_demo(c);
        std::uint64_t n = 0;
        for (auto k : r.histogram)
            n += k;
        CHECK(n == c.n_paths);
        CHECK(r.histogram.size() == 50u);
    }

    TEST_CASE("results do not depend on the worker count")
    {
        AngularDemoConfig c;
        c.n_paths = 200;
        c.t_max = 1.0;
        const AngularDemoResult a = angular_demo(c);
        c.workers = 4;
        const AngularDemoResult b = angular_demo(c);
        CHECK(a.mean_norm == b.mean_norm);
        CHECK(a.terminal_angle == b.terminal_angle);
    }

    TEST_CASE("KS statistic")
    {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
        std::vector<double> x(20000);
        for (double& v : x)
            v = u(gen);
        CHECK(ks_uniform_statistic(x) < ks_critical(x.size(), 0.01));
        std::vector<double> narrow(x.size());
        std::transform(x.begin(), x.end(), narrow.begin(), [](double v) { return v / 2; });
        CHECK(ks_uniform_statistic(narrow) > ks_critical(x.size(), 0.01));
        CHECK(ks_critical(10000, 0.01) == doctest::Approx(0.016276).epsilon(1e-4));
    }
}
