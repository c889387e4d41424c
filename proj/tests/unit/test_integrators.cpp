#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_values.hpp"
#include "psde/integrators.hpp"
#include "psde/montecarlo.hpp"

using namespace psde;

namespace {

ModelParams no_scatter(double kappa = 0.0)
{
    ModelParams m;
    m.kappa = kappa;
    m.eps0 = 0.0;
    return m;
}

}  // namespace

TEST_SUITE("integrators")
{
    TEST_CASE("one log-Euler step follows the closed-form CSDA energy")
    {
        const ModelParams m = no_scatter();
        const double h = 1e-4;
        const double y = step_energy_euler(std::log(62.0), h, 0.0, m);
        const double exact = std::pow(std::pow(62.0, m.p) - h / m.alpha, 1.0 / m.p);
        CHECK(std::abs(std::exp(y) - exact) < 10 * h * h * 62.0);
        CHECK(std::abs(std::exp(y) - exact) > 0.0);
    }

    TEST_CASE("log-Euler with all drift and noise zeroed leaves Y unchanged")
    {
        CoeffBundle cb;
        CHECK(step_energy_euler(2.5, cb, 0.01, 0.0) == 2.5);
        CHECK(step_energy_milstein(2.5, cb, 0.01, 0.3) == 2.5);
    }

    TEST_CASE("energy stays positive over many random steps")
    {
        const ModelParams m = no_scatter(0.075);
        std::mt19937_64 gen(5);
        std::normal_distribution<double> n;
        std::uniform_real_distribution<double> u(std::log(4.0), std::log(200.0));
        const double h = 0.02;
        bool positive = true;
        for (int k = 0; k < 1000000; ++k)
        {
            const double y = u(gen);
            const double xi = std::sqrt(h) * n(gen) * 5.0;
            positive &= std::exp(step_energy_euler(y, h, xi, m)) > 0.0;
            positive &= std::exp(step_energy_milstein(y, h, xi, m)) > 0.0;
        }
        CHECK(positive);
    }

    TEST_CASE("Milstein correction vanishes without straggling or when xi^2 = h")
    {
        const double y = std::log(30.0);
        CHECK(step_energy_milstein(y, 0.01, 0.07, no_scatter()) ==
              step_energy_euler(y, 0.01, 0.07, no_scatter()));
        const ModelParams m = no_scatter(1e-3);
        const double h = 0.01;
        const double xi = std::sqrt(h);
        CHECK(step_energy_milstein(y, h, xi, m) == doctest::Approx(step_energy_euler(y, h, xi, m)).epsilon(1e-15));
        CHECK(step_energy_milstein(y, h, 2 * xi, m) != step_energy_euler(y, h, 2 * xi, m));
    }

    TEST_CASE("no angular diffusion leaves the direction unchanged")
    {
        ModelParams m;
        m.eps0 = 0.0;
        NoiseDraw nz{0.01, 0.05, -0.03, 0.001, 0.01};
        for (Scheme s : {Scheme::euler_naive, Scheme::euler_renorm, Scheme::geometric_euler,
                         Scheme::milstein_rkmk})
        {
            for (int dim : {2, 3})
            {
                const Direction w = Direction::normalized({0.6, 0.8, dim == 3 ? 0.5 : 0.0}, dim);
                const Direction out = step_angle(w, 20.0, 19.0, 0.01, nz, s, m);
                CHECK(distance(out.vec(), w.vec()) < 1e-15);
            }
        }
    }

    TEST_CASE("geometric Euler on the circle is a rotation by sqrt(2 eps h) lambda")
    {
        ModelParams m;
        m.eps0 = 0.1;
        const double h = 0.01;
        const double lambda = 0.37;
        NoiseDraw nz;
        nz.dw1 = std::sqrt(h) * lambda;
        nz.dgamma = h;
        const Direction w({1.0, 0.0, 0.0}, 2);
        const Direction out = step_angle(w, 10.0, 10.0, h, nz, Scheme::geometric_euler, m);
        const Direction ref = rotate_s1(w, std::sqrt(2 * m.eps0 * h) * lambda);
        CHECK(distance(out.vec(), ref.vec()) < 1e-15);
    }

    TEST_CASE("noise drawn on the true clock is not rescaled")
    {
        ModelParams m;
        m.angular_model = AngularModel::moliere;
        const double h = 0.01, e = 30.0, en = 29.0;
        const double clock = h * (angular_eps(e, m) + angular_eps(en, m));
        NoiseDraw on_clock{0.0, 0.02, -0.01, 3e-4, clock};
        NoiseDraw unit{0.0, 0.02 * std::sqrt(h / clock), -0.01 * std::sqrt(h / clock),
                       3e-4 * h / clock, h};
        const Direction w = Direction::normalized({0.2, 0.3, 0.9}, 3);
        const TangentFrame f = frame_at(w);
        const auto a = step_angle(w, f, e, en, h, on_clock, Scheme::milstein_rkmk, m,
                                  FrameMode::transported);
        const auto b = step_angle(w, f, e, en, h, unit, Scheme::milstein_rkmk, m,
                                  FrameMode::transported);
        CHECK(distance(a.omega.vec(), b.omega.vec()) < 1e-15);
    }

    TEST_CASE("unit norm for all schemes but naive Euler; frames stay orthonormal")
    {
        ModelParams m;
        m.eps0 = 0.1;
        PathRng rng(3, 0);
        for (Scheme s : {Scheme::euler_renorm, Scheme::geometric_euler, Scheme::milstein_rkmk})
        {
            ParticleState st = make_state({0, 0, 0}, Direction({1.0, 0.0, 0.0}, 3), 62.0);
            double dev = 0.0, frame_dev = 0.0;
            for (int n = 0; n < 2000; ++n)
            {
                const NoiseDraw nz = draw_noise(rng, 0.01, 0.01, 3);
                const AngleUpdate u = step_angle(st.omega, st.frame, 62.0, 62.0, 0.01, nz, s, m,
                                                 FrameMode::transported);
                st.omega = u.omega;
                st.frame = u.frame;
                dev = std::max(dev, std::abs(st.omega.norm() - 1.0));
                frame_dev = std::max(frame_dev, norm(cross(st.frame.u1, st.frame.u2) - st.omega.vec()));
            }
            CHECK(dev <= 1e-12);
            CHECK(frame_dev <= 1e-12);
        }
    }

    TEST_CASE("naive Euler on the circle drifts off the unit norm")
    {
        ModelParams m;
        m.eps0 = 0.1;
        NoiseOptions opts;
        opts.radial = true;
        int drifted = 0;
        const int n_paths = 1000;
        for (int i = 0; i < n_paths; ++i)
        {
            PathRng rng(1, i);
            Direction w({1.0, 0.0, 0.0}, 2);
            for (int n = 0; n < 500; ++n)
                w = step_angle(w, 10.0, 10.0, 0.01, draw_noise(rng, 0.01, 0.01, 2, opts),
                               Scheme::euler_naive, m);
            drifted += std::abs(w.norm() - 1.0) > 1e-3;
        }
        CHECK(drifted > 0.99 * n_paths);
    }

    TEST_CASE("position step")
    {
        const Direction w({1.0, 0.0, 0.0}, 2);
        CHECK(step_position({1.0, 2.0, 0.0}, w, 0.0) == Vec3{1.0, 2.0, 0.0});
        CHECK(distance(step_position({1.0, 2.0, 0.0}, w, 0.005), {1.005, 2.0, 0.0}) < 1e-16);
        const Direction v = Direction::normalized({0.5, 0.25, 0.0}, 2);
        Vec3 x{0.0, 0.0, 0.0};
        for (int n = 0; n < 64; ++n)
            x = step_position(x, v, 0.0625);
        CHECK(distance(x, 64 * 0.0625 * v.vec()) < 1e-14);
    }

    TEST_CASE("killing")
    {
        ModelParams m;
        Box box{{0.0, 0.0, -Box::inf}, {4.0, 4.0, Box::inf}};
        ParticleState s = make_state({1.0, 1.0, 0.0}, Direction({1.0, 0.0, 0.0}, 2), 4.0 + 1e-9);
        CHECK(apply_killing(s, box, m).alive);
        s.y = std::log(m.e_min);
        CHECK_FALSE(apply_killing(s, box, m).alive);
        s = make_state({4.1, 1.0, 0.0}, Direction({1.0, 0.0, 0.0}, 2), 30.0);
        CHECK_FALSE(apply_killing(s, box, m).alive);
        s = make_state({4.0, 0.0, 0.0}, Direction({1.0, 0.0, 0.0}, 2), 30.0);
        CHECK(apply_killing(s, box, m).alive);

        ParticleState dead = s;
        dead.alive = false;
        const ParticleState out = apply_killing(dead, box, m);
        CHECK_FALSE(out.alive);
        CHECK(out.x == dead.x);
        CHECK(out.y == dead.y);
        const ParticleState stepped
            = full_step(dead, NoiseDraw{0.1, 0.1, 0.1, 0.0, 0.01}, 0.01, Scheme::milstein_rkmk, m, box);
        CHECK(stepped.x == dead.x);
        CHECK(stepped.y == dead.y);
        CHECK(stepped.omega.vec() == dead.omega.vec());
    }

    TEST_CASE("deterministic CSDA path stops at the range")
    {
        const ModelParams m = no_scatter();
        const double h = 1e-3;
        ParticleState s = make_state({0.0, 2.0, 0.0}, Direction({1.0, 0.0, 0.0}, 2), 62.0);
        while (s.alive)
            s = full_step(s, NoiseDraw{0.0, 0.0, 0.0, 0.0, h}, h, Scheme::milstein_rkmk, m, Box{});
        // Explicit log-Euler loses energy too slowly; its depth bias is
        // (p/2) ln(E0/e_min) h, plus an overshoot of at most one step.
        const double bias = 0.5 * m.p * std::log(62.0 / m.e_min) * h;
        const double err = s.x.x - oracle::csda_range_62_emin4;
        CHECK(err >= bias - 0.1 * h);
        CHECK(err <= bias + 1.1 * h);
    }

    TEST_CASE("full paths keep positive energy and unit direction")
    {
        ModelParams m;
        m.kappa = 1e-3;
        m.eps0 = 0.05;
        double min_e = 1e300, max_dev = 0.0;
        for (int i = 0; i < 200; ++i)
        {
            PathRng rng(9, i);
            ParticleState s = make_state({0.0, 2.0, 0.0}, Direction({1.0, 0.0, 0.0}, 3), 62.0);
            while (s.alive)
            {
                s = full_step(s, draw_noise(rng, 0.01, 0.01, 3), 0.01, Scheme::milstein_rkmk, m, Box{});
                min_e = std::min(min_e, std::exp(s.y));
                max_dev = std::max(max_dev, std::abs(s.omega.norm() - 1.0));
            }
        }
        CHECK(min_e > 0.0);
        CHECK(max_dev <= 1e-12);
    }

    TEST_CASE("scheme names round-trip")
    {
        for (Scheme s : {Scheme::euler_naive, Scheme::euler_renorm, Scheme::geometric_euler,
                         Scheme::milstein_rkmk})
            CHECK(scheme_from_string(to_string(s)) == s);
        CHECK_THROWS(scheme_from_string("rk4"));
    }
}
