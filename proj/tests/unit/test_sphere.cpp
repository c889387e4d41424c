#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "psde/sphere.hpp"

using namespace psde;

namespace {

constexpr double pi = std::numbers::pi;

Vec3 random_unit(std::mt19937_64& gen)
{
    std::normal_distribution<double> n;
    Vec3 v{n(gen), n(gen), n(gen)};
    return (1.0 / norm(v)) * v;
}

void check_frame(const TangentFrame& f, const Direction& omega)
{
    const Vec3& w = omega.vec();
    CHECK(std::abs(dot(f.u1, w)) < 1e-12);
    CHECK(std::abs(dot(f.u2, w)) < 1e-12);
    CHECK(std::abs(dot(f.u1, f.u2)) < 1e-12);
    CHECK(norm(cross(f.u1, f.u2) - w) < 1e-12);
}

}  // namespace

TEST_SUITE("sphere")
{
    TEST_CASE("direction construction enforces unit norm")
    {
        CHECK_NOTHROW(Direction({1.0, 0.0, 0.0}, 3));
        CHECK_THROWS_AS(Direction({1.1, 0.0, 0.0}, 3), std::invalid_argument);
        CHECK_THROWS_AS(Direction({0.0, 0.0, 1.0}, 2), std::invalid_argument);
        CHECK_THROWS_AS(Direction({1.0, 0.0, 0.0}, 4), std::invalid_argument);
        const Direction d = Direction::normalized({3.0, 4.0, 0.0}, 2);
        CHECK(std::abs(d.norm() - 1.0) < 1e-15);
        CHECK(Direction::unnormalized({3.0, 4.0, 0.0}, 2).norm() == doctest::Approx(5.0));
    }

    TEST_CASE("polar frame at the equator")
    {
        const Direction w({1.0, 0.0, 0.0}, 3);
        const TangentFrame f = frame_at(w);
        CHECK(distance(f.u1, {0.0, 0.0, -1.0}) < 1e-15);
        CHECK(distance(f.u2, {0.0, 1.0, 0.0}) < 1e-15);
        check_frame(f, w);
    }

    TEST_CASE("pole fallback keeps orientation")
    {
        for (double z : {1.0, -1.0})
        {
            const Direction w({0.0, 0.0, z}, 3);
            check_frame(frame_at(w), w);
        }
        const Direction near = Direction::normalized({1e-10, 0.0, 1.0}, 3);
        check_frame(frame_at(near), near);
        CHECK_THROWS(frame_at(Direction({1.0, 0.0, 0.0}, 2)));
    }

    TEST_CASE("frame invariants and continuity on random directions")
    {
        std::mt19937_64 gen(7);
        for (int k = 0; k < 1000; ++k)
        {
            const Direction w(random_unit(gen), 3);
            const TangentFrame f = frame_at(w);
            check_frame(f, w);
            if (std::abs(w.vec().z) < 0.99)
            {
                const Direction w2 = Direction::normalized(w.vec() + Vec3{1e-8, -1e-8, 1e-8}, 3);
                const TangentFrame g = frame_at(w2);
                CHECK(distance(f.u1, g.u1) <= 1e-6);
                CHECK(distance(f.u2, g.u2) <= 1e-6);
            }
        }
    }

    TEST_CASE("reorthonormalize restores a perturbed frame")
    {
        const Direction w = Direction::normalized({0.3, -0.5, 0.8}, 3);
        TangentFrame f = frame_at(w);
        f.u1 += Vec3{1e-6, 2e-6, 0.0};
        const TangentFrame g = reorthonormalize(f, w);
        check_frame(g, w);
        CHECK(distance(g.u1, frame_at(w).u1) < 1e-5);
    }

    TEST_CASE("geodesic exponential")
    {
        const Direction w({1.0, 0.0, 0.0}, 3);
        CHECK(geodesic_exp(w, {0.0, 0.0, 0.0}).vec() == w.vec());
        CHECK(distance(geodesic_exp(w, {0.0, pi / 2, 0.0}).vec(), {0.0, 1.0, 0.0}) < 1e-15);
        CHECK_THROWS(geodesic_exp(w, {0.1, 0.2, 0.0}));
        const Direction tiny = geodesic_exp(w, {0.0, 1e-10, 0.0});
        CHECK(std::abs(tiny.vec().y - 1e-10) < 1e-20);

        std::mt19937_64 gen(11);
        std::normal_distribution<double> n;
        for (int k = 0; k < 1000; ++k)
        {
            const Direction o(random_unit(gen), 3);
            const Vec3 v = project_tangent(o, {n(gen), n(gen), n(gen)});
            const Direction r = geodesic_exp(o, v);
            CHECK(std::abs(r.norm() - 1.0) < 1e-12);
            // Rotation about the axis Omega x v by |v| is the same great circle.
            CHECK(distance(rotation_exp(o, cross(o.vec(), v)).vec(), r.vec()) < 1e-10);
        }
    }

    TEST_CASE("rotation exponential")
    {
        const Direction w({1.0, 0.0, 0.0}, 3);
        CHECK(rotation_exp(w, {0.0, 0.0, 0.0}).vec() == w.vec());
        CHECK(distance(rotation_exp(w, {0.0, 0.0, pi / 2}).vec(), {0.0, 1.0, 0.0}) < 1e-15);
        CHECK(distance(rotation_exp(w, {0.7, 0.0, 0.0}).vec(), w.vec()) < 1e-15);
        std::mt19937_64 gen(3);
        std::normal_distribution<double> n;
        for (int k = 0; k < 1000; ++k)
        {
            const Direction o(random_unit(gen), 3);
            const Vec3 xi{2 * n(gen), 2 * n(gen), 2 * n(gen)};
            CHECK(std::abs(rotation_exp(o, xi).norm() - 1.0) < 1e-12);
        }
        CHECK(distance(rotate({1.0, 0.0, 0.0}, {0.0, 0.0, pi}), {-1.0, 0.0, 0.0}) < 1e-15);
    }

    TEST_CASE("circle rotation")
    {
        const Direction w({1.0, 0.0, 0.0}, 2);
        CHECK(rotate_s1(w, 0.0).vec() == w.vec());
        CHECK(distance(rotate_s1(w, pi).vec(), {-1.0, 0.0, 0.0}) < 1e-15);
        const Direction a = rotate_s1(rotate_s1(w, 0.4), 1.3);
        CHECK(distance(a.vec(), rotate_s1(w, 1.7).vec()) < 1e-12);
        CHECK(std::abs(rotate_s1(w, 123.4).norm() - 1.0) < 1e-15);
        CHECK_THROWS(rotate_s1(Direction({1.0, 0.0, 0.0}, 3), 0.1));
    }

    TEST_CASE("tangent projection")
    {
        const Direction w = Direction::normalized({1.0, 2.0, -2.0}, 3);
        CHECK(norm(project_tangent(w, w.vec())) < 1e-15);
        const Vec3 t = frame_at(w).u1;
        CHECK(distance(project_tangent(w, t), t) < 1e-15);
        const Vec3 eta{0.3, -1.0, 4.0};
        const Vec3 p1 = project_tangent(w, eta);
        CHECK(std::abs(dot(p1, w.vec())) < 1e-12);
        CHECK(distance(project_tangent(w, p1), p1) < 1e-12);
    }
}
