#include "psde/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psde {

Direction::Direction(const Vec3& v, int dim) : v_(v), dim_(dim)
{
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("Direction: dim must be 2 or 3");
    if (dim == 2 && v.z != 0.0)
        throw std::invalid_argument("Direction: planar direction needs z = 0");
    if (std::abs(psde::norm(v) - 1.0) > unit_tol)
        throw std::invalid_argument("Direction: vector is not unit length");
}

Direction Direction::normalized(const Vec3& v, int dim)
{
    Vec3 w = v;
    if (dim == 2)
        w.z = 0.0;
    const double n = psde::norm(w);
    if (!(n > 0))
        throw std::invalid_argument("Direction: cannot normalise zero vector");
    return Direction((1.0 / n) * w, dim);
}

Direction Direction::unnormalized(const Vec3& v, int dim)
{
    Direction d;
    d.v_ = v;
    d.dim_ = dim;
    return d;
}

TangentFrame frame_at(const Direction& omega)
{
    if (omega.dim() != 3)
        throw std::invalid_argument("frame_at: tangent frames are for S^2 only");
    const Vec3& w = omega.vec();
    const double rho = std::sqrt(w.x * w.x + w.y * w.y);
    TangentFrame f;
    if (std::abs(w.z) > 1.0 - 1e-9)
    {
        const Vec3 seed{w.z >= 0 ? 1.0 : -1.0, 0.0, 0.0};
        Vec3 u1 = seed - dot(seed, w) * w;
        f.u1 = (1.0 / norm(u1)) * u1;
        f.u2 = cross(w, f.u1);
        return f;
    }
    f.u1 = {w.z * w.x / rho, w.z * w.y / rho, -rho};
    f.u2 = {-w.y / rho, w.x / rho, 0.0};
    return f;
}

TangentFrame reorthonormalize(const TangentFrame& frame, const Direction& omega)
{
    const Vec3& w = omega.vec();
    Vec3 u1 = frame.u1 - dot(frame.u1, w) * w;
    const double n = norm(u1);
    if (!(n > 1e-8))
        return frame_at(omega);
    TangentFrame f;
    f.u1 = (1.0 / n) * u1;
    f.u2 = cross(w, f.u1);
    return f;
}

Vec3 rotate(const Vec3& w, const Vec3& xi)
{
    const double angle = norm(xi);
    if (angle < 1e-300)
        return w;
    const Vec3 k = (1.0 / angle) * xi;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return c * w + s * cross(k, w) + (1.0 - c) * dot(k, w) * k;
}

Direction geodesic_exp(const Direction& omega, const Vec3& v)
{
    if (std::abs(dot(v, omega.vec())) > 1e-10 * std::max(1.0, norm(v)))
        throw std::invalid_argument("geodesic_exp: v is not tangent to omega");
    const double n = norm(v);
    if (n == 0.0)
        return omega;
    double c, sinc;
    if (n < 1e-8)
    {
        c = 1.0 - 0.5 * n * n;
        sinc = 1.0 - n * n / 6.0;
    }
    else
    {
        c = std::cos(n);
        sinc = std::sin(n) / n;
    }
    return Direction::normalized(c * omega.vec() + sinc * v, omega.dim());
}

Direction rotation_exp(const Direction& omega, const Vec3& xi)
{
    return Direction::normalized(rotate(omega.vec(), xi), omega.dim());
}

Direction rotate_s1(const Direction& omega, double theta)
{
    if (omega.dim() != 2)
        throw std::invalid_argument("rotate_s1: planar directions only");
    const Vec3& w = omega.vec();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Direction::normalized({c * w.x - s * w.y, s * w.x + c * w.y, 0.0}, 2);
}

Vec3 project_tangent(const Direction& omega, const Vec3& eta)
{
    const Vec3& w = omega.vec();
    return eta - dot(eta, w) * w;
}

}  // namespace psde
