#pragma once

#include "psde/vec3.hpp"

namespace psde {

/*!
 * Direction of flight on S^1 (dim 2, z = 0) or S^2 (dim 3).
 *
 * The checked constructor enforces |v| = 1 to 1e-12. The naive Euler scheme
 * deliberately leaves the sphere, so it builds its result with unnormalized().
 */
class Direction
{
  public:
    static constexpr double unit_tol = 1e-12;

    Direction() = default;
    Direction(const Vec3& v, int dim);

    //! Normalise v before storing it.
    static Direction normalized(const Vec3& v, int dim);
    //! Store v as-is, without a norm check.
    static Direction unnormalized(const Vec3& v, int dim);

    const Vec3& vec() const { return v_; }
    int dim() const { return dim_; }
    double norm() const { return psde::norm(v_); }

  private:
    Vec3 v_{1.0, 0.0, 0.0};
    int dim_{2};
};

//! Orthonormal basis (u1, u2) of the tangent plane at a point of S^2.
struct TangentFrame
{
    Vec3 u1{0.0, 1.0, 0.0};
    Vec3 u2{0.0, 0.0, 1.0};
};

//! Polar frame: u1 = d/d(polar angle), u2 = d/d(azimuth), with a pole fallback.
TangentFrame frame_at(const Direction& omega);

//! Re-orthonormalise a carried frame against omega; u2 = omega x u1.
TangentFrame reorthonormalize(const TangentFrame& frame, const Direction& omega);

//! Rotate w about axis xi by angle |xi| (Rodrigues).
Vec3 rotate(const Vec3& w, const Vec3& xi);

//! Great-circle exponential map: tangent vector v at omega.
Direction geodesic_exp(const Direction& omega, const Vec3& v);

//! exp(xi^) omega for xi in so(3), written as an axis-angle vector.
Direction rotation_exp(const Direction& omega, const Vec3& xi);

//! Rotate a planar direction by angle theta.
Direction rotate_s1(const Direction& omega, double theta);

//! Component of eta orthogonal to omega.
Vec3 project_tangent(const Direction& omega, const Vec3& eta);

}  // namespace psde
