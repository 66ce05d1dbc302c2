#pragma once

#include "wgmfem/experiment.hpp"

#include <cstdint>

namespace wgmfem {

/// Largest relative error of the quadrature rules on monomials up to their order
/// (reference triangle, unit square fan, segments).
double quadrature_exactness_defect(int max_order = 10);

/// max over cells of ||div_w(Q_h v) - pi_h(div v)||_{0,K} for `samples` random polynomial
/// fields of degree k+1.
double commutativity_defect(const PolyMesh& mesh, int k, int samples, std::uint64_t seed);

/// max over interface-edge quadrature points of |explicit T^m p - p(foot)| for `count` random
/// polynomials of degree <= m <= max_m.  With disable_pullback the reference uses x_h instead of the foot.
double taylor_trick_deviation(const PolyMesh& mesh, const InterfaceCurve& curve, int max_m, int count,
                              std::uint64_t seed, bool disable_pullback = false);

/// max over cells and basis functions of |(f - Q_0 f, m_j)_K| for a trigonometric f.
double projection_orthogonality_defect(const PolyMesh& mesh, int degree);

/// Slope of log(max delta) against log(h) for circle meshes of [-1,1]^2 with the given cells per side.
double circle_fit_slope(const std::vector<int>& n_values, std::vector<double>* max_delta = nullptr);

/// Randomly moves vertices that are off the interface and off the boundary by up to `fraction` of the
/// local grid spacing; vertices closer than twice that to the curve are kept.
PolyMesh perturb_mesh(const PolyMesh& mesh, const InterfaceCurve& curve, std::uint64_t seed, double fraction = 0.1);

} // namespace wgmfem
