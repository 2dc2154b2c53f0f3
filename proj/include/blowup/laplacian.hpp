#pragma once

#include <vector>

#include "blowup/domain.hpp"
#include "blowup/error.hpp"

namespace blowup {

/// Second-order finite-difference Laplacian. Dirichlet boundary nodes get 0
/// (they are held fixed); Neumann ends use a mirrored ghost node.
inline void laplacian_apply(const std::vector<double>& u, const Domain& domain, std::vector<double>& out)
{
    const std::size_t N = domain.size();
    require(u.size() == N, ErrorCode::InvalidArgument, "grid function size does not match domain");
    out.resize(N);
    const double h = domain.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const bool dirichlet = domain.boundary() == Boundary::DirichletZero;

    if (!domain.radial()) {
        for (std::size_t i = 1; i + 1 < N; ++i)
            out[i] = ((u[i - 1] + u[i + 1]) - 2.0 * u[i]) * inv_h2;
        out[0] = dirichlet ? 0.0 : 2.0 * (u[1] - u[0]) * inv_h2;
        out[N - 1] = dirichlet ? 0.0 : 2.0 * (u[N - 2] - u[N - 1]) * inv_h2;
        return;
    }

    const double nm1 = static_cast<double>(domain.dimension() - 1);
    const double inv_2h = 1.0 / (2.0 * h);
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double r = domain.coordinate(i);
        const double urr = ((u[i - 1] + u[i + 1]) - 2.0 * u[i]) * inv_h2;
        const double ur = (u[i + 1] - u[i - 1]) * inv_2h;
        out[i] = urr + nm1 / r * ur;
    }
    // Mirrored ghost at a Neumann end gives u_r = 0, leaving only u_rr.
    if (domain.has_origin())
        out[0] = 2.0 * domain.dimension() * (u[1] - u[0]) * inv_h2;
    else
        out[0] = dirichlet ? 0.0 : 2.0 * (u[1] - u[0]) * inv_h2;
    out[N - 1] = dirichlet ? 0.0 : 2.0 * (u[N - 2] - u[N - 1]) * inv_h2;
}

inline std::vector<double> laplacian_apply(const std::vector<double>& u, const Domain& domain)
{
    std::vector<double> out;
    laplacian_apply(u, domain, out);
    return out;
}

} // namespace blowup
