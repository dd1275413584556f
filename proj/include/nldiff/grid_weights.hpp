#pragma once

#include <Eigen/Core>

#include "nldiff/kernels.hpp"

namespace nldiff
{
    /// Uniform lattice x_j = j h, -M <= j <= M, over the weight window [-L_W, L_W] with L_W = 2L.
    struct Grid
    {
        double L = 0.0;
        int M = 0;
        double h = 0.0;
        double L_W = 0.0;

        double node(int j) const { return j * h; }
    };

    /// Requires L > 0 and M >= 4 even.
    Grid build_grid(double L, int M);

    /// Quadrature weights w_{-M..M} with their sum c1 and the far-field tail mass A.
    struct WeightSet
    {
        Eigen::VectorXd values; // values[j + M] = w_j
        double c1 = 0.0;
        double A = 0.0;
        int M = 0;

        double operator[](int j) const { return values[j + M]; }
    };

    /// int_{h <= |y| <= L_W} T(y - x_j) nu(y) dy for 1 <= |j| <= M, T the hat of half-width h.
    double hat_tail_integral(const Kernel &kernel, const Grid &grid, int j);

    /// w_0 = 0, w_{+-1} = f1(h) + hat integral, w_j = hat integral otherwise.
    WeightSet compute_weights(const Kernel &kernel, const Grid &grid);
} // namespace nldiff
