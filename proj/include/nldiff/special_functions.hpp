#pragma once

namespace nldiff
{
    /// Generalized exponential integral E_p(x) = int_1^inf z^{-p} e^{-xz} dz for p > 0, x > 0.
    /// Power series (with the pole at integer p resolved analytically) for x <= 1,
    /// modified Lentz continued fraction above.
    double exp_int(double p, double x);

    /// e^x E_p(x); stays representable where E_p itself underflows.
    double exp_int_scaled(double p, double x);

    /// t - atan(t), accurate for small |t|.
    double t_minus_atan(double t);
} // namespace nldiff
