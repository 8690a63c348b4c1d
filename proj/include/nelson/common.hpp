#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nelson {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can map it onto an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define NELSON_DEFINE_ERROR(Name)              \
    struct Name : Error {                      \
        using Error::Error;                    \
    }

NELSON_DEFINE_ERROR(DomainError);
NELSON_DEFINE_ERROR(DivergentIntegral);
NELSON_DEFINE_ERROR(CutoffRequired);
NELSON_DEFINE_ERROR(IndexError);
NELSON_DEFINE_ERROR(WeightNotAllowed);
NELSON_DEFINE_ERROR(GridTailError);
NELSON_DEFINE_ERROR(RegimeError);
NELSON_DEFINE_ERROR(NormalizationError);
NELSON_DEFINE_ERROR(MomentError);
NELSON_DEFINE_ERROR(UnsupportedOrder);
NELSON_DEFINE_ERROR(VarianceBlowup);
NELSON_DEFINE_ERROR(ConfigError);

#undef NELSON_DEFINE_ERROR

}  // namespace nelson
