#pragma once

#include <stdexcept>
#include <string>

namespace ktp {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KTP_DEFINE_ERROR(Name)              \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

KTP_DEFINE_ERROR(OutOfTransparencyWindow);
KTP_DEFINE_ERROR(NonPositiveIdler);
KTP_DEFINE_ERROR(InvalidConfig);
KTP_DEFINE_ERROR(EmptyRange);
KTP_DEFINE_ERROR(DomainTooNarrow);
KTP_DEFINE_ERROR(CrystalTooShort);
KTP_DEFINE_ERROR(ZeroPhaseMismatch);
KTP_DEFINE_ERROR(InvalidOrderList);
KTP_DEFINE_ERROR(DutyOutOfRange);
KTP_DEFINE_ERROR(PeakOnBoundary);
KTP_DEFINE_ERROR(WindowExceedsGrid);
KTP_DEFINE_ERROR(NoInteriorMaximum);
KTP_DEFINE_ERROR(ZeroSpectrum);

#undef KTP_DEFINE_ERROR

}  // namespace ktp
