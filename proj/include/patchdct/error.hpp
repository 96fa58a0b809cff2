#ifndef PATCHDCT_ERROR_HPP
#define PATCHDCT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace patchdct {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PATCHDCT_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

PATCHDCT_DEFINE_ERROR(DimensionMismatch)
PATCHDCT_DEFINE_ERROR(InconsistentLayout)
PATCHDCT_DEFINE_ERROR(ShapeMismatch)
PATCHDCT_DEFINE_ERROR(RangeError)
PATCHDCT_DEFINE_ERROR(DegenerateInput)
PATCHDCT_DEFINE_ERROR(LengthMismatch)
PATCHDCT_DEFINE_ERROR(BudgetExhausted)
PATCHDCT_DEFINE_ERROR(DirectionFailure)
PATCHDCT_DEFINE_ERROR(InitializationFailure)
PATCHDCT_DEFINE_ERROR(ImageTooSmall)
PATCHDCT_DEFINE_ERROR(ConfigError)
PATCHDCT_DEFINE_ERROR(IoError)

// Transport-level failures of a remote oracle. Kept apart from BudgetExhausted.
PATCHDCT_DEFINE_ERROR(OracleError)
class ConnectionError : public OracleError {
 public:
  using OracleError::OracleError;
};
class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};
class ServerError : public OracleError {
 public:
  ServerError(int status, const std::string& what)
      : OracleError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

#undef PATCHDCT_DEFINE_ERROR

}  // namespace patchdct

#endif  // PATCHDCT_ERROR_HPP
