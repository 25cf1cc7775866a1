#ifndef DDM_ERRORS_HPP
#define DDM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad headers, truncated payloads,
/// corrupt partial files, invalid argument combinations).
class InputError : public Error {
public:
    using Error::Error;
};

/// Planning failed: the memory budget cannot accommodate the job.
class PlanError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (missing path, unwritable directory, short write).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ddm

#endif
