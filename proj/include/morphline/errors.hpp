#pragma once

#include <stdexcept>
#include <string>

namespace morphline {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// geometry
class DegenerateConfiguration : public Error { public: using Error::Error; };
class TopologyMismatch : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };

// scoring
class InvalidThreshold : public Error { public: using Error::Error; };
class NoFaceFound : public Error { public: using Error::Error; };

class AdapterFailure : public Error {
public:
    explicit AdapterFailure(const std::string& what, int exit_code = 0)
        : Error(what), exit_code_(exit_code) {}

    /// Process exit status, 0 when the failure was not an exit code (timeout, bad JSON, ...).
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// ga_engine
class EmptyPool : public Error { public: using Error::Error; };
class InvalidConfig : public Error { public: using Error::Error; };

// asymmetry
class DegenerateRoi : public Error { public: using Error::Error; };

// dataset_io
class MissingLandmarks : public Error { public: using Error::Error; };
class DecodeFailure : public Error { public: using Error::Error; };
class IoFailure : public Error { public: using Error::Error; };

}  // namespace morphline
