#pragma once

#include <stdexcept>
#include <string>

namespace sbqcp {

// Every failure raised by the library derives from Error so callers can
// catch the family at once; the concrete type carries the contract meaning.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NonConvergedQuadrature : public Error {
public:
    using Error::Error;
};

class NonConverged : public Error {
public:
    using Error::Error;
};

class NoSolution : public Error {
public:
    using Error::Error;
};

class NoTransition : public Error {
public:
    using Error::Error;
};

class SingularDenominator : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

class NonConvergedEigensolver : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sbqcp
