#pragma once

#include <stdexcept>
#include <string>

namespace econ
{

/// Root of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-domain parameters, contract violations, unsatisfiable requests.
/// The CLI maps these to exit code 1.
class InputError : public Error
{
public:
  using Error::Error;
};

/// Failure of a numerical procedure on otherwise valid input. CLI exit code 2.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class ParameterError : public InputError
{
public:
  using InputError::InputError;
};

class ContractError : public InputError
{
public:
  using InputError::InputError;
};

class ResourceLimitError : public InputError
{
public:
  using InputError::InputError;
};

class NotFoundError : public InputError
{
public:
  using InputError::InputError;
};

class NoRootError : public InputError
{
public:
  using InputError::InputError;
};

class ConfigurationError : public InputError
{
public:
  using InputError::InputError;
};

class OverflowError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// A lattice difference quotient of ln(Omega) was zero or undefined.
class DegenerateDifferenceError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

namespace detail
{
inline void require(bool ok, const std::string& what)
{
  if (!ok) throw ParameterError(what);
}
}

}
