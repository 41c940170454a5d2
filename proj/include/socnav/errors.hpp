#pragma once

#include <stdexcept>
#include <string>

namespace socnav {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class OutOfBoundsError : public Error { using Error::Error; };
class EmptyPathError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class NoClustersError : public Error { using Error::Error; };
class ClockRegressionError : public Error { using Error::Error; };
class IllegalTransitionError : public Error { using Error::Error; };
class TerminalStateError : public Error { using Error::Error; };

}  // namespace socnav
