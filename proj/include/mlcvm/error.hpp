#pragma once

#include <stdexcept>
#include <string>

namespace mlcvm {

// Base of every error the toolkit raises on bad input or configuration.
// Anything else escaping to the CLI is treated as an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class AlignmentError : public Error { using Error::Error; };
class SamplingError : public Error { using Error::Error; };
class CompositionError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class UpdateError : public Error { using Error::Error; };
class ResumeError : public Error { using Error::Error; };
class RepresentationError : public Error { using Error::Error; };
class DegenerateTaskError : public Error { using Error::Error; };

}  // namespace mlcvm
