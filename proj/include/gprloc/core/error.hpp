#pragma once

#include <stdexcept>
#include <string>

namespace gprloc {

// Exit-code contract for the CLI: input/config problems map to 2,
// numerical failures to 3. Library code throws, tools translate.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

struct ConfigError : InputError {
  using InputError::InputError;
};

struct NumericalError : Error {
  using Error::Error;
};

}  // namespace gprloc
