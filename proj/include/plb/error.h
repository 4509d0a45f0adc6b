#ifndef PLB_ERROR_H
#define PLB_ERROR_H

#include <stdexcept>
#include <string>

namespace plb {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

// Parse failure with the 1-based line it was detected on (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InsufficientPaths : public Error {
 public:
  using Error::Error;
};

class TrainingFailure : public Error {
 public:
  TrainingFailure(const std::string& what, int epoch)
      : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class SingularFit : public Error {
 public:
  using Error::Error;
};

// All traffic of a protected tunnel crosses one SRLG, so nothing survives.
class TotalFailure : public Error {
 public:
  using Error::Error;
};

class InvalidBaseline : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

}  // namespace plb

#endif  // PLB_ERROR_H
