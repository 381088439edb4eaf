#pragma once

#include <stdexcept>
#include <string>

namespace bubbles {

// Base class for every failure raised by the library. Callers that only care
// about "something went wrong" catch this; the CLI maps it to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroLengthError : public Error {
 public:
  explicit ZeroLengthError(const std::string& what) : Error(what) {}
};

class CollinearError : public Error {
 public:
  explicit CollinearError(const std::string& what) : Error(what) {}
};

class InsufficientSamplesError : public Error {
 public:
  explicit InsufficientSamplesError(const std::string& what) : Error(what) {}
};

class InvalidScaleError : public Error {
 public:
  explicit InvalidScaleError(const std::string& what) : Error(what) {}
};

class MissingRegionError : public Error {
 public:
  explicit MissingRegionError(const std::string& what) : Error(what) {}
};

// Raised by mesh surgery (collapse_edge, pop_vertex).
class SurgeryError : public Error {
 public:
  explicit SurgeryError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

class SingularGramError : public Error {
 public:
  explicit SingularGramError(const std::string& what) : Error(what) {}
};

class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(const std::string& what) : Error(what) {}
};

class IncomparableRunsError : public Error {
 public:
  explicit IncomparableRunsError(const std::string& what) : Error(what) {}
};

}  // namespace bubbles
