#pragma once

#include <stdexcept>
#include <string>

namespace tourmon {

// Base for all toolkit errors. CLI maps ValidationError/ConfigError to
// exit code 2, everything else to 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConversionError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Network failure that survived all retries; carries the attempt count.
class FetchFailedError : public Error {
 public:
  FetchFailedError(const std::string& msg, int attempts)
      : Error(msg), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// Request refused by crawl policy (robots.txt); no request was sent.
class PolicyRefusedError : public Error {
 public:
  using Error::Error;
};

}  // namespace tourmon
