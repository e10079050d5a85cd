#pragma once

#include <stdexcept>
#include <string>

namespace ipt {

// Invalid image geometry / channel count / color space for an operation.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameter value (even kernel, empty input, out-of-range id, ...).
class ParamError : public std::runtime_error {
 public:
  explicit ParamError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration or input file (manifests, scenarios, codebooks).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Pipeline failure at runtime (I/O, sockets, degenerate geometry).
class PipelineError : public std::runtime_error {
 public:
  explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ipt
