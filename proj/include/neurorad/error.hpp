#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace neurorad {

/// Base of every error thrown by the library. The CLI maps any of these to a
/// nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AliasingError : public Error {
 public:
  AliasingError(double doppler_hz, double nyquist_hz)
      : Error("trajectory Doppler " + std::to_string(doppler_hz) +
              " Hz exceeds Nyquist " + std::to_string(nyquist_hz) + " Hz"),
        doppler_hz_(doppler_hz) {}
  double doppler_hz() const noexcept { return doppler_hz_; }

 private:
  double doppler_hz_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(std::size_t sample_index)
      : Error("non-finite sample at index " + std::to_string(sample_index)),
        sample_index_(sample_index) {}
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

/// Malformed binary input. `offset` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class SizeError : public Error {
 public:
  SizeError(std::size_t bytes, std::size_t budget)
      : Error("serialized model is " + std::to_string(bytes) +
              " bytes, budget " + std::to_string(budget)),
        bytes_(bytes) {}
  std::size_t bytes() const noexcept { return bytes_; }

 private:
  std::size_t bytes_;
};

class QuantizationQualityError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(int epoch)
      : Error("training diverged (non-finite loss) at epoch " +
              std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(what + ": " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace neurorad
