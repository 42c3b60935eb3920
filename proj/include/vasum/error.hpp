#pragma once

#include <stdexcept>
#include <string>

namespace vasum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset directory or record; carries the offending video id.
class DatasetError : public Error {
 public:
  DatasetError(std::string video_id, const std::string& what)
      : Error(video_id.empty() ? what : "video '" + video_id + "': " + what),
        video_id_(std::move(video_id)) {}
  const std::string& video_id() const noexcept { return video_id_; }

 private:
  std::string video_id_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

}  // namespace vasum
