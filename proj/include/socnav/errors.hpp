#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace socnav {

// Base for every error raised by the library. The CLI maps subclasses to
// stable exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two parties share a position, so the inverse-square field is undefined.
class DegenerateDistanceError : public Error {
 public:
  explicit DegenerateDistanceError(std::size_t person_index)
      : Error("degenerate distance: agent coincides with person " +
              std::to_string(person_index)),
        person_index_(person_index) {}

  std::size_t person_index() const { return person_index_; }

 private:
  std::size_t person_index_;
};

class InvalidBoundsError : public Error {
 public:
  using Error::Error;
};

// Tensor or vector shapes disagree (network input, checkpoint architecture).
class DimensionError : public Error {
 public:
  using Error::Error;
};

class CheckpointFormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradient or loss during training. dump_path() is empty unless
// the caller persisted the offending batch.
class TrainingDivergenceError : public Error {
 public:
  explicit TrainingDivergenceError(const std::string& what,
                                   std::string dump = {})
      : Error(what), dump_(std::move(dump)) {}

  const std::string& dump() const { return dump_; }

 private:
  std::string dump_;
};

class InvalidScenarioError : public Error {
 public:
  InvalidScenarioError(const std::string& scenario_id, const std::string& why)
      : Error("invalid scenario '" + scenario_id + "': " + why),
        scenario_id_(scenario_id) {}

  const std::string& scenario_id() const { return scenario_id_; }

 private:
  std::string scenario_id_;
};

// Structural problem in a scenario file; names the field that failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& why)
      : Error("parse error at '" + field + "': " + why), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class EpisodeFinishedError : public Error {
 public:
  EpisodeFinishedError() : Error("step() called on a finished episode") {}
};

}  // namespace socnav
