#pragma once

#include <stdexcept>
#include <string>

namespace shelter {

// Base for every error raised by the engine. The CLI maps subclasses to
// exit codes; the HTTP service maps them to status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class UnimputableSpeeds : public Error {
 public:
  using Error::Error;
};

class Unsnappable : public Error {
 public:
  Unsnappable(std::string point_id, double nearest_m)
      : Error("point '" + point_id + "' cannot be snapped: nearest node is " +
              std::to_string(nearest_m) + " m away"),
        point_id_(std::move(point_id)),
        nearest_m_(nearest_m) {}

  const std::string& point_id() const { return point_id_; }
  double nearest_m() const { return nearest_m_; }

 private:
  std::string point_id_;
  double nearest_m_;
};

class Infeasible : public Error {
 public:
  Infeasible(std::string zone, double shortfall)
      : Error("infeasible placement" + (zone.empty() ? std::string() : " for zone '" + zone + "'") +
              ": shortfall of " + std::to_string(static_cast<long long>(shortfall)) + " persons"),
        zone_(std::move(zone)),
        shortfall_(shortfall) {}

  const std::string& zone() const { return zone_; }
  double shortfall() const { return shortfall_; }

 private:
  std::string zone_;
  double shortfall_;
};

class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Wraps a module error with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace shelter
