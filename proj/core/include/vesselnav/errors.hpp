#pragma once

#include <stdexcept>
#include <string>

namespace vesselnav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration produced NaN/Inf; usually the time step is too large.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Distance error below the numerical guard; the orientation error is undefined.
class DegenerateDistance : public Error {
 public:
  using Error::Error;
};

/// A normalized error left (-1, 1).
class FunnelViolation : public Error {
 public:
  FunnelViolation(std::string channel, double time, double xi)
      : Error("funnel violation on channel '" + channel + "' at t=" +
              std::to_string(time) + " (xi=" + std::to_string(xi) + ")"),
        channel_(std::move(channel)),
        time_(time),
        xi_(xi) {}

  const std::string& channel() const noexcept { return channel_; }
  double time() const noexcept { return time_; }
  double xi() const noexcept { return xi_; }

 private:
  std::string channel_;
  double time_;
  double xi_;
};

class InitialComplianceError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class PlanTimeout : public Error {
 public:
  using Error::Error;
};

class StartOrGoalInCollision : public Error {
 public:
  using Error::Error;
};

class InfeasibleSeed : public Error {
 public:
  InfeasibleSeed(int segment, int obstacle)
      : Error("initial hull of segment " + std::to_string(segment) +
              " intersects obstacle " + std::to_string(obstacle)),
        segment_(segment),
        obstacle_(obstacle) {}

  int segment() const noexcept { return segment_; }
  int obstacle() const noexcept { return obstacle_; }

 private:
  int segment_;
  int obstacle_;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace vesselnav
