#pragma once

#include <stdexcept>
#include <string>

namespace udn
{

/// Base class for all errors raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain.
class InvalidParameter : public Error
{
  public:
    using Error::Error;
};

/// A UE cannot be associated because there is no access node.
class NoServerError : public Error
{
  public:
    using Error::Error;
};

/// A Monte Carlo run could not produce a valid trial.
class SimulationFailure : public Error
{
  public:
    using Error::Error;
};

/// Planner bracket does not straddle the target, or the objective was
/// observed to be non-monotone beyond Monte Carlo slack.
class BracketError : public Error
{
  public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error
{
  public:
    using Error::Error;
};

/// A guaranteed-rate target is not reached anywhere on a policy curve.
class UnachievableTarget : public Error
{
  public:
    UnachievableTarget(std::string const& policy, double target)
        : Error("target rate " + std::to_string(target)
                + " bps/Hz is not reached by policy '" + policy
                + "' on the evaluated tau grid")
        , policy_(policy)
    {
    }

    std::string const& policy() const noexcept { return policy_; }

  private:
    std::string policy_;
};

}  // namespace udn
