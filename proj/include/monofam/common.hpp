#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace monofam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default tolerances; every check takes an explicit override.
struct Tolerances {
  double exact_identity = 1e-12;   // algebraic identities at float level
  double quadrature = 1e-9;        // quadrature-exact inequalities
};

enum class Status { Pass, Fail, HypothesisViolated, Divergent };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::HypothesisViolated: return "hypothesis-violated";
    case Status::Divergent: return "divergent";
  }
  return "?";
}

inline std::optional<Status> status_from_string(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "hypothesis-violated") return Status::HypothesisViolated;
  if (s == "divergent") return Status::Divergent;
  return std::nullopt;
}

struct Witness {
  std::vector<int> indices;
  std::string note;
};

/// Outcome of one theorem-derived property check.
/// Invariants: status==Pass implies worst_residual <= the declared tolerance;
/// status==Fail implies a witness is present.
struct VerificationReport {
  std::string property_name;
  Status status = Status::Pass;
  double worst_residual = 0.0;
  std::optional<Witness> witness;
  double runtime_ms = 0.0;                 // console only, never serialized
  std::map<std::string, double> metrics;   // named diagnostic values
};

inline VerificationReport make_report(std::string name) {
  VerificationReport r;
  r.property_name = std::move(name);
  return r;
}

/// Thrown when a requested tolerance is below what the grid can deliver.
struct ResolutionError : std::runtime_error {
  double achievable;
  ResolutionError(const std::string& what, double achievable_bound)
      : std::runtime_error(what), achievable(achievable_bound) {}
};

using Rng = std::mt19937_64;

inline Vector random_gaussian(int dim, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace monofam
