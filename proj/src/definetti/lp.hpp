#ifndef DEFINETTI_LP_HPP
#define DEFINETTI_LP_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "config.hpp"

namespace definetti {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense linear program in modeling form.
///
/// Rows of `ge_A` are interpreted as ge_A * x >= ge_b. Variable bounds are
/// optional; size-0 vectors mean "all free". Individual entries may be
/// +-infinity.
struct LinearProgram {
  enum class Sense { Min, Max };

  std::string name;
  Sense sense = Sense::Min;
  Vec objective;

  Mat eq_A;
  Vec eq_b;
  Mat ge_A;
  Vec ge_b;

  Vec lb;
  Vec ub;

  int num_vars() const { return static_cast<int>(objective.size()); }
  void check_shapes() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Numerical };

const char* solve_status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Numerical;
  Vec x;
  double objective = 0.0;
  Vec dual_eq;           // one multiplier per eq row
  Vec dual_ge;           // one multiplier per ge row, >= 0 at optimality
  double residual_eq = 0.0;
  double residual_ge = 0.0;
  double gap = 0.0;      // primal-dual gap of the solved form
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Pluggable solve boundary. The bundled backend is a dense two-phase revised
/// simplex with Dantzig pricing and a Bland fallback for anti-cycling.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual Solution solve(const LinearProgram& lp, const Config& cfg) const = 0;
  virtual std::string name() const = 0;
};

/// Adapter backend speaking the documented JSON forms; `transport` receives a
/// LinearProgram JSON string and must return a Solution JSON string.
class JsonAdapterBackend : public LpBackend {
 public:
  using Transport = std::function<std::string(const std::string&)>;
  JsonAdapterBackend(std::string name, Transport transport)
      : name_(std::move(name)), transport_(std::move(transport)) {}

  Solution solve(const LinearProgram& lp, const Config& cfg) const override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  Transport transport_;
};

void register_backend(const std::string& name, std::shared_ptr<LpBackend> backend);

/// Solves `lp` with the backend selected by cfg.backend ("bundled" unless a
/// registered adapter overrides it). Throws Error(SolverFailure) when the
/// backend reports Numerical; Infeasible and Unbounded are returned in-band.
Solution solve(const LinearProgram& lp, const Config& cfg = Config());

/// Like solve() but requires an Optimal outcome.
Solution solve_optimal(const LinearProgram& lp, const Config& cfg = Config());

// Documented JSON wire forms for the backend boundary.
std::string lp_to_json(const LinearProgram& lp);
LinearProgram lp_from_json(const std::string& text);
std::string solution_to_json(const Solution& s);
Solution solution_from_json(const std::string& text);

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace definetti

#endif
