#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlcontrol/control_opt.hpp"
#include "qlcontrol/relaxed_opt.hpp"

namespace qlc {

/// Named building blocks of a control instance. Every built-in instance is
/// one of these with fixed values; configs start from a built-in and
/// override fields.
struct InstanceSpec {
  std::string name = "custom";
  std::string regime = "quasilinear";  ///< variational | monotone | quasilinear
  int dimension = 1;
  int cells = 32;

  // quasilinear lower-order term a
  std::string lower = "sin";  ///< none | sin | clamped | cosine-wells
  double kappa = 1.0;
  double omega = 1.0;
  std::optional<double> zero_order;  ///< b; default max(1, L^2/2)

  // monotone flux A = a0 y + g(y)
  std::string flux = "perturbed-sin";  ///< identity | perturbed-sin
  double a0 = 1.0;
  double lg = 0.5;

  // variational energy W and coupling w(y) u
  std::string energy = "half-square";  ///< half-square | clamped-quartic | nonconvex-u
  double radius = 10.0;
  double delta = 0.1;
  double source_value = 0.0;  ///< constant f of the variational energy

  std::string source = "identity";  ///< identity | tanh | clamp
  double source_scale = 1.0;

  std::string cost = "tracking";  ///< tracking | negative-capped | zero
  double cap = 1e6;
  std::string target = "zero";    ///< zero | constant | bump | helmholtz-one
  double target_value = 0.0;

  std::string regularizer = "gradient";  ///< gradient | l2
  double tychonov = 1e-3;

  int state_atoms = 4;
  int control_atoms = 4;
  std::string description;

  bool operator==(const InstanceSpec &) const = default;
};

struct Instance {
  InstanceSpec spec;
  ControlProblem problem;
  /// m - m_bar margin derived at construction for designed instances.
  std::optional<double> designed_gap;
  std::vector<std::string> warnings;

  bool relaxable() const { return problem.regime() == Regime::Quasilinear; }
  RelaxedProblem relaxed() const;
};

/// Builds the instance; throws HypothesisError when the structural
/// conditions fail (for instance b <= L^2/4) and std::invalid_argument for
/// unknown names.
Instance build_instance(const InstanceSpec &spec, bool check = true);

std::vector<std::string> builtin_names();
/// Throws std::invalid_argument for unknown names.
InstanceSpec builtin_spec(const std::string &name);

/// Derived margin of the cosine-well family: E(u = 1) minus the relaxed
/// value with all state atoms in the wells of a, where abar = 0.
double cosine_well_gap(const ControlProblem &cp);

struct CatalogRow {
  std::string name;
  std::string regime;
  int dimension = 1;
  int cells = 0;
  double lipschitz = 0.0;
  double monotonicity = 0.0;
  double growth = 0.0;
  double zero_order = 0.0;
  double threshold = 0.0;
  double tychonov = 0.0;
  std::optional<double> designed_gap;
  std::string description;
};

/// Rows for every built-in whose name contains `filter` (all when empty).
std::vector<CatalogRow> list_builtin(const std::string &filter = {});
std::string format_catalog(const std::vector<CatalogRow> &rows);

}  // namespace qlc
