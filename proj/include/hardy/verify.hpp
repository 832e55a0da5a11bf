#ifndef HARDY_VERIFY_HPP
#define HARDY_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hardy/fields.hpp"
#include "hardy/potentials.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {

/// Which potential multiplies |u|^p in the denominator.
enum class PotentialTag {
  Full,             // the full n-pole potential (two-pole simplification if n = 2)
  LeadingOnly,      // C1 times the leading part
  HyperbolicLower,  // curvature-bound replacement (hyperbolic model)
  SphereLower       // hemisphere replacement
};
const char* potential_tag_name(PotentialTag tag);

struct RayleighReport {
  QuadratureEstimate numerator;    // I = int |grad u|^p dv
  QuadratureEstimate denominator;  // J = int V_choice |u|^p dv
  /// Cross term K = int |v|^{p-2} G12/(d1 d2) |u|^p dv (LeadingOnly, n = 2).
  std::optional<QuadratureEstimate> cross_term;
  double ratio = 0.0;
  double margin_std_error = 0.0;  // std error of I - J over the shared samples
  PotentialTag tag = PotentialTag::Full;
  HardyParams params{};
};

/// I and J (and K for the LeadingOnly tag) over shared sample sets.
RayleighReport rayleigh(const ModelManifold& m, const PoleSet& poles,
                        const HardyParams& params, const ScalarField& u,
                        PotentialTag tag, const QuadConfig& cfg);

struct InequalityCheck {
  int field_id = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  double margin = 0.0;  // I - J
  double margin_std_error = 0.0;
  bool pass = false;  // margin >= -3 margin_std_error
};

std::vector<InequalityCheck> check_inequality(const ModelManifold& m, const PoleSet& poles,
                                              const HardyParams& params,
                                              const std::vector<ScalarField>& fields,
                                              PotentialTag tag, const QuadConfig& cfg);

struct EqualityReport {
  QuadratureEstimate numerator;
  QuadratureEstimate denominator;
  double gap = 0.0;        // |I - J| / J
  double tolerance = 0.0;  // max(0.02, 5 * combined relative std error)
  bool pass = false;
  bool tail_truncated = false;
};

/// Quadrature check that the closed-form extremal turns the inequality into
/// an equality; 2 < p < N, Euclidean or hyperbolic model.
EqualityReport minimizer_equality(const ModelManifold& m, const Point& a1, const Point& a2,
                                  const HardyParams& params, const QuadConfig& cfg);

struct SweepRow {
  double eps = 0.0;
  double numerator = 0.0;    // I
  double denominator = 0.0;  // J
  double cross = 0.0;        // K
  double ratio = 0.0;        // I / (J - 2K)
  double se_numerator = 0.0, se_denominator = 0.0, se_cross = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double target = 0.0;  // C1(2, p)
  bool ratio_decreasing = false;
  bool gap_halved = false;            // final ratio gap <= 0.5 * initial gap
  bool cross_term_shrinking = false;  // |K| strictly decreasing
  bool denominator_growing = false;   // J strictly increasing
  bool all() const {
    return ratio_decreasing && gap_halved && cross_term_shrinking && denominator_growing;
  }
};

/// Annular test-function sweep: the ratio I/(J - 2K) decreases toward C1(2,p)
/// as eps shrinks.
SweepResult sharpness_sweep(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params, const std::vector<double>& eps_list,
                            const QuadConfig& cfg);

struct GroupStats {
  std::string name;
  double min = 0.0;
  double frac_negative = 0.0;
  long samples = 0;
};

/// Pointwise sign statistics of the potential's summand groups over seeded
/// sample points (two-pole decomposition when n = 2).
std::vector<GroupStats> positivity_audit(const ModelManifold& m, const PoleSet& poles,
                                         const HardyParams& params, long sample_count,
                                         std::uint64_t seed);

struct ResidualReport {
  int field_id = 0;
  QuadratureEstimate lhs;  // int |grad phi|^{p-2} g(grad phi, grad u) dv
  QuadratureEstimate rhs;  // int V phi^{p-1} u dv
  double residual = 0.0;   // |lhs - rhs| / |rhs|
  double tolerance = 0.0;
  bool pass = false;
};

/// Weak-form witness that the power-product field solves -Lap_p phi = V phi^{p-1}
/// distributionally, tested against nonnegative fields.
std::vector<ResidualReport> weak_supersolution_residual(const ModelManifold& m,
                                                        const PoleSet& poles,
                                                        const HardyParams& params,
                                                        const std::vector<ScalarField>& fields,
                                                        const QuadConfig& cfg);

}  // namespace hardy

#endif
