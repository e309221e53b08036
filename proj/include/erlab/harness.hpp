// Einstein-retardation test harness.
//
// A moving observable obeys Einstein retardation when F_v(t) = F_0(t / gamma).
// Every dispersion curve here has the form sigma^2 + C t^2, so writing the
// moving curve as the rest curve at t / gamma^alpha gives
//
//   alpha = ln(C_rest / C_moving) / (2 ln gamma),
//
// and retardation holds when alpha is 1. The harness fits alpha per axis and
// per method and compares the methods against each other.

#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "erlab/model.hpp"
#include "erlab/moments.hpp"
#include "erlab/oracle.hpp"
#include "erlab/propagator.hpp"

namespace erlab {

/// The rest frame (gamma == 1) has no exponent to fit.
class DegenerateFrameError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDefaultVerdictTolerance = 0.05;
inline constexpr double kQuadraticResidualLimit = 1e-6;

/// Momenta are magnitudes along +z; the rest curve (p = 0) is always computed
/// for each method whether or not 0 is listed.
struct SweepConfig {
  double mass = 1.0;
  double width = 5.0;
  std::vector<double> momenta{1.7320508075688772};
  std::vector<double> times{0.0, 5.0, 10.0, 20.0};
  std::vector<Method> methods{Method::analytic};
  OracleOptions oracle{};
  GridOptions grid{};
  double verdict_tolerance = kDefaultVerdictTolerance;
};

void validate(const SweepConfig& config);

struct CurveSample {
  double t;
  double sigma_sq;
};

struct SpreadingFit {
  double offset;       // sigma^2(0)
  double coefficient;  // C in sigma^2(0) + C t^2
  double residual;     // RMS misfit relative to the largest growth
};

/// Least squares of sigma^2(t) - sigma^2(0) against t^2. Needs a t = 0 sample
/// and at least three distinct nonzero |t|.
SpreadingFit fit_spreading(std::span<const CurveSample> curve);

struct ExponentFit {
  double alpha;
  double residual;
  bool quadratic;  // residual <= kQuadraticResidualLimit
  double moving_coefficient;
};

/// Throws DegenerateFrameError unless gamma > 1.
ExponentFit fit_retardation_exponent(std::span<const CurveSample> moving_curve,
                                     double rest_coefficient, double gamma);

enum class Verdict { holds, fails, degenerate };

/// holds iff |alpha - 1| <= tolerance.
Verdict er_verdict(double alpha, double tolerance = kDefaultVerdictTolerance);

enum class ReportAxis { longitudinal, transverse_1, transverse_2 };

std::string_view to_string(Verdict v);
std::string_view to_string(ReportAxis a);
/// Lab index of a report axis for momenta along +z.
std::size_t lab_index(ReportAxis a);

struct ReportRow {
  double m;
  double sigma;
  double p;
  double gamma;
  ReportAxis axis;
  Method method;
  double t;
  double sigma_sq;
  double alpha_fit;  // NaN for the rest frame
  double residual;
  Verdict verdict;
};

struct AxisResult {
  double p;
  double gamma;
  ReportAxis axis;
  Method method;
  double alpha;
  double residual;
  bool quadratic;
  Verdict verdict;
};

struct MethodDelta {
  Method reference;
  Method candidate;
  int dimension;
  double max_relative_delta;  // over momenta, axes and times
};

struct MomentumPoint {
  double p;
  double gamma;
  ValidityVerdict validity;
};

struct RetardationReport {
  SweepConfig config;
  std::vector<MomentumPoint> points;
  std::vector<ReportRow> rows;       // listed momenta
  std::vector<ReportRow> rest_rows;  // p = 0 reference curves per method
  std::vector<AxisResult> exponents;
  std::vector<MethodDelta> deltas;
  std::vector<std::string> failures;

  const AxisResult* find(double p, ReportAxis axis, Method method) const;
};

/// Runs every requested method for every momentum. Per-point failures are
/// collected in `failures` and do not abort the sweep.
RetardationReport compare_methods(const SweepConfig& config);

/// Header: m,sigma,p,gamma,axis,method,t,sigma_sq,alpha_fit,residual,verdict
void write_report_csv(std::ostream& out, const RetardationReport& report);
nlohmann::json report_to_json(const RetardationReport& report);
nlohmann::json config_to_json(const SweepConfig& config);

/// Writes `<tag>_<axis>_<method>.dat` (t sigma^2 blocks, one per momentum),
/// `<tag>_rest_<method>.dat` and `<tag>-alpha_<axis>_<method>.dat` (gamma alpha)
/// into `dir`. Returns the files written; an empty report writes nothing.
std::vector<std::filesystem::path> emit_plotdata(const RetardationReport& report,
                                                 const std::filesystem::path& dir,
                                                 const std::string& tag);

}  // namespace erlab
