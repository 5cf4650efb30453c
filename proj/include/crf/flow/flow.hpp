#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crf/core/types.hpp"
#include "crf/flow/grid.hpp"
#include "crf/flow/kernels.hpp"
#include "crf/geometry/metric.hpp"

namespace crf::flow {

/// First loss of positivity. Carries the offending node, point and time.
class FlowBreakdown : public Error {
 public:
  FlowBreakdown(const std::string& what, std::size_t node, Point point, double time)
      : Error(what), node(node), point(std::move(point)), time(time) {}
  std::size_t node;
  Point point;
  double time;
};

enum class BoundaryKind { Periodic, Dirichlet, Extrapolate };
std::string to_string(BoundaryKind k);
BoundaryKind boundary_kind_from_string(const std::string& s);

/// Prescribed metric on boundary nodes as a function of (point, time) and its time derivative.
struct BoundaryData {
  std::function<CMat(const Point&, double)> value;
  std::function<CMat(const Point&, double)> rate;
  std::string description;
  explicit operator bool() const { return static_cast<bool>(value); }
};

/// Einstein data Ric(g0) = c g0 flows by homothety g(t) = (1 - c t) g0.
BoundaryData homothety_boundary(geom::MetricPtr g0, double c);
/// Normalized flow of a(0) g0 with Ric(g0) = c g0: a(s) = -c + (a0 + c) e^{-s}.
BoundaryData normalized_homothety_boundary(geom::MetricPtr g0, double c, double a0);

/// Per-frame monitors. Fields that do not apply are NaN.
struct FrameDiag {
  double time = 0.0;
  long step = 0;
  double sup_lambda = 0.0;   ///< sup tr_g h (needs h samples)
  double inf_tR = 0.0;       ///< min t R, or min of the normalized scalar curvature
  double ke_residual = 0.0;  ///< sup |Ric + g|_g for normalized runs
  double min_eig = 0.0;
  double phi_prime_min = 0.0;
  double phi_prime_max = 0.0;
};

enum class FlowForm { Metric, Potential };
std::string to_string(FlowForm f);
FlowForm flow_form_from_string(const std::string& s);

/// Discretized Chern-Ricci flow. omega = omega0 - t ric0 + i ddbar psi on interior nodes.
struct FlowState {
  std::shared_ptr<const Grid> grid;
  int n = 1;
  double t = 0.0;
  MatrixField omega0;
  MatrixField ric0;
  ScalarField det0;
  ScalarField psi;
  MatrixField omega;
  long step_count = 0;
  std::deque<FrameDiag> ring;
  std::size_t ring_capacity = 64;
  BoundaryKind boundary_kind = BoundaryKind::Periodic;
  BoundaryData boundary;
  std::vector<Point> points;
};

/// Samples g0 and its Chern-Ricci form (log-det route, closed form) on the grid.
FlowState make_flow_state(std::shared_ptr<const Grid> grid, const geom::MetricProvider& g0,
                          BoundaryKind kind, BoundaryData boundary = {});
/// Same from raw samples; ric0 must be Ric(omega0).
FlowState make_flow_state(std::shared_ptr<const Grid> grid, MatrixField omega0, MatrixField ric0,
                          BoundaryKind kind, BoundaryData boundary = {});

/// Largest admissible explicit step: safety * h^2 * min eig(g) / max(1, max |eig(g^{-1} Ric)|).
double cfl_bound(const FlowState& state, double safety = 0.2);
double cfl_bound(const Grid& grid, const MatrixField& g, const MatrixField& ric, double safety);

/// One RK4 step of d_t g = -Ric(g). Also advances psi through d_t psi = log(det g / det g0).
/// Throws PreconditionError when dt exceeds cfl_bound(state, safety), FlowBreakdown on
/// positivity loss.
void flow_step_metric(FlowState& state, double dt, Exec exec = Exec::Parallel, double safety = 0.2);
/// One RK4 step of d_t psi = log((omega0 - t ric0 + i ddbar psi)^n / omega0^n); omega is rebuilt.
void flow_step_potential(FlowState& state, double dt, Exec exec = Exec::Parallel,
                         double safety = 0.2);

/// Max over interior nodes of |omega - (omega0 - t ric0 + i ddbar psi)|.
double reconstruction_defect(const FlowState& state);

/// Normalized flow d_s g~ = -Ric(g~) - g~ with phi~' = log(det g~ / det g~(0)) - phi~.
/// Ricci forms are taken relative to a reference metric (the analytic g0).
struct NormalizedFlowState {
  std::shared_ptr<const Grid> grid;
  int n = 1;
  double s = 0.0;
  MatrixField ref;
  MatrixField ric_ref;
  ScalarField det_ref;
  MatrixField g_tilde0;
  MatrixField ric_tilde0;
  ScalarField log_det0;  ///< log(det g~(0) / det ref)
  MatrixField g_tilde;
  ScalarField phi;
  ScalarField phi_prime;
  double ke_residual = 0.0;
  long step_count = 0;
  std::deque<FrameDiag> ring;
  std::size_t ring_capacity = 64;
  BoundaryKind boundary_kind = BoundaryKind::Periodic;
  BoundaryData boundary;
  std::vector<Point> points;
};

/// Starts the normalized flow at s = 0 from the current metric of an unnormalized state
/// (g~(0) = g(t), normally t = 1); phi~ = 0.
NormalizedFlowState start_normalized(const FlowState& state, BoundaryData boundary = {});

void normalized_step(NormalizedFlowState& state, double dt, Exec exec = Exec::Parallel,
                     double safety = 0.2);
double cfl_bound(const NormalizedFlowState& state, double safety = 0.2);
/// Max over interior nodes of |g~ - (e^{-s} g~(0) - (1 - e^{-s}) Ric(g~(0)) + i ddbar phi~)|.
double normalized_identity_defect(const NormalizedFlowState& state);

/// One stored frame. time is t (unnormalized) or s (normalized).
struct Frame {
  double time = 0.0;
  MatrixField metric;
  ScalarField potential;       ///< psi or phi~
  ScalarField potential_rate;  ///< d psi / dt or phi~'
};

/// Completed run archive, consumed read-only by the estimate checks.
struct FlowRun {
  bool normalized = false;
  std::shared_ptr<const Grid> grid;
  int n = 1;
  MatrixField ref;
  MatrixField ric_ref;
  ScalarField det_ref;
  std::vector<Frame> frames;
  std::vector<FrameDiag> diags;
  bool breakdown = false;
  std::string breakdown_message;
  Point breakdown_point;
  double breakdown_time = 0.0;
  long steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  std::string boundary_description;
};

struct RunConfig {
  double horizon = 1.0;         ///< final t or s
  double frame_interval = 0.1;  ///< spacing of stored frames
  double dt = 0.0;              ///< 0: use the CFL bound
  double safety = 0.2;
  Exec exec = Exec::Parallel;
  FlowForm form = FlowForm::Metric;
  bool store_frames = true;
  /// A collapsing stability bound (blow-up) ends the run as a breakdown once this is exceeded.
  long max_steps = 5'000'000;
};

/// Advances to the horizon with substeps that land exactly on frame times. On breakdown the
/// partial archive is returned with breakdown set; nothing is thrown.
FlowRun run_flow(FlowState& state, const RunConfig& cfg, const MatrixField* h = nullptr);
FlowRun run_normalized(NormalizedFlowState& state, const RunConfig& cfg,
                       const MatrixField* h = nullptr);

/// Normalizes an unnormalized run archive at s: g~ = e^{-s} g(e^s) and
/// phi~(s) = e^{-s} int_0^s e^u log(det g~(u) / det g~(0)) du (trapezoid over stored frames).
/// Requires frames at t = 1 and t = e^s.
struct NormalizedSample {
  double s = 0.0;
  MatrixField g_tilde;
  ScalarField phi;
};
NormalizedSample normalize(const FlowRun& run, double s);

/// Samples a provider on the grid nodes.
MatrixField sample_metric(const Grid& grid, const geom::MetricProvider& g);

/// Metric jet at a node from finite differences of a grid field (order 2 or 4, falling back
/// to 2 near edges). Radial grids read components as U(1)-invariant functions of r.
geom::MetricJet grid_metric_jet(const Grid& grid, const MatrixField& g, std::size_t node,
                                int order = 4);

/// Monitors for the current metric (interior nodes only).
FrameDiag diagnose(const Grid& grid, const MatrixField& g, const MatrixField& ric, double time,
                   bool normalized, const MatrixField* h, Exec exec);

/// U(1)-invariant n = 1 profile g = lambda(r) |dz|^2 on [0, r_max].
/// Ricci forms are measured against an optional reference with known Ricci form
/// (default: the flat metric, lambda_ref = 1, ric_ref = 0).
struct RadialProfile {
  int n = 1;
  std::vector<double> r;
  std::vector<double> lambda;
  double t = 0.0;
  BoundaryKind boundary = BoundaryKind::Extrapolate;
  std::function<double(double r, double t)> outer_value;  ///< Dirichlet data
  std::function<double(double r, double t)> outer_rate;
  std::vector<double> lambda_ref;
  std::vector<double> ric_ref;
};

RadialProfile radial_profile(const geom::MetricProvider& g0, int nodes, double r_max);
/// One RK4 step of d_t lambda = d dbar log lambda in the radial variable.
void radial_flow_step(RadialProfile& profile, double dt, Exec exec = Exec::Parallel);

}  // namespace crf::flow
