#include "stratoctl/fp_numeric.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "stratoctl/error.hpp"

namespace stratoctl {
namespace {

constexpr int kMinCells = 200;
constexpr double kMinTailLambdas = 8.0;
constexpr double kTailWarnRatio = 1e-8;

// One level of the automaton on the node range [lo, hi]; the nodes just
// outside are either absorbing (density pinned to 0) or behind a reflecting
// face.
struct Level {
  int lo = 0;
  int hi = 0;
  double velocity = 0.0;
  bool absorb_lo = false;
  bool absorb_hi = false;
  int offset = 0;
};

struct Term {
  int col = -1;
  double coef = 0.0;
};

// Flux through the face between nodes k and k+1 as at most two terms.
struct FaceFlux {
  Term left;
  Term right;
};

class Assembler {
 public:
  Assembler(double dx, double diffusion, bool mirrored, int unknowns)
      : dx_(dx), diffusion_(diffusion), mirrored_(mirrored), unknowns_(unknowns) {}

  int column(const Level& lv, int node) const {
    const int natural = lv.offset + (node - lv.lo);
    return mirrored_ ? unknowns_ - 1 - natural : natural;
  }

  FaceFlux face(const Level& lv, int k) const {
    const double v_pos = std::max(lv.velocity, 0.0);
    const double v_neg = std::min(lv.velocity, 0.0);
    const double diff = diffusion_ / dx_;
    FaceFlux f;
    const bool left_inside = k >= lv.lo && k <= lv.hi;
    const bool right_inside = k + 1 >= lv.lo && k + 1 <= lv.hi;
    if (!left_inside && !lv.absorb_lo) return f;
    if (!right_inside && !lv.absorb_hi) return f;
    if (left_inside) f.left = Term{column(lv, k), v_pos + diff};
    if (right_inside) f.right = Term{column(lv, k + 1), v_neg - diff};
    return f;
  }

  void add(int row, const FaceFlux& f, double sign) {
    if (f.left.col >= 0) triplets_.emplace_back(row, f.left.col, sign * f.left.coef);
    if (f.right.col >= 0) triplets_.emplace_back(row, f.right.col, sign * f.right.coef);
  }

  // Finite-volume balance F(k-1/2) - F(k+1/2) = 0 on every node of the level.
  void add_level(const Level& lv) {
    for (int j = lv.lo; j <= lv.hi; ++j) {
      const int row = column(lv, j);
      add(row, face(lv, j - 1), +1.0);
      add(row, face(lv, j), -1.0);
    }
  }

  std::vector<Eigen::Triplet<double>>& triplets() { return triplets_; }

 private:
  double dx_;
  double diffusion_;
  bool mirrored_;
  int unknowns_;
  std::vector<Eigen::Triplet<double>> triplets_;
};

double evaluate(const FaceFlux& f, const Eigen::VectorXd& p) {
  double v = 0.0;
  if (f.left.col >= 0) v += f.left.coef * p[f.left.col];
  if (f.right.col >= 0) v += f.right.coef * p[f.right.col];
  return v;
}

int trigger_cells(const GridSpec& grid, double d) {
  return static_cast<int>(std::lround(d * grid.nx / grid.x_max));
}

}  // namespace

GridSpec make_grid(const FlowParams& flow, const TlcParams& params, int nx, double tail_lambdas) {
  const double lambda = efold_lambda(flow, params.h);
  const double span = params.d + tail_lambdas * lambda;
  const int m = std::max(1, static_cast<int>(std::lround(nx * params.d / span)));
  const double dx = params.d / m;
  return GridSpec{dx * nx, nx};
}

void validate_grid(const GridSpec& grid, const FlowParams& flow, const TlcParams& params) {
  if (grid.nx < kMinCells) {
    throw InvalidArgument("grid.nx must be >= " + std::to_string(kMinCells) + ", got " +
                          std::to_string(grid.nx));
  }
  const double lambda = efold_lambda(flow, params.h);
  const double need = params.d + kMinTailLambdas * lambda;
  if (grid.x_max < need * (1.0 - 1e-12)) {
    throw InvalidArgument("grid.x_max = " + std::to_string(grid.x_max) +
                          " truncates the tail; need >= d + 8*lambda = " + std::to_string(need));
  }
  const double ratio = params.d * grid.nx / grid.x_max;
  if (std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1) {
    throw InvalidArgument("grid must place a node on x = d (d/dx = " + std::to_string(ratio) + ")");
  }
}

double DiscretePdfField::total_mass() const {
  double s = 0.0;
  for (double p : marginal) s += p;
  return s * dx;
}

double DiscretePdfField::variance() const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * x[i] * marginal[i];
  return s * dx;
}

double DiscretePdfField::flux_imbalance() const {
  const double out = flux_zero_to_plus + flux_zero_to_minus;
  const double in = flux_plus_to_zero + flux_minus_to_zero;
  return std::fabs(in - out) / std::max(std::fabs(in), std::fabs(out));
}

DiscretePdfField solve_steady_fp(const FlowParams& flow, const TlcParams& params,
                                 const GridSpec& grid, const FpSolveOptions& options) {
  flow.validate();
  params.validate();
  validate_grid(grid, flow, params);

  const int nx = grid.nx;
  const int m = trigger_cells(grid, params.d);
  const double dx = grid.x_max / nx;
  const double drift = flow.alpha * params.h;

  // Unknown order: level -h, level 0, level +h, each left to right.
  Level minus{-nx, -1, +drift, false, true, 0};
  Level zero{-m + 1, m - 1, 0.0, true, true, nx};
  Level plus{1, nx, -drift, true, false, nx + (2 * m - 1)};
  const int unknowns = plus.offset + nx;

  Assembler as(dx, 0.5 * flow.c2, options.mirrored, unknowns);
  as.add_level(minus);
  as.add_level(zero);
  as.add_level(plus);

  // Transfers between levels: absorbed face flux becomes a node source.
  const FaceFlux zero_right = as.face(zero, m - 1);  // into node +d, positive rightward
  const FaceFlux zero_left = as.face(zero, -m);     // into node -d, negative leftward
  const FaceFlux plus_home = as.face(plus, 0);      // into node 0 from +h, negative
  const FaceFlux minus_home = as.face(minus, -1);   // into node 0 from -h, positive
  as.add(as.column(plus, m), zero_right, +1.0);
  as.add(as.column(minus, -m), zero_left, -1.0);
  as.add(as.column(zero, 0), plus_home, -1.0);
  as.add(as.column(zero, 0), minus_home, +1.0);

  // Rows sum to zero; swap the first equation for the normalization.
  auto& trips = as.triplets();
  trips.erase(std::remove_if(trips.begin(), trips.end(),
                             [](const Eigen::Triplet<double>& t) { return t.row() == 0; }),
              trips.end());
  for (int c = 0; c < unknowns; ++c) trips.emplace_back(0, c, dx);

  Eigen::SparseMatrix<double> A(unknowns, unknowns);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  rhs[0] = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw SingularSystemError("Fokker-Planck system is singular: " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd p = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !p.allFinite()) {
    throw SingularSystemError("Fokker-Planck solve failed");
  }

  DiscretePdfField out;
  out.dx = dx;
  const std::size_t nodes = static_cast<std::size_t>(2 * nx + 1);
  out.x.resize(nodes);
  out.minus.assign(nodes, 0.0);
  out.zero.assign(nodes, 0.0);
  out.plus.assign(nodes, 0.0);
  out.marginal.assign(nodes, 0.0);
  for (int j = -nx; j <= nx; ++j) out.x[j + nx] = j * dx;
  for (int j = minus.lo; j <= minus.hi; ++j) out.minus[j + nx] = p[as.column(minus, j)];
  for (int j = zero.lo; j <= zero.hi; ++j) out.zero[j + nx] = p[as.column(zero, j)];
  for (int j = plus.lo; j <= plus.hi; ++j) out.plus[j + nx] = p[as.column(plus, j)];
  for (std::size_t i = 0; i < nodes; ++i) {
    out.marginal[i] = out.minus[i] + out.zero[i] + out.plus[i];
  }

  out.flux_zero_to_plus = evaluate(zero_right, p);
  out.flux_zero_to_minus = -evaluate(zero_left, p);
  out.flux_plus_to_zero = -evaluate(plus_home, p);
  out.flux_minus_to_zero = evaluate(minus_home, p);

  const double peak = *std::max_element(out.marginal.begin(), out.marginal.end());
  const double edge = std::max(out.marginal.front(), out.marginal.back());
  if (edge > kTailWarnRatio * peak) {
    out.tail_warning = true;
    out.warning = "density at x_max is " + std::to_string(edge / peak) +
                  " of its peak; widen the grid";
  }
  return out;
}

FpErrorRow compare_with_analytic(const DiscretePdfField& field, const FlowParams& flow,
                                 const TlcParams& params) {
  const TlcPdf pdf = pdf_coefficients(params.d, efold_lambda(flow, params.h));
  double peak = 0.0;
  FpErrorRow row;
  for (std::size_t i = 0; i < field.x.size(); ++i) {
    const double x = field.x[i];
    peak = std::max(peak, pdf_eval(pdf, x, Branch::Marginal));
    row.err_minus = std::max(row.err_minus, std::fabs(field.minus[i] - pdf_eval(pdf, x, Branch::Minus)));
    row.err_zero = std::max(row.err_zero, std::fabs(field.zero[i] - pdf_eval(pdf, x, Branch::Zero)));
    row.err_plus = std::max(row.err_plus, std::fabs(field.plus[i] - pdf_eval(pdf, x, Branch::Plus)));
  }
  row.err_minus /= peak;
  row.err_zero /= peak;
  row.err_plus /= peak;
  row.err_all = std::max({row.err_minus, row.err_zero, row.err_plus});
  row.nx = static_cast<int>((field.x.size() - 1) / 2);
  row.dx = field.dx;
  row.variance = field.variance();
  return row;
}

std::vector<FpErrorRow> convergence_study(const FlowParams& flow, const TlcParams& params,
                                          const std::vector<int>& nx_list, double tail_lambdas) {
  if (!std::is_sorted(nx_list.begin(), nx_list.end()) ||
      std::adjacent_find(nx_list.begin(), nx_list.end()) != nx_list.end()) {
    throw InvalidArgument("convergence_study: nx_list must be strictly increasing");
  }
  std::vector<FpErrorRow> rows;
  for (int nx : nx_list) {
    const GridSpec grid = make_grid(flow, params, nx, tail_lambdas);
    rows.push_back(compare_with_analytic(solve_steady_fp(flow, params, grid), flow, params));
  }
  return rows;
}

}  // namespace stratoctl
