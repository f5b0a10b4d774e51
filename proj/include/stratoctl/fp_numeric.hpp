#pragma once

// Finite-volume solution of the stationary three-level Fokker-Planck system,
// used as an independent check of the closed-form densities.
//
// Unknowns live on the nodes x_j = j*dx, j = -nx..nx. Each level is a 1-D
// advection-diffusion problem (drift -alpha*level*h, diffusion c2/2) with
// upwinded advective fluxes and central diffusive fluxes on the faces. The
// probability absorbed at an automaton threshold is re-injected, face flux for
// face flux, into the level the automaton switches to:
//
//   level 0  absorbed at +d  ->  source at node +d of level +h
//   level 0  absorbed at -d  ->  source at node -d of level -h
//   level +-h absorbed at 0  ->  source at node 0 of level 0
//
// The far field at +-x_max is reflecting, so the assembled operator conserves
// mass exactly and has a one-dimensional null space; one equation is replaced
// by the normalization sum(p)*dx = 1.

#include <string>
#include <vector>

#include "stratoctl/tlc_analytic.hpp"
#include "stratoctl/units.hpp"

namespace stratoctl {

struct GridSpec {
  double x_max = 0.0;  // half-width of the domain [m]
  int nx = 0;          // cells per side; dx = x_max/nx
};

// Grid with nx cells per side, a node on +-d, and x_max close to
// d + tail_lambdas*lambda.
GridSpec make_grid(const FlowParams& flow, const TlcParams& params, int nx,
                   double tail_lambdas = 10.0);

// Throws InvalidArgument unless nx >= 200, x_max >= d + 8*lambda and d/dx
// is an integer.
void validate_grid(const GridSpec& grid, const FlowParams& flow, const TlcParams& params);

struct DiscretePdfField {
  double dx = 0.0;
  std::vector<double> x;      // node positions, size 2*nx+1
  std::vector<double> minus;  // level -h [1/m]
  std::vector<double> zero;   // level 0
  std::vector<double> plus;   // level +h
  std::vector<double> marginal;

  // Probability flux carried between levels (per unit time).
  double flux_zero_to_plus = 0.0;
  double flux_zero_to_minus = 0.0;
  double flux_plus_to_zero = 0.0;
  double flux_minus_to_zero = 0.0;

  bool tail_warning = false;
  std::string warning;

  double total_mass() const;
  double variance() const;
  // |inflow - outflow| of level 0 relative to the throughput.
  double flux_imbalance() const;
};

struct FpSolveOptions {
  // Assemble the mirror-image problem (x -> -x, +h <-> -h) and map the
  // result back; used to check the symmetry of the discretization.
  bool mirrored = false;
};

DiscretePdfField solve_steady_fp(const FlowParams& flow, const TlcParams& params,
                                 const GridSpec& grid, const FpSolveOptions& options = {});

struct FpErrorRow {
  int nx = 0;
  double dx = 0.0;
  // L-infinity errors at the nodes, relative to max of the analytic marginal.
  double err_all = 0.0;
  double err_minus = 0.0;
  double err_zero = 0.0;
  double err_plus = 0.0;
  double variance = 0.0;
};

FpErrorRow compare_with_analytic(const DiscretePdfField& field, const FlowParams& flow,
                                 const TlcParams& params);

// Solves at each grid size (nx increasing) and reports errors against the
// closed form.
std::vector<FpErrorRow> convergence_study(const FlowParams& flow, const TlcParams& params,
                                          const std::vector<int>& nx_list,
                                          double tail_lambdas = 10.0);

}  // namespace stratoctl
