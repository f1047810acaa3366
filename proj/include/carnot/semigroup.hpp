#pragma once

#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"
#include "carnot/heat_kernel.hpp"

namespace carnot {

struct HorizontalVectorField {
  std::vector<GridFunction> components;
  // nodes where the field is defined (grid stencils need a margin)
  std::vector<char> defined;
  // trapezoid mass of |f| on excluded nodes
  double excluded_mass = 0.0;

  int size() const { return static_cast<int>(components.size()); }
  double norm_at(std::size_t k) const;
};

// W_t f = f * h_t.
GridFunction apply_heat(const GridFunction& f, double t, const KernelEngine& engine,
                        const ConvolutionOptions& opt = {});

// (X_1 f, ..., X_q f) by 4th-order centred differences at nodes two or more
// cells away from the box boundary.
HorizontalVectorField horizontal_gradient(const GridFunction& f, const GroupSpec& spec);
// Exact gradient of an analytic field sampled on a grid.
HorizontalVectorField horizontal_gradient(const ScalarField& f, const GridSpec& grid,
                                          const GroupSpec& spec);

double l1_norm(const HorizontalVectorField& v);
double l1_norm(const GridFunction& f);

struct ShiftL1 {
  double value = 0.0;
  // |f| mass at nodes whose shifted point left the box
  double tail = 0.0;
};

// (1/t) int |f(x o D(t) z) - f(x)| dx.
ShiftL1 group_shift_l1(const GridFunction& f, const GroupPoint& z, double t, const GroupSpec& spec);
ShiftL1 group_shift_l1(const ScalarField& f, const GridSpec& grid, const GroupPoint& z, double t,
                       const GroupSpec& spec);

}  // namespace carnot
