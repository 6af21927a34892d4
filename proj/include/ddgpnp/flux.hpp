#pragma once

#include "ddgpnp/field.hpp"

namespace ddgpnp {

struct FluxParams {
  double beta0 = 4.0;
  double beta1 = 1.0 / 6.0;

  bool operator==(const FluxParams&) const = default;
};

/// DDG diffusive flux for the normal derivative at a face:
/// beta0 [w]/h + {d_n w} + beta1 h [d_n^2 w].
inline double ddg_flux(const FaceTrace& t, const FluxParams& p) {
  return p.beta0 * t.jump() / t.h + t.average_dn() + p.beta1 * t.h * t.jump_dnn();
}

/// Positivity range for the transport flux: 1/8 <= beta1 <= 1/4 and beta0 >= 1.
inline bool transport_params_admissible(const FluxParams& p) {
  return p.beta1 >= 0.125 - 1e-15 && p.beta1 <= 0.25 + 1e-15 && p.beta0 >= 1.0;
}

}  // namespace ddgpnp
