#pragma once

#include <vector>

#include "homobl/bl.hpp"

namespace homobl::detail {

/// Fills sol.t, sol.F, decay_ratio and the decay fit from per-row tangential
/// energies (|tangential derivative|^2 integrated along a row) and per-face
/// energies (|d_t V|^2 between rows j and j+1). sol.a, sol.height and sol.dz
/// must be set.
void finish_decay(BLSolution& sol, const std::vector<double>& row_energy, const std::vector<double>& face_energy);

/// Mean of the last row, per component.
std::vector<double> top_mean(const BLSolution& sol);

}  // namespace homobl::detail
