#pragma once

#include <vector>

#include <Eigen/Core>

namespace scanplan {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns the column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace scanplan
