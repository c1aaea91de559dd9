#pragma once

#include <vector>

#include "fqortho/formal.hpp"
#include "fqortho/geometry.hpp"
#include "fqortho/matrix.hpp"

namespace fqo {

// Images of the generators Q_1..Q_n and of the typed letters r_{j,iota}; a letter image with
// dim() == 0 is unassigned and may not occur in evaluated elements.
struct MatrixAssignment {
  MatrixTuple generators;
  std::vector<DenseMatrix> letters;
};

// Generators -> q, letters r_{j,iota} -> ((a - q)/q)_j^iota; a formal A_j = Q_j + sum r_{j,iota} Q_j maps to a_j.
MatrixAssignment assignment_from_decomposition(const MatrixTuple& a, const MatrixTuple& q);

// Clifford relations of the generators and r Q_h = (-1)^{iota_h} Q_h r for each assigned letter.
void check_assignment(const MatrixAssignment& as, double tol = 1e-8);

DenseMatrix eval_into_matrices(const FormalElement& e, const MatrixAssignment& as, double tol = 1e-8);
MatrixTuple eval_into_matrices(const Tuple<FormalElement>& e, const MatrixAssignment& as, double tol = 1e-8);

}  // namespace fqo
