#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ggm/errors.hpp"

namespace ggm {

/// Column-centered observation matrix with its Gram matrix cached.
/// Construction is the single centering point of the library: downstream
/// likelihood code assumes zero column means.
struct DataMatrix {
    Eigen::MatrixXd values;  // n x p, column means removed
    Eigen::MatrixXd gram;    // values' * values
    int n = 0;
    int p = 0;
    bool centered = true;
    int dropped_rows = 0;  // rows discarded at ingestion (missing cells)

    DataMatrix() = default;

    explicit DataMatrix(Eigen::MatrixXd raw, int dropped = 0) {
        if (raw.rows() < 2) throw DomainError("data matrix needs at least 2 rows");
        if (raw.cols() < 1) throw DomainError("data matrix needs at least 1 column");
        n = static_cast<int>(raw.rows());
        p = static_cast<int>(raw.cols());
        dropped_rows = dropped;
        const Eigen::RowVectorXd mean = raw.colwise().mean();
        values = std::move(raw);
        values.rowwise() -= mean;
        gram = values.transpose() * values;
        gram = ((gram + gram.transpose()) * 0.5).eval();  // kill asymmetry at rounding level
    }
};

}  // namespace ggm
