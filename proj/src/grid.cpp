#include "cvdimer/grid.hpp"

#include <ostream>
#include <stdexcept>

#include "cvdimer/format.hpp"

namespace cvdimer {

void AmplitudeGrid::normalize() {
    const double s = values.sum();
    if (!(s > 0.0)) throw std::domain_error("cannot normalize an empty probability grid");
    values /= s;
}

void write_grid_csv(std::ostream& os, const AmplitudeGrid& g) {
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.values.cols(); ++j) os << (j ? "," : "") << fmt15(g.values(i, j));
        os << '\n';
    }
}

}  // namespace cvdimer
