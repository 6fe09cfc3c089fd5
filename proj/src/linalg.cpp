#include "qtt/linalg.hpp"

#include "qtt/error.hpp"

#include <algorithm>
#include <cmath>

namespace qtt {

std::size_t truncation_rank(const Vector& s, double budget, std::size_t max_rank)
{
    const auto n = static_cast<std::size_t>(s.size());
    if (n == 0)
        return 0;
    const double budget2 = budget * budget;
    std::size_t rank = n;
    double tail = 0.0;
    while (rank > 1) {
        const double next = tail + s[rank - 1] * s[rank - 1];
        if (next > budget2)
            break;
        tail = next;
        --rank;
    }
    if (max_rank != 0)
        rank = std::min(rank, max_rank);
    return std::max<std::size_t>(rank, 1);
}

Vector singular_values(const Matrix& a)
{
    if (a.size() == 0)
        return Vector();
    if (!a.allFinite())
        throw NumericalError("singular_values: non-finite input");
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

TruncatedSvd truncated_svd(const Matrix& a, double budget, std::size_t max_rank)
{
    if (a.rows() == 0 || a.cols() == 0)
        throw ValidationError("truncated_svd: empty matrix");
    if (!a.allFinite())
        throw NumericalError("truncated_svd: non-finite input");

    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("truncated_svd: SVD did not converge");

    const Vector& s = svd.singularValues();
    const std::size_t rank = truncation_rank(s, budget, max_rank);

    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(static_cast<Eigen::Index>(rank));
    out.v = svd.matrixV().leftCols(static_cast<Eigen::Index>(rank));
    out.s = s.head(static_cast<Eigen::Index>(rank));
    double tail = 0.0;
    for (Eigen::Index i = static_cast<Eigen::Index>(rank); i < s.size(); ++i)
        tail += s[i] * s[i];
    out.discarded = std::sqrt(tail);

    for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
            const double x = out.u(i, j);
            if (std::abs(x) > 1e-12) {
                if (x < 0) {
                    out.u.col(j) *= -1.0;
                    out.v.col(j) *= -1.0;
                }
                break;
            }
        }
    }
    return out;
}

} // namespace qtt
