#include "element.hpp"

namespace qmee::kernels::detail {

void gauss_pass_scalar(const double* xs, std::size_t n, double center,
                       double wnorm, double neg_half_inv_ss, double* s0,
                       double* s1) {
  if (s1 != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      gauss_element<true>(xs[i], center, wnorm, neg_half_inv_ss, s0 + i,
                          s1 + i);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      gauss_element<false>(xs[i], center, wnorm, neg_half_inv_ss, s0 + i,
                           nullptr);
    }
  }
}

}  // namespace qmee::kernels::detail
