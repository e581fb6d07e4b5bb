#pragma once

#include <array>

namespace mildito::detail {

// 5-point Gauss-Legendre rule on [0, 1].
inline constexpr std::array<double, 5> kGaussNodes = {0.046910077030668004, 0.23076534494715845, 0.5,
                                                      0.76923465505284155, 0.95308992296933200};
inline constexpr std::array<double, 5> kGaussWeights = {0.11846344252809454, 0.23931433524968324,
                                                        0.28444444444444444, 0.23931433524968324,
                                                        0.11846344252809454};

}  // namespace mildito::detail
