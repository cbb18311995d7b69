#pragma once

#include "pinv/matrix.hpp"

namespace pinv::testing {

// The dense 6x6 and sparse 10x10 matrices stored in the example tables.

inline DenseMatrix matrix_b(Backend backend = Backend::Flat)
{
    return DenseMatrix::from_rows({{282, -11, -206, -39, 84, 94},
                                   {-11, 241, -80, 129, 121, -86},
                                   {-206, -80, 306, 4, -113, 2},
                                   {-39, 129, 4, 394, -19, -219},
                                   {84, 121, -113, -19, 119, 15},
                                   {94, -86, 2, -219, 15, 184}},
                                  backend);
}

inline DenseMatrix matrix_c(Backend backend = Backend::Flat)
{
    return DenseMatrix::from_rows({{1, 2, 3, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 2, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {1, 0, 0, 4, 0, 0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 4, 0, 0, 0, 8, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                   {0, 0, 0, 0, 0, 0, 0, 0, 0, 2}},
                                  backend);
}

} // namespace pinv::testing
