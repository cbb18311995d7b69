#include "pinv/store.hpp"

#include "pinv/error.hpp"

namespace pinv {

DenseMatrix test_matrix_a_11x10()
{
    return DenseMatrix::from_rows({
        {11, 10, 9, 8, 7, 6, 5, 4, 3, 2},
        {10, 10, 9, 8, 7, 6, 5, 4, 3, 2},
        {9, 9, 9, 8, 7, 6, 5, 4, 3, 2},
        {8, 8, 8, 8, 7, 6, 5, 4, 3, 2},
        {7, 7, 7, 7, 7, 6, 5, 4, 3, 2},
        {6, 6, 6, 6, 6, 6, 5, 4, 3, 2},
        {5, 5, 5, 5, 5, 5, 5, 4, 3, 2},
        {4, 4, 4, 4, 4, 4, 4, 4, 3, 2},
        {3, 3, 3, 3, 3, 3, 3, 3, 2, 1},
        {2, 2, 2, 2, 2, 2, 2, 2, 1, 0},
        {1, 1, 1, 1, 1, 1, 1, 1, 0, -1},
    });
}

TestMatrixRegistry TestMatrixRegistry::with_builtins()
{
    TestMatrixRegistry registry;
    registry.add("A_10_11", test_matrix_a_11x10());
    return registry;
}

void TestMatrixRegistry::add(std::string name, DenseMatrix matrix)
{
    if (name.empty())
        throw Error(ErrorCode::BadRequest, "test matrix name must not be empty");
    matrices_.insert_or_assign(std::move(name), std::move(matrix));
}

std::optional<DenseMatrix> TestMatrixRegistry::find(std::string_view name) const
{
    const auto it = matrices_.find(name);
    if (it == matrices_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::string> TestMatrixRegistry::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, _] : matrices_)
        out.push_back(name);
    return out;
}

} // namespace pinv
