#pragma once

#include "pinv/matrix.hpp"
#include "pinv/sparse.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pinv {

/// Physical layout of dense matrices: one R string per matrix, or one mR
/// record per matrix row.
enum class Layout { R, mR };

/// Indexed lookup narrows candidates by dimension and a content digest;
/// FullScan compares the serialization of every matrix of the same
/// dimension, like the original application did.
enum class SearchMode { Indexed, FullScan };

const char* layout_name(Layout layout);
Layout parse_layout(std::string_view text);

/// A row of matrices_in. sparse is 0 for a dense matrix and 1/2/3 for the
/// row-index, column-index and value components of a COO matrix.
struct MatrixRecord {
    std::int64_t id = 0;
    std::string elements_in;
    std::string dimension;
    std::string test;
    int sparse = 0;

    friend bool operator==(const MatrixRecord&, const MatrixRecord&) = default;
};

/// The cache key of a computed result.
struct ResultKey {
    std::string operation;
    std::int64_t matrix_i = 0;
    std::int64_t matrix_ii = 0;
    std::int64_t matrix_iii = 0;
    double r = 0.0;
    double s = 0.0;
    std::int64_t p = 0;
    std::int64_t q = 0;
};

/// A row of matrices_out. r and s hold canonical number strings; dimension
/// records the result shape so the payload can be parsed back.
struct ResultRecord {
    std::int64_t id = 0;
    std::string elements_out;
    std::string operation;
    std::int64_t matrix_i = 0;
    std::int64_t matrix_ii = 0;
    std::int64_t matrix_iii = 0;
    std::string r = "0";
    std::string s = "0";
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::string dimension;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// The operation codes a result may carry.
const std::vector<std::string>& operation_codes();
bool is_operation_code(std::string_view code);

struct StoreOptions {
    Layout layout = Layout::R; ///< used only when the file is created
    SearchMode search = SearchMode::Indexed;
    std::size_t max_text_length = 4294967295u; ///< longtext bound, 2^32 - 1
};

/**
 * Persistent store of input matrices and computed results in a single
 * SQLite file (or ":memory:"). Matrices are identified by their canonical
 * serialization: two matrices are the same record exactly when dimension and
 * serialized text agree byte for byte.
 *
 * All members are safe to call from several threads; access to the
 * underlying connection is serialized.
 */
class MatrixStore {
public:
    explicit MatrixStore(const std::filesystem::path& path, StoreOptions options = {});
    ~MatrixStore();
    MatrixStore(const MatrixStore&) = delete;
    MatrixStore& operator=(const MatrixStore&) = delete;

    Layout layout() const noexcept { return layout_; }
    SearchMode search_mode() const;
    void set_search_mode(SearchMode mode);

    std::optional<std::int64_t> find_matrix(const DenseMatrix& a) const;
    std::optional<std::int64_t> find_matrix(const SparseCoo& s) const;

    /// Throws DuplicateMatrix if an identical record (including the test
    /// name) exists, TooLong past the text bound. A COO matrix takes three
    /// consecutive records; the id of the first one is returned.
    std::int64_t insert_matrix(const DenseMatrix& a, std::string_view test = {});
    std::int64_t insert_matrix(const SparseCoo& s, std::string_view test = {});

    /// Id of the stored matrix carrying this test name.
    std::optional<std::int64_t> find_test_matrix(std::string_view name) const;

    /// Throws UnknownId; COO matrices are returned densified.
    DenseMatrix load_matrix(std::int64_t id, Backend backend = Backend::Flat) const;
    MatrixRecord matrix_record(std::int64_t id) const;

    std::optional<DenseMatrix> find_result(const ResultKey& key, Backend backend = Backend::Flat) const;
    std::optional<ResultRecord> find_result_record(const ResultKey& key) const;
    ResultRecord result_record(std::int64_t id) const;

    /// Throws DuplicateResult when the key is taken.
    std::int64_t insert_result(const ResultKey& key, const DenseMatrix& x);

    std::size_t matrix_record_count() const;
    std::size_t result_count() const;

    std::vector<MatrixRecord> all_matrix_records() const;
    std::vector<ResultRecord> all_result_records() const;

    /// Writes matrices_in.tsv and matrices_out.tsv (one record per line,
    /// tab-separated fields in schema order) into `dir`.
    void export_to(const std::filesystem::path& dir) const;
    /// Loads a dump written by export_to, keeping record ids.
    void import_from(const std::filesystem::path& dir);

    /// Groups writes into one transaction; commits on destruction unless
    /// an exception is in flight.
    class Batch {
    public:
        explicit Batch(MatrixStore& store);
        ~Batch();
        Batch(const Batch&) = delete;
        Batch& operator=(const Batch&) = delete;

    private:
        MatrixStore& store_;
        int exceptions_;
    };

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
    Layout layout_;
    std::size_t max_text_length_;
    mutable std::recursive_mutex mutex_;
};

/// Canonical text of a coefficient as stored in a result key ("3", "0.5").
std::string coefficient_text(double value);

/// Name-indexed test matrices. Ships with "A_10_11", the 11x10 test matrix.
class TestMatrixRegistry {
public:
    static TestMatrixRegistry with_builtins();

    void add(std::string name, DenseMatrix matrix);
    std::optional<DenseMatrix> find(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, DenseMatrix, std::less<>> matrices_;
};

/// The 11x10 test matrix shipped as "A_10_11".
DenseMatrix test_matrix_a_11x10();

} // namespace pinv
