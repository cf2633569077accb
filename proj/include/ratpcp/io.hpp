#pragma once

#include <string>

#include "ratpcp/core.hpp"

namespace ratpcp {

enum class MatrixFormat { automatic, matrix_market, csv };

// Matrix Market coordinate real general, or dense comma-separated rows.
// automatic picks by the `%%MatrixMarket` banner.
RowMatrix load_matrix(const std::string& path, MatrixFormat format = MatrixFormat::automatic);
void save_matrix_csv(const RowMatrix& a, const std::string& path);
void save_matrix_market(const RowMatrix& a, const std::string& path);

// Single-column CSV.
Vector load_vector(const std::string& path);
void save_vector(const Vector& v, const std::string& path);

inline constexpr const char* kTraceHeader = "method,seed,epoch,vec_products,rel_error,wall_ns";
void save_trace(const ConvergenceTrace& trace, const std::string& path);
std::string format_double(double x);

}  // namespace ratpcp
