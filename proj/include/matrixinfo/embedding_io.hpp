#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matrixinfo/matrix.hpp"

namespace matrixinfo {

/// Binary embedding container:
///   magic "MXE1" | version u16 LE (=1) | d u32 LE | B u32 LE |
///   d*B float64 LE, column-major | optional 0x4C marker + B u32 LE labels.
struct EmbeddingFile {
    Matrix z;  // d x B
    std::optional<std::vector<std::uint32_t>> labels;
};

void write_embedding_file(const std::string& path, const EmbeddingFile& file);

/// Throws ParseError (with the failing byte offset) on malformed input.
EmbeddingFile read_embedding_file(const std::string& path);

/// Text form: first line "d,B", then one column per line with d
/// comma-separated values at 17 significant digits.
void write_embedding_csv(const std::string& path, const Matrix& z);

/// Throws ParseError carrying the failing 1-based line number.
Matrix read_embedding_csv(const std::string& path);

/// Reads either container, picking by content: binary when the file starts
/// with the magic, CSV otherwise.
EmbeddingFile read_embeddings_auto(const std::string& path);

/// Sidecar label file: one label per line, B lines.
std::vector<std::uint32_t> read_labels_csv(const std::string& path);

}  // namespace matrixinfo
