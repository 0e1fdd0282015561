#include "matrixinfo/embedding_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "matrixinfo/errors.hpp"
#include "matrixinfo/report.hpp"

namespace matrixinfo {

namespace {

constexpr char kMagic[4] = {'M', 'X', 'E', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kLabelMarker = 0x4C;

static_assert(std::endian::native == std::endian::little,
              "the on-disk format is little-endian; byte swapping is not wired up");

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, long long& offset, const char* what) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw ParseError(std::string("truncated input while reading ") + what +
                             " at byte offset " + std::to_string(offset),
                         offset);
    }
    offset += sizeof(T);
    return value;
}

}  // namespace

void write_embedding_file(const std::string& path, const EmbeddingFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(file.z.rows()));
    put(out, static_cast<std::uint32_t>(file.z.cols()));
    out.write(reinterpret_cast<const char*>(file.z.data()),
              static_cast<std::streamsize>(sizeof(double) * file.z.rows() * file.z.cols()));
    if (file.labels) {
        if (file.labels->size() != file.z.cols()) {
            throw DimensionMismatchError("write_embedding_file: label count mismatch");
        }
        put(out, kLabelMarker);
        for (std::uint32_t label : *file.labels) put(out, label);
    }
    if (!out) throw Error("write failed: " + path);
}

EmbeddingFile read_embedding_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path, 0);
    long long offset = 0;

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError("bad magic at byte offset 0 in " + path, 0);
    }
    offset = 4;
    const auto version = get<std::uint16_t>(in, offset, "version");
    if (version != kVersion) {
        throw ParseError("unsupported version " + std::to_string(version) +
                             " at byte offset 4",
                         4);
    }
    const auto d = get<std::uint32_t>(in, offset, "dimension");
    const auto b = get<std::uint32_t>(in, offset, "batch size");
    if (d == 0 || b == 0) {
        throw ParseError("zero dimension in header at byte offset 6", 6);
    }

    EmbeddingFile file;
    file.z = Matrix(d, b);
    const std::streamsize payload =
        static_cast<std::streamsize>(sizeof(double) * d) * b;
    in.read(reinterpret_cast<char*>(file.z.data()), payload);
    if (in.gcount() != payload) {
        throw ParseError("truncated payload at byte offset " +
                             std::to_string(offset + in.gcount()),
                         offset + in.gcount());
    }
    offset += payload;

    std::uint8_t marker;
    in.read(reinterpret_cast<char*>(&marker), 1);
    if (in) {
        if (marker != kLabelMarker) {
            throw ParseError("unexpected trailing byte at offset " + std::to_string(offset),
                             offset);
        }
        offset += 1;
        std::vector<std::uint32_t> labels(b);
        for (std::uint32_t& label : labels) {
            label = get<std::uint32_t>(in, offset, "label");
            if (label == std::numeric_limits<std::uint32_t>::max()) {
                throw ParseError("label value out of range at byte offset " +
                                     std::to_string(offset - 4),
                                 offset - 4);
            }
        }
        file.labels = std::move(labels);
    }
    return file;
}

void write_embedding_csv(const std::string& path, const Matrix& z) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << z.rows() << "," << z.cols() << "\n";
    for (std::size_t j = 0; j < z.cols(); ++j) {
        for (std::size_t i = 0; i < z.rows(); ++i) {
            if (i) out << ",";
            std::string cell = format_double(z(i, j));
            // format_double quotes only non-finite values; strip for CSV.
            if (!cell.empty() && cell.front() == '"') cell = cell.substr(1, cell.size() - 2);
            out << cell;
        }
        out << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

namespace {

std::vector<double> split_doubles(const std::string& line, long long line_no) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t comma = line.find(',', start);
        const std::string cell =
            line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                ++used;
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ParseError("bad numeric cell '" + cell + "' on line " +
                                 std::to_string(line_no),
                             line_no);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

}  // namespace

Matrix read_embedding_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path, 0);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file on line 1", 1);

    std::size_t d = 0, b = 0;
    {
        std::istringstream header(line);
        char comma = 0;
        if (!(header >> d >> comma >> b) || comma != ',' || d == 0 || b == 0) {
            throw ParseError("header must be 'd,B' on line 1", 1);
        }
    }
    Matrix z(d, b);
    for (std::size_t j = 0; j < b; ++j) {
        if (!std::getline(in, line)) {
            throw ParseError("missing column on line " + std::to_string(j + 2), j + 2);
        }
        const std::vector<double> values = split_doubles(line, static_cast<long long>(j + 2));
        if (values.size() != d) {
            throw ParseError("expected " + std::to_string(d) + " values on line " +
                                 std::to_string(j + 2) + ", got " +
                                 std::to_string(values.size()),
                             j + 2);
        }
        for (std::size_t i = 0; i < d; ++i) z(i, j) = values[i];
    }
    return z;
}

EmbeddingFile read_embeddings_auto(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw ParseError("cannot open: " + path, 0);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    probe.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return read_embedding_file(path);
    EmbeddingFile file;
    file.z = read_embedding_csv(path);
    return file;
}

std::vector<std::uint32_t> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path, 0);
    std::vector<std::uint32_t> labels;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const unsigned long value = std::stoul(line);
            if (value >= std::numeric_limits<std::uint32_t>::max()) {
                throw std::out_of_range(line);
            }
            labels.push_back(static_cast<std::uint32_t>(value));
        } catch (const std::exception&) {
            throw ParseError("bad label '" + line + "' on line " + std::to_string(line_no),
                             line_no);
        }
    }
    return labels;
}

}  // namespace matrixinfo
