#include "matrixinfo/embedding_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "matrixinfo/errors.hpp"
#include "matrixinfo/report.hpp"
#include "support/test_helpers.hpp"

using namespace matrixinfo;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("matrixinfo_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("binary round-trip is bit exact") {
    TempDir dir;
    auto gen = testing::rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        EmbeddingFile file;
        file.z = testing::random_matrix(1 + gen() % 6, 1 + gen() % 9, gen);
        if (gen() % 2 == 0) {
            std::vector<std::uint32_t> labels(file.z.cols());
            for (auto& l : labels) l = static_cast<std::uint32_t>(gen() % 5);
            file.labels = labels;
        }
        const std::string path = dir.file("roundtrip.mxe");
        write_embedding_file(path, file);
        const EmbeddingFile back = read_embedding_file(path);
        CHECK(back.z == file.z);  // exact payload equality
        CHECK(back.labels == file.labels);

        // Write-read-write reproduces the byte stream.
        const std::string path2 = dir.file("roundtrip2.mxe");
        write_embedding_file(path2, back);
        CHECK(slurp(path) == slurp(path2));
    }
}

TEST_CASE("csv and binary forms of one matrix produce identical values") {
    TempDir dir;
    auto gen = testing::rng(2);
    const Matrix z = testing::random_matrix(4, 6, gen);
    const std::string bin_path = dir.file("z.mxe");
    const std::string csv_path = dir.file("z.csv");
    EmbeddingFile file;
    file.z = z;
    write_embedding_file(bin_path, file);
    write_embedding_csv(csv_path, z);

    const Matrix from_bin = read_embeddings_auto(bin_path).z;
    const Matrix from_csv = read_embeddings_auto(csv_path).z;
    CHECK(from_bin == z);
    // 17 significant digits round-trip doubles exactly.
    CHECK(from_csv == z);
}

TEST_CASE("malformed binary inputs carry byte offsets") {
    TempDir dir;
    const std::string path = dir.file("bad.mxe");

    {
        std::ofstream out(path, std::ios::binary);
        out << "MXE9";
    }
    CHECK_THROWS_AS(read_embedding_file(path), ParseError);

    // Valid header, truncated payload.
    EmbeddingFile file;
    file.z = Matrix::identity(3);
    write_embedding_file(path, file);
    {
        std::filesystem::resize_file(path, 4 + 2 + 4 + 4 + 5 * sizeof(double));
    }
    try {
        read_embedding_file(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset > 0);
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
}

TEST_CASE("malformed csv inputs carry line numbers") {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    {
        std::ofstream out(path);
        out << "2,2\n1.0,2.0\n3.0,nope\n";
    }
    try {
        read_embedding_csv(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 3);
    }

    {
        std::ofstream out(path);
        out << "2,2\n1.0,2.0\n";  // missing final column
    }
    CHECK_THROWS_AS(read_embedding_csv(path), ParseError);

    {
        std::ofstream out(path);
        out << "2\n";  // header without the batch size
    }
    CHECK_THROWS_AS(read_embedding_csv(path), ParseError);
}

TEST_CASE("label sidecar parsing") {
    TempDir dir;
    const std::string path = dir.file("labels.csv");
    {
        std::ofstream out(path);
        out << "0\n2\n1\n";
    }
    const std::vector<std::uint32_t> labels = read_labels_csv(path);
    CHECK(labels == std::vector<std::uint32_t>{0, 2, 1});

    {
        std::ofstream out(path);
        out << "0\nx\n";
    }
    CHECK_THROWS_AS(read_labels_csv(path), ParseError);
}

TEST_CASE("report document serialization") {
    ReportDocument report("demo");
    report.add_config("alpha", 0.5);
    report.add_config("name", std::string("case"));
    report.add_result("value", 1.0 / 3.0);
    report.add_result("series", std::vector<double>{1.0, 2.5});
    report.add_check(make_check("close", 1.0000000001, 1.0, 1e-6));
    report.add_check(make_check("far", 2.0, 1.0, 1e-6));

    CHECK_FALSE(report.all_checks_pass());
    const std::string json = report.to_json();
    CHECK(json.find("\"tool_version\": \"1.0.0\"") != std::string::npos);
    CHECK(json.find("\"command\": \"demo\"") != std::string::npos);
    CHECK(json.find("0.33333333333333331") != std::string::npos);  // 17 significant digits
    CHECK(json.find("\"pass\": false") != std::string::npos);

    // Identical inputs give byte-identical output.
    ReportDocument again("demo");
    again.add_config("alpha", 0.5);
    again.add_config("name", std::string("case"));
    again.add_result("value", 1.0 / 3.0);
    again.add_result("series", std::vector<double>{1.0, 2.5});
    again.add_check(make_check("close", 1.0000000001, 1.0, 1e-6));
    again.add_check(make_check("far", 2.0, 1.0, 1e-6));
    CHECK(again.to_json() == json);
}

TEST_CASE("non-finite measured values fail their checks") {
    const Check inf_check =
        make_check("inf", std::numeric_limits<double>::infinity(), 0.0, 1e9);
    CHECK_FALSE(inf_check.pass);
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "\"inf\"");
}
