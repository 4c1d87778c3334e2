#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include <gtest/gtest.h>

namespace testutil {

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        std::string name = "fbsurf_";
        if (info) name += std::string(info->test_suite_name()) + "_" + info->name();
        name += "_" + std::to_string(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / name;
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testutil

#include "fbsurf/error.hpp"

#define EXPECT_FBSURF_ERROR(stmt, cat)                                                     \
    do {                                                                                   \
        try {                                                                              \
            stmt;                                                                          \
            ADD_FAILURE() << "expected " << fbsurf::category_name(cat) << " from " #stmt;  \
        } catch (const fbsurf::Error& e_) {                                                \
            EXPECT_EQ(fbsurf::category_name(e_.category()), fbsurf::category_name(cat))    \
                << e_.what();                                                              \
        }                                                                                  \
    } while (0)
