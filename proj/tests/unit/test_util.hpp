#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace test_util {

inline std::filesystem::path data_dir()
{
    return std::filesystem::path(YIELDCAST_DATA_DIR);
}

inline std::filesystem::path cli_path()
{
    return std::filesystem::path(YIELDCAST_CLI_PATH);
}

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir()
    {
        static std::mt19937_64 rng(std::random_device{}());
        std::ostringstream name;
        name << "yieldcast_test_" << std::hex << rng();
        path = std::filesystem::temp_directory_path() / name.str();
        std::filesystem::create_directories(path);
    }

    ~TempDir() { std::filesystem::remove_all(path); }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::filesystem::path file(const std::string& name) const
    {
        return path / name;
    }
};

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace test_util
