#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccbench/error.hpp"
#include "ccbench/image.hpp"

namespace testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("ccbench_test_" + std::to_string(stamp) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ccbench::Image random_image(std::mt19937_64& gen, std::size_t w,
                                   std::size_t h, double lo = 0.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ccbench::Image img(w, h);
  for (double& v : img.data()) v = dist(gen);
  return img;
}

inline ccbench::Image constant_image(std::size_t w, std::size_t h,
                                     const ccbench::Rgb& rgb) {
  ccbench::Image img(w, h);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.set_pixel(i, rgb);
  return img;
}

template <typename F>
ccbench::ErrorCode error_code_of(F&& fn) {
  try {
    fn();
  } catch (const ccbench::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected ccbench::Error");
}

template <typename F>
std::string error_message_of(F&& fn) {
  try {
    fn();
  } catch (const ccbench::Error& e) {
    return e.what();
  }
  throw std::logic_error("expected ccbench::Error");
}

}  // namespace testing
