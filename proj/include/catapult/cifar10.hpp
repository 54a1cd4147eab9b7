#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"

namespace catapult {

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cifar10: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) fail(errc::io_failure, "cifar10: read failed for " + path);
  return bytes;
}

}  // namespace detail

// Loads a two-class subset from CIFAR-10 binary batches. Each record is 3073
// bytes: one label byte (0-9) followed by 3072 pixel bytes (1024 R, 1024 G,
// 1024 B, row-major 32x32). path may be a single batch file or a directory,
// in which case every *.bin inside is read in lexicographic order. Features
// are scaled to [0,1] and mean-centered per feature over the loaded subset;
// class_a maps to label +1 and class_b to -1; record order is preserved and
// at most max_per_class records are kept per class.
inline Dataset load_cifar10_pair(const std::string& path, int class_a, int class_b,
                                 int max_per_class) {
  if (class_a < 0 || class_a > 9 || class_b < 0 || class_b > 9)
    fail(errc::config_invalid, "cifar10: class indices must be in 0..9");
  if (class_a == class_b)
    fail(errc::config_invalid, "cifar10: class_a and class_b must differ");
  if (max_per_class < 1)
    fail(errc::config_invalid, "cifar10: max_per_class must be >= 1");

  namespace fs = std::filesystem;
  std::vector<std::string> files;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin")
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      fail(errc::io_failure, "cifar10: no .bin batch files under " + path);
  } else if (fs::is_regular_file(path, ec)) {
    files.push_back(path);
  } else {
    fail(errc::io_failure, "cifar10: no such file or directory: " + path);
  }

  constexpr std::size_t kRecord = 3073;
  constexpr std::size_t kPixels = 3072;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  int count_a = 0, count_b = 0;
  for (const std::string& file : files) {
    const std::vector<unsigned char> bytes = detail::read_file_bytes(file);
    if (bytes.size() % kRecord != 0)
      fail(errc::data_invalid, "cifar10: malformed batch " + file + " (length " +
                                   std::to_string(bytes.size()) +
                                   " is not a multiple of 3073)");
    for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
      const int label = bytes[off];
      if (label > 9)
        fail(errc::data_invalid, "cifar10: label byte out of range in " + file);
      int* count = nullptr;
      double y = 0;
      if (label == class_a) {
        count = &count_a;
        y = 1.0;
      } else if (label == class_b) {
        count = &count_b;
        y = -1.0;
      } else {
        continue;
      }
      if (*count >= max_per_class) continue;
      ++*count;
      std::vector<double> px(kPixels);
      for (std::size_t k = 0; k < kPixels; ++k) px[k] = bytes[off + 1 + k] / 255.0;
      rows.push_back(std::move(px));
      labels.push_back(y);
    }
  }
  if (count_a == 0)
    fail(errc::data_invalid, "cifar10: no records for class " + std::to_string(class_a));
  if (count_b == 0)
    fail(errc::data_invalid, "cifar10: no records for class " + std::to_string(class_b));

  Dataset data;
  data.name = "cifar10:" + std::to_string(class_a) + "v" + std::to_string(class_b);
  const int n = static_cast<int>(rows.size());
  data.features = Mat(n, static_cast<int>(kPixels));
  data.labels.assign(labels.begin(), labels.end());
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < kPixels; ++k) data.features(i, static_cast<int>(k)) = rows[i][k];

  // Mean-center each feature over the loaded subset.
  for (std::size_t k = 0; k < kPixels; ++k) {
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += data.features(i, static_cast<int>(k));
    mean /= double(n);
    for (int i = 0; i < n; ++i) data.features(i, static_cast<int>(k)) -= mean;
  }
  return data;
}

// Writes records in the same binary layout; test fixtures use this to build
// tiny synthetic batches.
inline void write_cifar10_fixture(const std::string& path,
                                  const std::vector<int>& record_labels,
                                  unsigned char fill_base = 0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cifar10: cannot create " + path);
  for (std::size_t r = 0; r < record_labels.size(); ++r) {
    out.put(static_cast<char>(record_labels[r]));
    for (int k = 0; k < 3072; ++k)
      out.put(static_cast<char>((fill_base + 37 * r + k) % 256));
  }
  if (!out) fail(errc::io_failure, "cifar10: write failed for " + path);
}

}  // namespace catapult
