#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <cueboot/corpus.hpp>
#include <cueboot/error.hpp>

namespace cueboot::test {

inline Utterance utt(std::string id, std::string text) {
  Utterance u;
  u.id = std::move(id);
  u.response_text = std::move(text);
  return u;
}

inline LabeledUtterance lab(std::string id, std::string text, Label label,
                            double mean = 0.0, Task task = Task::SARCASM_BINARY) {
  LabeledUtterance lu;
  lu.utterance = utt(std::move(id), std::move(text));
  lu.class_label = label;
  lu.task = task;
  lu.mean_score = mean;
  return lu;
}

template <typename Fn>
void expect_error(errc code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected error " << errc_name(code) << ", nothing thrown";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  } catch (const std::exception& e) {
    ADD_FAILURE() << "expected cueboot::error, got: " << e.what();
  }
}

/// Fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path() / "cueboot-test-XXXXXX";
    std::string tmpl = base.string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cueboot::test
