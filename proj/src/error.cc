#include "lmr/error.h"

namespace lmr {
namespace {

std::string Describe(const std::string& file, const std::string& path,
                     int line, const std::string& message) {
  std::string out = file.empty() ? "<input>" : file;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": ";
  if (!path.empty()) out += path + ": ";
  return out + message;
}

}  // namespace

FormatError::FormatError(std::string file, std::string path, int line,
                         const std::string& message)
    : Error(Describe(file, path, line, message)),
      file_(std::move(file)),
      path_(std::move(path)),
      line_(line) {}

}  // namespace lmr
