#ifndef LMR_ERROR_H_
#define LMR_ERROR_H_

#include <stdexcept>
#include <string>

namespace lmr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid geometry or map topology.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Lookup of a segment id that is not part of the graph.
class UnknownSegmentError : public Error {
 public:
  explicit UnknownSegmentError(const std::string& id)
      : Error("unknown lane segment id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Malformed or schema-violating input file. `path` is a JSON pointer into the
// document; `line` is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::string path, int line,
              const std::string& message);

  const std::string& file() const { return file_; }
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string file_;
  std::string path_;
  int line_;
};

}  // namespace lmr

#endif  // LMR_ERROR_H_
