#pragma once

#include <stdexcept>
#include <string>

namespace arw {

// Base for all recoverable planner/toolkit errors. The `code` string is
// stable and machine-readable; `what()` carries the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct FileNotFound : Error {
  explicit FileNotFound(const std::string& path) : Error("FileNotFound", path) {}
};

struct ParseError : Error {
  ParseError(const std::string& msg, long byte_offset)
      : Error("ParseError", msg + " (byte " + std::to_string(byte_offset) + ")") {}
};

struct EmptyMesh : Error {
  explicit EmptyMesh(const std::string& path) : Error("EmptyMesh", path) {}
};

struct OriginOutOfBounds : Error {
  OriginOutOfBounds() : Error("OriginOutOfBounds", "scan origin outside map bounds") {}
};

struct StartInCollision : Error {
  StartInCollision() : Error("StartInCollision", "start configuration is in collision") {}
};

struct NoPathWithinBudget : Error {
  NoPathWithinBudget() : Error("NoPathWithinBudget", "no collision-free path found within budget") {}
};

struct Infeasible : Error {
  explicit Infeasible(const std::string& msg) : Error("Infeasible", msg) {}
};

struct TooLarge : Error {
  explicit TooLarge(const std::string& msg) : Error("TooLarge", msg) {}
};

struct FaceInfeasible : Error {
  explicit FaceInfeasible(int face) : Error("FaceInfeasible", "face " + std::to_string(face)), face_index(face) {}
  int face_index;
};

struct TargetTooSmall : Error {
  TargetTooSmall() : Error("TargetTooSmall", "subsample target below 4 faces") {}
};

struct NoUnoccludedSample : Error {
  explicit NoUnoccludedSample(int face) : Error("NoUnoccludedSample", "face " + std::to_string(face)) {}
};

struct NoFeasibleSolution : Error {
  explicit NoFeasibleSolution(const std::string& msg) : Error("NoFeasibleSolution", msg) {}
};

struct RootNotFree : Error {
  RootNotFree() : Error("RootNotFree", "view tree root not in free space") {}
};

struct Stuck : Error {
  Stuck() : Error("Stuck", "no free-space expansion possible") {}
};

struct NotSPD : Error {
  NotSPD() : Error("NotSPD", "covariance matrix is not symmetric positive-definite") {}
};

struct NoCoverageWithinBudget : Error {
  explicit NoCoverageWithinBudget(const std::string& msg) : Error("NoCoverageWithinBudget", msg) {}
};

struct SchemaError : Error {
  SchemaError(const std::string& key_path, const std::string& reason)
      : Error("SchemaError", key_path + ": " + reason) {}
};

struct MissingFile : Error {
  explicit MissingFile(const std::string& path) : Error("MissingFile", path) {}
};

}  // namespace arw
