#pragma once

#include <stdexcept>
#include <string>

namespace goc {

// Bad scalar argument (e.g. a cycle length below 3).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A CactusSpec whose join relation is not a tree or whose positions are out of range.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Board or document failed validation. `path` points at the offending element,
// e.g. "cells[2].walk" or "edges[4].u".
class BoardError : public std::runtime_error {
 public:
  BoardError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// The board is outside the family an algorithm supports (shared cell edges, too many vertices...).
class UnsupportedBoard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace goc
