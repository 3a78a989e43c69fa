#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finpart/exterior.hpp"
#include "finpart/multi.hpp"

namespace finpart::cli {

// Malformed problem description; `path` names the offending JSON field.
class SpecError : public InvalidArgument {
 public:
  SpecError(std::string path, const std::string& message)
      : InvalidArgument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Window factor attached to a term. Radial windows act on mu of a block
// (1-based block index), coordinate windows on x_index^2 (1-based).
struct WindowTag {
  enum class Kind { Radial, Coordinate };
  Kind kind = Kind::Radial;
  int index = 1;
  int order = 0;
  std::optional<double> inner;
  std::optional<double> outer;

  friend bool operator==(const WindowTag&, const WindowTag&) = default;
};

struct PolyTerm {
  Complex coefficient{1.0};
  std::vector<int> monomial;  // exponents, length n

  friend bool operator==(const PolyTerm&, const PolyTerm&) = default;
};

struct TermSpec {
  Complex coefficient{1.0};
  std::vector<int> monomial;
  std::vector<int> frame;  // sorted 1-based indices
  int sign = 1;            // sign of the sorting permutation times any explicit sign
  std::vector<WindowTag> windows;

  friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

enum class ProblemKind { Single, Crossing, Boundary };

struct ProblemSpec {
  int n = 0;
  ProblemKind kind = ProblemKind::Single;
  int codim = 0;            // single: normal block x_1..x_codim
  std::vector<int> blocks;  // crossing: consecutive block sizes from x_1
  std::vector<int> powers;  // one per component (single and boundary: one)
  double inner = kDefaultInner;
  double outer = kDefaultOuter;
  std::vector<TermSpec> numerator;
  std::vector<PolyTerm> phi;                 // single and boundary
  std::vector<std::vector<PolyTerm>> phis;   // crossing, one list per component
  std::vector<TermSpec> test_form;
  std::string engine = "mellin";
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;

  Layout layout() const;
  Form numerator_form() const;
  Polynomial phi_polynomial() const;
  std::vector<Polynomial> phi_polynomials() const;
  std::optional<Form> test_form_value() const;

  SingularForm singular_form() const;       // single and crossing
  MorseBott morse_bott() const;             // single
  CrossingProblem crossing_problem() const; // crossing, conformal factors included
  BoundaryProblem boundary_problem() const; // boundary, conformal factor included
};

// Strict parse: unknown fields, wrong types and out-of-range values raise
// SpecError naming the JSON path.
ProblemSpec parse_problem(const std::string& text);
std::string serialize_problem(const ProblemSpec& spec);

}  // namespace finpart::cli
