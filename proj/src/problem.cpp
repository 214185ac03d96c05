#include "eqdirect/problem.hpp"

#include "eqdirect/format.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace eqd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const ProblemInstance& p, const Vector& x, const char* what) {
  if (x.size() != p.n()) {
    throw UsageError(std::string(what) + " has length " + std::to_string(x.size()) +
                     ", problem dimension is " + std::to_string(p.n()));
  }
}

}  // namespace

bool BoxSet::contains(const Vector& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

bool BoxSet::contains(const BoxSet& inner, double tol) const {
  return contains(inner.lower, tol) && contains(inner.upper, tol);
}

std::string_view to_string(ProblemClass c) {
  switch (c) {
    case ProblemClass::AffineVI: return "affine-vi";
    case ProblemClass::TrigVI: return "trig-vi";
    case ProblemClass::AffineEP: return "affine-ep";
  }
  return "unknown";
}

ProblemClass problem_class_from_string(std::string_view s) {
  if (s == "affine-vi") return ProblemClass::AffineVI;
  if (s == "trig-vi") return ProblemClass::TrigVI;
  if (s == "affine-ep") return ProblemClass::AffineEP;
  throw UsageError("unknown problem class '" + std::string(s) +
                   "' (expected affine-vi, trig-vi or affine-ep)");
}

ProblemClass ProblemInstance::problem_class() const {
  return std::visit(overloaded{[](const AffineVISpec&) { return ProblemClass::AffineVI; },
                               [](const TrigVISpec&) { return ProblemClass::TrigVI; },
                               [](const AffineEPSpec&) { return ProblemClass::AffineEP; }},
                    spec);
}

const Matrix& ProblemInstance::P() const {
  return std::visit([](const auto& s) -> const Matrix& { return s.P; }, spec);
}

const Vector& ProblemInstance::r() const {
  return std::visit([](const auto& s) -> const Vector& { return s.r; }, spec);
}

void validate(const ProblemInstance& p) {
  const auto n = p.C.lower.size();
  if (n < 1) throw InvariantError("problem '" + p.id + "': dimension must be positive");
  if (p.C.upper.size() != n) throw InvariantError("problem '" + p.id + "': lower/upper length mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(p.C.lower[i]) || !std::isfinite(p.C.upper[i])) {
      throw InvariantError("problem '" + p.id + "': non-finite bound at index " + std::to_string(i));
    }
    if (!(p.C.lower[i] < p.C.upper[i])) {
      throw InvariantError("problem '" + p.id + "': lower[" + std::to_string(i) + "] = " +
                           format_double(p.C.lower[i]) + " is not below upper[" + std::to_string(i) +
                           "] = " + format_double(p.C.upper[i]));
    }
  }
  auto check_matrix = [&](const Matrix& M, const char* name) {
    if (M.rows() != n || M.cols() != n) {
      throw InvariantError("problem '" + p.id + "': " + name + " must be " + std::to_string(n) + "x" +
                           std::to_string(n));
    }
    if (!M.allFinite()) throw InvariantError("problem '" + p.id + "': " + name + " has non-finite entries");
  };
  auto check_vector = [&](const Vector& v, const char* name) {
    if (v.size() != n) {
      throw InvariantError("problem '" + p.id + "': " + name + " must have length " + std::to_string(n));
    }
    if (!v.allFinite()) throw InvariantError("problem '" + p.id + "': " + name + " has non-finite entries");
  };
  std::visit(overloaded{[&](const AffineVISpec& s) {
                          check_matrix(s.P, "P");
                          check_vector(s.r, "r");
                        },
                        [&](const TrigVISpec& s) {
                          check_matrix(s.P, "P");
                          check_vector(s.r, "r");
                          check_vector(s.w, "w");
                          check_vector(s.v, "v");
                          for (Eigen::Index i = 0; i < n; ++i) {
                            if (!(s.w[i] > 0.0) || !(s.v[i] > 0.0)) {
                              throw InvariantError("problem '" + p.id + "': w and v must be positive (index " +
                                                   std::to_string(i) + ")");
                            }
                          }
                        },
                        [&](const AffineEPSpec& s) {
                          check_matrix(s.P, "P");
                          check_matrix(s.Q, "Q");
                          check_vector(s.r, "r");
                          const Matrix S = s.Q + s.Q.transpose();
                          Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
                          const double qnorm = Eigen::JacobiSVD<Matrix>(s.Q).singularValues()(0);
                          const double floor = -1e-10 * qnorm;
                          if (eig.eigenvalues().minCoeff() < floor) {
                            throw InvariantError("problem '" + p.id +
                                                 "': Q + Q^T is not positive semidefinite (smallest eigenvalue " +
                                                 format_double(eig.eigenvalues().minCoeff()) +
                                                 "), so f(x, .) is not convex");
                          }
                        }},
             p.spec);
}

Vector eval_F(const ProblemInstance& p, const Vector& x, const Vector& y) {
  check_dim(p, x, "x");
  check_dim(p, y, "y");
  return std::visit(overloaded{[&](const AffineVISpec& s) -> Vector { return s.P * x + s.r; },
                               [&](const TrigVISpec& s) -> Vector {
                                 Vector F = s.P * x + s.r;
                                 for (Eigen::Index i = 0; i < x.size(); ++i) F[i] += s.w[i] * std::sin(s.v[i] * x[i]);
                                 return F;
                               },
                               [&](const AffineEPSpec& s) -> Vector { return s.P * x + s.Q * y + s.r; }},
                    p.spec);
}

double eval_f(const ProblemInstance& p, const Vector& x, const Vector& y) {
  return eval_F(p, x, y).dot(y - x);
}

Matrix jacobian1_F(const ProblemInstance& p, const Vector& x, const Vector& y) {
  check_dim(p, x, "x");
  check_dim(p, y, "y");
  return std::visit(overloaded{[&](const TrigVISpec& s) -> Matrix {
                                 Matrix J = s.P;
                                 for (Eigen::Index i = 0; i < x.size(); ++i) {
                                   J(i, i) += s.w[i] * s.v[i] * std::cos(s.v[i] * x[i]);
                                 }
                                 return J;
                               },
                               [&](const auto& s) -> Matrix { return s.P; }},
                    p.spec);
}

Vector project_box(const BoxSet& B, const Vector& z) {
  if (z.size() != B.dim()) throw UsageError("project_box: dimension mismatch");
  return z.cwiseMax(B.lower).cwiseMin(B.upper);
}

// ---------------------------------------------------------------------------
// JSON problem files

namespace {

using nlohmann::json;

std::string location_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

struct Reader {
  const json& doc;
  std::string source;

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw ParseError(source + ": field '" + field + "': " + msg);
  }

  const json& get(const std::string& field) const {
    auto it = doc.find(field);
    if (it == doc.end()) fail(field, "missing");
    return *it;
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
  }

  Vector vector(const std::string& field, Eigen::Index n) const {
    const json& v = get(field);
    if (!v.is_array()) fail(field, "expected an array");
    if (static_cast<Eigen::Index>(v.size()) != n) {
      fail(field, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = number(v[i], field + "[" + std::to_string(i) + "]");
    return out;
  }

  // Row-major flat array or array of rows.
  Matrix matrix(const std::string& field, Eigen::Index n) const {
    const json& v = get(field);
    if (!v.is_array()) fail(field, "expected an array");
    Matrix out(n, n);
    if (!v.empty() && v[0].is_array()) {
      if (static_cast<Eigen::Index>(v.size()) != n) fail(field, "expected " + std::to_string(n) + " rows");
      for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = v[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
          fail(field, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          out(i, j) = number(row[j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
      }
      return out;
    }
    if (static_cast<Eigen::Index>(v.size()) != n * n) {
      fail(field, "expected " + std::to_string(n * n) + " entries (row-major), got " + std::to_string(v.size()));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        out(i, j) = number(v[i * n + j], field + "[" + std::to_string(i * n + j) + "]");
      }
    }
    return out;
  }
};

void write_vector(std::ostream& os, const char* name, const Vector& v) {
  os << "  \"" << name << "\": [";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
  os << "]";
}

void write_matrix(std::ostream& os, const char* name, const Matrix& M) {
  os << "  \"" << name << "\": [";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    os << (i ? ",\n    " : "\n    ");
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? ", " : "") << format_double(M(i, j));
  }
  os << "\n  ]";
}

}  // namespace

ProblemInstance parse_problem(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + location_of(text, e.byte) + ": malformed JSON");
  }
  if (!doc.is_object()) throw ParseError(std::string(source) + ": top level must be a JSON object");
  Reader rd{doc, std::string(source)};

  ProblemInstance p;
  const json& id = rd.get("id");
  if (!id.is_string()) rd.fail("id", "expected a string");
  p.id = id.get<std::string>();

  const json& cls = rd.get("class");
  if (!cls.is_string()) rd.fail("class", "expected a string");
  ProblemClass pc;
  try {
    pc = problem_class_from_string(cls.get<std::string>());
  } catch (const UsageError& e) {
    rd.fail("class", e.what());
  }

  const json& nj = rd.get("n");
  if (!nj.is_number_integer() || nj.get<long long>() < 1) rd.fail("n", "expected a positive integer");
  const auto n = static_cast<Eigen::Index>(nj.get<long long>());

  p.C.lower = rd.vector("lower", n);
  p.C.upper = rd.vector("upper", n);
  switch (pc) {
    case ProblemClass::AffineVI:
      p.spec = AffineVISpec{rd.matrix("P", n), rd.vector("r", n)};
      break;
    case ProblemClass::TrigVI:
      p.spec = TrigVISpec{rd.matrix("P", n), rd.vector("r", n), rd.vector("w", n), rd.vector("v", n)};
      break;
    case ProblemClass::AffineEP:
      p.spec = AffineEPSpec{rd.matrix("P", n), rd.matrix("Q", n), rd.vector("r", n)};
      break;
  }
  validate(p);
  return p;
}

std::string serialize_problem(const ProblemInstance& p) {
  std::ostringstream os;
  os << "{\n  \"id\": " << json(p.id).dump() << ",\n";
  os << "  \"class\": \"" << to_string(p.problem_class()) << "\",\n";
  os << "  \"n\": " << p.n() << ",\n";
  std::visit(overloaded{[&](const AffineVISpec& s) {
                          write_matrix(os, "P", s.P);
                          os << ",\n";
                          write_vector(os, "r", s.r);
                        },
                        [&](const TrigVISpec& s) {
                          write_matrix(os, "P", s.P);
                          os << ",\n";
                          write_vector(os, "r", s.r);
                          os << ",\n";
                          write_vector(os, "w", s.w);
                          os << ",\n";
                          write_vector(os, "v", s.v);
                        },
                        [&](const AffineEPSpec& s) {
                          write_matrix(os, "P", s.P);
                          os << ",\n";
                          write_matrix(os, "Q", s.Q);
                          os << ",\n";
                          write_vector(os, "r", s.r);
                        }},
             p.spec);
  os << ",\n";
  write_vector(os, "lower", p.C.lower);
  os << ",\n";
  write_vector(os, "upper", p.C.upper);
  os << "\n}\n";
  return os.str();
}

ProblemInstance load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open problem file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path.string());
}

void save_problem(const ProblemInstance& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write problem file " + path.string());
  out << serialize_problem(p);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace eqd
