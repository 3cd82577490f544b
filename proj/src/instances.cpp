#include "iqp/instances.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iqp {

namespace detail {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * uniform01(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo,
                         std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = range * (UINT64_MAX / range);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % range);
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller; u1 in (0,1] keeps the log finite.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace detail

namespace {

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = detail::gaussian(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix spectrum_matrix(std::mt19937_64& rng, int n, const Vector& eigs) {
  const Matrix p = random_orthogonal(rng, n);
  Matrix q = p * eigs.asDiagonal() * p.transpose();
  return 0.5 * (q + q.transpose());
}

}  // namespace

IqpInstance generate(const GenSpec& spec) {
  if (spec.n < 1 || spec.p < 0 || spec.p > 100) {
    throw InvalidInstance("generate: invalid spec");
  }
  std::mt19937_64 rng(spec.seed);
  IqpInstance inst;
  inst.n = spec.n;
  const int n = spec.n;

  switch (spec.family) {
    case Family::DenseSpectrum: {
      Vector eigs(n);
      for (int i = 0; i < n; ++i) eigs(i) = 1.0 - detail::uniform01(rng);
      const int neg = static_cast<int>(
          static_cast<std::int64_t>(spec.p) * n / 100);
      for (int i = 0; i < neg; ++i) eigs(i) = -eigs(i);
      inst.q_hat = spectrum_matrix(rng, n, eigs);
      break;
    }
    case Family::Sparse: {
      // draw the lower triangle and mirror so the stated density holds
      // for the symmetric result as well
      inst.q_hat = Matrix::Zero(n, n);
      const double density = spec.p / 100.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
          const double keep = detail::uniform01(rng);
          const double val =
              keep < density ? detail::uniform(rng, -1.0, 1.0) : 0.0;
          inst.q_hat(i, j) = inst.q_hat(j, i) = val;
        }
      }
      break;
    }
    case Family::LowRank: {
      Vector eigs = Vector::Zero(n);
      const int zeros = static_cast<int>(std::floor(spec.zero_fraction * n));
      for (int i = zeros; i < n; ++i) {
        double mag = 1.0 - detail::uniform01(rng);
        if (detail::uniform01(rng) < spec.p / 100.0) mag = -mag;
        eigs(i) = mag;
      }
      inst.q_hat = spectrum_matrix(rng, n, eigs);
      break;
    }
  }

  inst.l_hat = Vector(n);
  for (int i = 0; i < n; ++i) inst.l_hat(i) = detail::uniform(rng, -1.0, 1.0);
  inst.c_hat = 0.0;

  std::int64_t lo = spec.lo, hi = spec.hi;
  if (spec.domain == DomainKind::Ternary) {
    lo = -1;
    hi = 1;
  }
  inst.domains.assign(n, {lo, hi});

  switch (spec.constraint) {
    case ConstraintKind::None:
      break;
    case ConstraintKind::SumNonpositive:
      inst.linear_constraints.push_back({Vector::Ones(n), 0.0});
      break;
    case ConstraintKind::Knapsack: {
      Vector a(n);
      std::int64_t total = 0;
      for (int i = 0; i < n; ++i) {
        const std::int64_t ai = detail::uniform_int(rng, 1, 5);
        a(i) = static_cast<double>(ai);
        total += ai;
      }
      const std::int64_t b = detail::uniform_int(rng, 1, total);
      inst.linear_constraints.push_back({a, static_cast<double>(b)});
      break;
    }
  }

  inst.validate();
  return inst;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string format_instance(const IqpInstance& inst) {
  std::ostringstream out;
  out << "iqp/1\n";
  out << "n " << inst.n << "\n";
  for (const auto& [l, u] : inst.domains) {
    out << "dom " << l << " " << u << "\n";
  }
  out << "c " << fmt(inst.c_hat) << "\n";
  out << "l";
  for (int i = 0; i < inst.n; ++i) out << " " << fmt(inst.l_hat(i));
  out << "\n";
  for (int i = 0; i < inst.n; ++i) {
    out << "q";
    for (int j = 0; j <= i; ++j) out << " " << fmt(inst.q_hat(i, j));
    out << "\n";
  }
  for (const auto& lc : inst.linear_constraints) {
    out << "lin";
    for (int i = 0; i < inst.n; ++i) out << " " << fmt(lc.a(i));
    out << " <= " << fmt(lc.rhs) << "\n";
  }
  return out.str();
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;
  std::string current;

  explicit LineReader(const std::string& text) : in(text) {}

  // next non-empty, non-comment line; false at end of input
  bool next() {
    while (std::getline(in, current)) {
      ++line_no;
      std::size_t pos = current.find_first_not_of(" \t\r");
      if (pos == std::string::npos || current[pos] == '#') continue;
      return true;
    }
    return false;
  }
};

double parse_double(const std::string& tok, int line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  if (used != tok.size()) {
    throw ParseError("trailing characters in number '" + tok + "'", line);
  }
  return v;
}

std::int64_t parse_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
  if (used != tok.size()) {
    throw ParseError("trailing characters in integer '" + tok + "'", line);
  }
  return v;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

}  // namespace

IqpInstance parse_instance(const std::string& text) {
  LineReader rd(text);
  if (!rd.next() || tokens_of(rd.current) != std::vector<std::string>{"iqp/1"}) {
    throw ParseError("missing 'iqp/1' header", rd.line_no);
  }

  auto expect_line = [&](const char* what) {
    if (!rd.next()) throw ParseError(std::string("unexpected end of input, expected ") + what, rd.line_no);
    return tokens_of(rd.current);
  };

  auto toks = expect_line("'n <count>'");
  if (toks.size() != 2 || toks[0] != "n") {
    throw ParseError("expected 'n <count>'", rd.line_no);
  }
  IqpInstance inst;
  inst.n = static_cast<int>(parse_int(toks[1], rd.line_no));
  if (inst.n < 1) throw ParseError("variable count must be positive", rd.line_no);

  for (int i = 0; i < inst.n; ++i) {
    toks = expect_line("'dom <l> <u>'");
    if (toks.size() != 3 || toks[0] != "dom") {
      throw ParseError("expected 'dom <l> <u>'", rd.line_no);
    }
    inst.domains.emplace_back(parse_int(toks[1], rd.line_no),
                              parse_int(toks[2], rd.line_no));
  }

  toks = expect_line("'c <value>'");
  if (toks.size() != 2 || toks[0] != "c") {
    throw ParseError("expected 'c <value>'", rd.line_no);
  }
  inst.c_hat = parse_double(toks[1], rd.line_no);

  toks = expect_line("'l <v1> ... <vn>'");
  if (toks.size() != static_cast<std::size_t>(inst.n) + 1 || toks[0] != "l") {
    throw ParseError("expected 'l' with one value per variable", rd.line_no);
  }
  inst.l_hat = Vector(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    inst.l_hat(i) = parse_double(toks[i + 1], rd.line_no);
  }

  inst.q_hat = Matrix::Zero(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    toks = expect_line("'q' row");
    if (toks.size() != static_cast<std::size_t>(i) + 2 || toks[0] != "q") {
      throw ParseError("expected 'q' row with " + std::to_string(i + 1) +
                           " entries",
                       rd.line_no);
    }
    for (int j = 0; j <= i; ++j) {
      const double v = parse_double(toks[j + 1], rd.line_no);
      inst.q_hat(i, j) = inst.q_hat(j, i) = v;
    }
  }

  while (rd.next()) {
    toks = tokens_of(rd.current);
    if (toks.empty() || toks[0] != "lin") {
      throw ParseError("unexpected line, expected 'lin ... <= rhs'",
                       rd.line_no);
    }
    if (toks.size() != static_cast<std::size_t>(inst.n) + 3 ||
        toks[inst.n + 1] != "<=") {
      throw ParseError("expected 'lin a_1 ... a_n <= rhs'", rd.line_no);
    }
    LinearConstraint lc;
    lc.a = Vector(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      lc.a(i) = parse_double(toks[i + 1], rd.line_no);
    }
    lc.rhs = parse_double(toks[inst.n + 2], rd.line_no);
    inst.linear_constraints.push_back(std::move(lc));
  }

  try {
    inst.validate();
  } catch (const InvalidInstance& e) {
    throw ParseError(std::string("invalid instance: ") + e.what(), rd.line_no);
  }
  return inst;
}

void write_instance(const IqpInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << format_instance(inst);
  if (!out) throw std::runtime_error("write failed: " + path);
}

IqpInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

}  // namespace iqp
