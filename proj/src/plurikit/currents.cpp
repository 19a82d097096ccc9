#include "plurikit/currents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plurikit/errors.hpp"
#include "plurikit/forms.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

ConstForm ConstForm::kahler(int n) { return block_kahler(n, 0, n); }

ConstForm ConstForm::hermitian(const CMatrix& h) {
  require(h.rows() == h.cols(), "hermitian form needs a square matrix");
  return general(static_cast<int>(h.rows()), 1, h);
}

ConstForm ConstForm::block_kahler(int n, int begin, int end) {
  require(0 <= begin && begin < end && end <= n, "block_kahler: bad coordinate block");
  CMatrix h = CMatrix::Zero(n, n);
  for (int j = begin; j < end; ++j) h(j, j) = 1.0;
  return general(n, 1, h);
}

ConstForm ConstForm::general(int n, int k, CMatrix coefficients) {
  require(n >= 1 && n <= kMaxDim, "const form: dimension out of range");
  require(k >= 0 && k <= n, "const form: bidegree must satisfy 0 <= k <= n");
  const auto size = static_cast<Eigen::Index>(binomial(n, k));
  require(coefficients.rows() == size && coefficients.cols() == size,
          "const form: coefficient matrix must be binom(n,k) square");
  require(coefficients.allFinite(), "const form: coefficients must be finite");
  const double asym = (coefficients - coefficients.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(1.0, coefficients.cwiseAbs().maxCoeff()),
          "const form: coefficient matrix must be Hermitian");
  return ConstForm{n, k, std::move(coefficients)};
}

double ConstForm::block_trace(int begin, int end) const {
  const auto sets = combinations(n, k);
  double sum = 0.0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    const bool inside = std::all_of(sets[a].begin(), sets[a].end(),
                                    [&](int j) { return j >= begin && j < end; });
    if (inside) sum += coefficients(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  }
  return sum;
}

double ConstForm::lelong_coefficient() const {
  // T ^ beta^{n-k} = (n-k)! tr(H) dlambda / pi^n and beta^n = n! dlambda / pi^n
  return factorial(n - k) * block_trace(0, n) / factorial(n);
}

Current Current::zero_set(HoloFunction f) {
  const int n = f.n_vars();
  return Current(ZeroSet{std::move(f)}, n, 1);
}

Current Current::potential(PshFunction u) {
  const int n = u.n_vars();
  return Current(Potential{std::move(u)}, n, 1);
}

Current Current::const_form(ConstForm form) {
  const int n = form.n;
  const int k = form.k;
  return Current(std::move(form), n, k);
}

Current Current::nonneg_sum(const std::vector<std::pair<double, Current>>& terms) {
  require(!terms.empty(), "nonneg_sum needs at least one term");
  const int n = terms.front().second.ambient_dim();
  const int k = terms.front().second.bidegree();
  NonnegSum sum;
  for (const auto& [weight, current] : terms) {
    require(std::isfinite(weight) && weight >= 0.0, "nonneg_sum weights must be finite and >= 0");
    require(current.ambient_dim() == n && current.bidegree() == k,
            "nonneg_sum members must share dimension and bidegree");
    sum.terms.push_back({weight, std::make_shared<const Current>(current)});
  }
  return Current(std::move(sum), n, k);
}

std::string Current::kind() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) return "zero_set";
        else if constexpr (std::is_same_v<V, Potential>) return "potential";
        else if constexpr (std::is_same_v<V, ConstForm>) return "const_form";
        else return "nonneg_sum";
      },
      data_);
}

namespace {

bool minus_infinity_everywhere(const PshFunction& u) {
  const int n = u.n_vars();
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int i = 0; i < 12; ++i) {
    Stream stream(0x5EED5EEDULL, static_cast<std::uint64_t>(i));
    for (auto& c : z) c = stream.complex_normal();
    const double value = u(std::span<const Complex>(z));
    if (!(value == -std::numeric_limits<double>::infinity())) return false;
  }
  return true;
}

ConstForm pullback(const ConstForm& form, const CMatrix& map) {
  const int q = static_cast<int>(map.cols());
  const CMatrix c = compound(map, form.k);
  CMatrix h = c.transpose() * form.coefficients * c.conjugate();
  h = (h + h.adjoint()) / 2.0;
  return ConstForm{q, form.k, std::move(h)};
}

}  // namespace

Current restrict_affine(const Current& current, const CMatrix& map, const CVector& offset) {
  require(map.rows() == current.ambient_dim(), "restriction: map rows must equal ambient dimension");
  const int q = static_cast<int>(map.cols());
  require(current.bidimension() + q >= current.ambient_dim(),
          "restriction needs p + q >= n (bidimension " + std::to_string(current.bidimension()) +
              ", q " + std::to_string(q) + ")");
  return std::visit(
      [&](const auto& v) -> Current {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) {
          HoloFunction g = v.f.compose_affine(map, offset);
          if (is_identically_zero(g))
            throw DegenerateSlice("restricted function vanishes identically: subspace lies in the zero set");
          return Current::zero_set(std::move(g));
        } else if constexpr (std::is_same_v<V, Potential>) {
          PshFunction u = v.u.compose_affine(map, offset);
          if (minus_infinity_everywhere(u))
            throw DegenerateSlice("restricted potential is -inf: subspace lies in its polar set");
          return Current::potential(std::move(u));
        } else if constexpr (std::is_same_v<V, ConstForm>) {
          return Current::const_form(pullback(v, map));
        } else {
          std::vector<std::pair<double, Current>> terms;
          for (const auto& t : v.terms) terms.emplace_back(t.weight, restrict_affine(*t.current, map, offset));
          return Current::nonneg_sum(terms);
        }
      },
      current.variant());
}

Current restrict_current(const Current& current, const Frame& frame) {
  require(frame.ambient_dim() == current.ambient_dim(), "restriction: frame ambient dimension mismatch");
  return restrict_affine(current, frame.matrix(), CVector::Zero(frame.ambient_dim()));
}

namespace {

// T ^ (i a_1 ^ abar_1) ^ ... ^ (i a_p ^ abar_p) for a (k,k) constant form,
// up to a positive normalization. a is n x p.
double const_form_pairing(const ConstForm& form, const CMatrix& a) {
  const int n = form.n;
  const int k = form.k;
  const auto sets = combinations(n, k);
  CVector y(static_cast<Eigen::Index>(sets.size()));
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& index = sets[s];
    std::vector<int> complement;
    int parity = 0;
    for (int i = 0; i < k; ++i) parity += index[static_cast<std::size_t>(i)] - i;
    for (int j = 0; j < n; ++j)
      if (std::find(index.begin(), index.end(), j) == index.end()) complement.push_back(j);
    Complex det{1.0, 0.0};
    if (!complement.empty()) {
      CMatrix minor(static_cast<Eigen::Index>(complement.size()), a.cols());
      for (std::size_t r = 0; r < complement.size(); ++r) minor.row(static_cast<Eigen::Index>(r)) = a.row(complement[r]);
      det = minor.determinant();
    }
    y(static_cast<Eigen::Index>(s)) = (parity % 2 == 0 ? 1.0 : -1.0) * det;
  }
  return (y.transpose() * form.coefficients * y.conjugate())(0, 0).real();
}

PositivityReport check_form(const ConstForm& form, std::size_t samples, std::uint64_t seed) {
  PositivityReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  const int p = form.n - form.k;
  const double scale = std::max(1.0, form.coefficients.cwiseAbs().maxCoeff());
  for (std::size_t s = 0; s < samples; ++s) {
    Stream stream(seed, s);
    CMatrix a(form.n, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < form.n; ++i) a(i, j) = stream.complex_normal();
    const double value = const_form_pairing(form, a);
    report.min_value = std::min(report.min_value, value);
    if (value < -1e-12 * scale && report.positive) {
      report.positive = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "const form pairing " << value << " < 0 for covector sample " << s;
      report.witness = msg.str();
    }
  }
  return report;
}

PositivityReport check_potential(const PshFunction& u, std::size_t samples, std::uint64_t seed) {
  PositivityReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  const int n = u.n_vars();
  CVector z(n);
  for (std::size_t s = 0; s < samples; ++s) {
    unit_ball_point(seed, s, std::span<Complex>(z.data(), static_cast<std::size_t>(n)));
    z *= 3.0;
    if (!std::isfinite(u(z))) continue;
    const CMatrix h = complex_hessian(u, z);
    const CMatrix herm = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().cwiseAbs().maxCoeff();
    report.min_value = std::min(report.min_value, lo);
    if (lo < -1e-6 * std::max(1.0, hi) && report.positive) {
      report.positive = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "complex Hessian eigenvalue " << lo << " < 0 at sample " << s;
      report.witness = msg.str();
    }
  }
  return report;
}

}  // namespace

PositivityReport positivity_check(const Current& current, std::size_t sample_count, std::uint64_t seed) {
  require(sample_count >= 1, "positivity_check needs at least one sample");
  return std::visit(
      [&](const auto& v) -> PositivityReport {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) {
          return PositivityReport{true, 0.0, {}};  // Lelong-Poincare
        } else if constexpr (std::is_same_v<V, Potential>) {
          return check_potential(v.u, sample_count, seed);
        } else if constexpr (std::is_same_v<V, ConstForm>) {
          return check_form(v, sample_count, seed);
        } else {
          PositivityReport total;
          total.min_value = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < v.terms.size(); ++i) {
            const auto& t = v.terms[i];
            if (t.weight == 0.0) continue;
            const auto part = positivity_check(*t.current, sample_count, derive_seed(seed, i));
            total.min_value = std::min(total.min_value, t.weight * part.min_value);
            if (!part.positive && total.positive) {
              total.positive = false;
              total.witness = "term " + std::to_string(i) + ": " + part.witness;
            }
          }
          return total;
        }
      },
      current.variant());
}

}  // namespace plurikit
