#include "qfc/dispersion.hpp"

#include "qfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfc {

namespace {

std::string range_message(const DispersionProvider& p, double lambda_nm, std::string_view what) {
  std::ostringstream os;
  os.precision(10);
  os << what << ": wavelength " << lambda_nm << " nm outside valid range [" << p.min_nm() << ", "
     << p.max_nm() << "] nm";
  return os.str();
}

// Derivative at node i of the Lagrange polynomial through up to five nodes
// centred on i.
double lagrange_node_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const std::size_t n = x.size();
  const std::size_t width = std::min<std::size_t>(5, n);
  std::size_t lo = i >= 2 ? i - 2 : 0;
  if (lo + width > n) lo = n - width;
  const std::size_t hi = lo + width;

  double slope = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    // l_j'(x_i)
    double deriv = 0.0;
    if (j == i) {
      for (std::size_t m = lo; m < hi; ++m)
        if (m != i) deriv += 1.0 / (x[i] - x[m]);
    } else {
      double num = 1.0;
      double den = 1.0;
      for (std::size_t m = lo; m < hi; ++m) {
        if (m == j) continue;
        den *= x[j] - x[m];
        if (m != i) num *= x[i] - x[m];
      }
      deriv = num / den;
    }
    slope += y[j] * deriv;
  }
  return slope;
}

std::vector<double> hermite_slopes(const TabulatedModel& t) {
  const auto& x = t.wavelength_nm;
  const auto& y = t.index;
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = lagrange_node_slope(x, y, i);

  // Fritsch-Carlson limiter; inactive on smooth monotone data.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double secant = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    if (secant == 0.0) {
      d[k] = d[k + 1] = 0.0;
      continue;
    }
    if (d[k] * secant < 0.0) d[k] = 0.0;
    if (d[k + 1] * secant < 0.0) d[k + 1] = 0.0;
    const double alpha = d[k] / secant;
    const double beta = d[k + 1] / secant;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d[k] = tau * alpha * secant;
      d[k + 1] = tau * beta * secant;
    }
  }
  return d;
}

double eval_sellmeier(const SellmeierModel& m, double lambda_nm) {
  const double l2 = (lambda_nm * 1e-3) * (lambda_nm * 1e-3);
  double n2 = m.a - m.d * l2;
  for (std::size_t k = 0; k < m.b.size(); ++k) n2 += m.b[k] / (l2 - m.c[k]);
  return n2 > 0.0 ? std::sqrt(n2) : std::nan("");
}

double eval_polynomial(const PolynomialModel& m, double lambda_nm) {
  const double x = lambda_nm - m.reference_nm;
  double acc = 0.0;
  for (auto it = m.coefficients.rbegin(); it != m.coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double eval_table(const TabulatedModel& t, const std::vector<double>& slopes, double lambda_nm) {
  const auto& x = t.wavelength_nm;
  const auto& y = t.index;
  auto it = std::upper_bound(x.begin(), x.end(), lambda_nm);
  std::size_t k = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  if (k + 1 >= x.size()) k = x.size() - 2;
  if (lambda_nm == x[k]) return y[k];
  const double h = x[k + 1] - x[k];
  const double s = (lambda_nm - x[k]) / h;
  if (t.order == 1) return y[k] + s * (y[k + 1] - y[k]);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y[k] + h10 * h * slopes[k] + h01 * y[k + 1] + h11 * h * slopes[k + 1];
}

}  // namespace

SellmeierModel SellmeierModel::from_resonance_form(const std::vector<double>& strengths,
                                                   const std::vector<double>& poles_um2) {
  if (strengths.size() != poles_um2.size())
    throw InvalidArgument("Sellmeier strengths and poles differ in length");
  SellmeierModel m;
  m.a = 1.0;
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    // A lambda^2 / (lambda^2 - B) = A + A B / (lambda^2 - B)
    m.a += strengths[k];
    m.b.push_back(strengths[k] * poles_um2[k]);
    m.c.push_back(poles_um2[k]);
  }
  return m;
}

DispersionProvider::DispersionProvider(Model model, double min_nm, double max_nm, std::string axis)
    : model_(std::move(model)), min_nm_(min_nm), max_nm_(max_nm), axis_(std::move(axis)) {
  if (const auto* t = std::get_if<TabulatedModel>(&model_)) {
    if (t->wavelength_nm.size() != t->index.size() || t->wavelength_nm.size() < 2)
      throw InvalidArgument("dispersion table needs at least two (wavelength, index) pairs");
    for (std::size_t i = 1; i < t->wavelength_nm.size(); ++i)
      if (!(t->wavelength_nm[i] > t->wavelength_nm[i - 1]))
        throw InvalidArgument("dispersion table wavelengths must be strictly increasing");
    if (t->order != 1 && t->order != 3)
      throw InvalidArgument("dispersion table interpolation order must be 1 or 3");
    if (t->order == 3) node_slopes_ = hermite_slopes(*t);
  }
  validate();
}

DispersionProvider DispersionProvider::sellmeier(SellmeierModel model, double min_nm, double max_nm,
                                                 std::string axis) {
  if (model.b.size() != model.c.size())
    throw InvalidArgument("Sellmeier b and c coefficient lists differ in length");
  return DispersionProvider(std::move(model), min_nm, max_nm, std::move(axis));
}

DispersionProvider DispersionProvider::tabulated(TabulatedModel model, std::string axis) {
  if (model.wavelength_nm.empty()) throw InvalidArgument("empty dispersion table");
  const double lo = model.wavelength_nm.front();
  const double hi = model.wavelength_nm.back();
  return DispersionProvider(std::move(model), lo, hi, std::move(axis));
}

DispersionProvider DispersionProvider::polynomial(PolynomialModel model, double min_nm, double max_nm,
                                                  std::string axis) {
  if (model.coefficients.empty()) throw InvalidArgument("polynomial dispersion needs coefficients");
  return DispersionProvider(std::move(model), min_nm, max_nm, std::move(axis));
}

DispersionProvider DispersionProvider::constant(double n, double min_nm, double max_nm) {
  return polynomial(PolynomialModel{{n}, 0.0}, min_nm, max_nm);
}

DispersionKind DispersionProvider::kind() const {
  return static_cast<DispersionKind>(model_.index());
}

double DispersionProvider::evaluate(double lambda_nm) const {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SellmeierModel>) return eval_sellmeier(m, lambda_nm);
        else if constexpr (std::is_same_v<M, PolynomialModel>) return eval_polynomial(m, lambda_nm);
        else return eval_table(m, node_slopes_, lambda_nm);
      },
      model_);
}

void DispersionProvider::validate() const {
  if (!(min_nm_ > 0.0) || !(max_nm_ >= min_nm_))
    throw InvalidArgument("dispersion valid range must be a non-empty interval of positive wavelengths");
  constexpr int kSamples = 2001;
  for (int k = 0; k < kSamples; ++k) {
    const double lambda = min_nm_ + (max_nm_ - min_nm_) * k / (kSamples - 1);
    const double n = evaluate(lambda);
    if (!(n > 1.0)) {
      std::ostringstream os;
      os << "dispersion model gives n = " << n << " <= 1 at " << lambda << " nm";
      throw InvalidArgument(os.str());
    }
  }
  if (const auto* t = std::get_if<TabulatedModel>(&model_))
    for (double n : t->index)
      if (!(n > 1.0)) throw InvalidArgument("dispersion table contains n <= 1");
}

double refractive_index(const DispersionProvider& provider, double lambda_nm) {
  if (!provider.contains(lambda_nm)) throw RangeError(range_message(provider, lambda_nm, "refractive_index"));
  return provider.evaluate(lambda_nm);
}

ArrayXd refractive_index(const DispersionProvider& provider, const ArrayXd& lambda_nm) {
  return lambda_nm.unaryExpr([&](double l) { return refractive_index(provider, l); });
}

double group_index(const DispersionProvider& provider, double lambda_nm) {
  const double h = group_index_step(lambda_nm);
  if (lambda_nm - h < provider.min_nm() || lambda_nm + h > provider.max_nm()) {
    throw RangeError(range_message(provider, lambda_nm, "group_index") +
                     " (needs +/- " + std::to_string(h) + " nm for differencing)");
  }
  const double slope = (provider.evaluate(lambda_nm + h) - provider.evaluate(lambda_nm - h)) / (2.0 * h);
  return provider.evaluate(lambda_nm) - lambda_nm * slope;
}

double propagation_constant(const DispersionProvider& provider, double lambda_nm) {
  return kTwoPi * refractive_index(provider, lambda_nm) / (lambda_nm * 1e-3);
}

double inverse_group_velocity(const DispersionProvider& provider, double lambda_nm) {
  return group_index(provider, lambda_nm) / (kSpeedOfLight * 1e6);
}

double pump_wavelength_for(double signal_nm, double idler_nm) {
  const double inv = 1.0 / idler_nm - 1.0 / signal_nm;
  if (!(inv > 0.0))
    throw InvalidArgument("idler must be blue of the signal for sum-frequency generation");
  return 1.0 / inv;
}

BandTriple BandTriple::from_signal_idler(double signal_nm, double idler_nm, DispersionProvider pump,
                                         DispersionProvider signal, DispersionProvider idler) {
  BandTriple b{pump_wavelength_for(signal_nm, idler_nm), signal_nm, idler_nm,
               std::move(pump), std::move(signal), std::move(idler)};
  if (std::abs(1.0 / b.pump_nm + 1.0 / b.signal_nm - 1.0 / b.idler_nm) > 1e-9)
    throw InvalidArgument("band triple violates energy conservation");
  return b;
}

const DispersionProvider& BandTriple::provider(Band band) const {
  switch (band) {
    case Band::Pump: return pump;
    case Band::Signal: return signal;
    case Band::Idler: return idler;
  }
  return signal;
}

double BandTriple::wavelength(Band band) const {
  switch (band) {
    case Band::Pump: return pump_nm;
    case Band::Signal: return signal_nm;
    case Band::Idler: return idler_nm;
  }
  return signal_nm;
}

}  // namespace qfc
