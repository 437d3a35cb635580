#include <cmath>
#include <limits>
#include <stdexcept>

#include "tilegp/kernel.hpp"

namespace tilegp {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Odd Taylor coefficients of 1/Gamma(1+t), i.e. g1(mu) = -(cc0 + cc1*mu^2 +
// cc2*mu^4 + ...) for the Temme coefficient g1 = (1/G(1-mu) - 1/G(1+mu))/(2mu).
// Used for |mu| <= 0.1 where the direct quotient cancels.
constexpr double kG1Series[8] = {
    0.57721566490153286,   -0.042002635034095236, -0.042197734555544337,
    0.0072189432466630995, -0.00021524167411495098, -2.0134854780788239e-05,
    1.1330272319816959e-06, 6.1160951044814158e-09};

struct OrderCache {
  int m = 0;        // nu = mu + m
  double mu = 0.0;  // |mu| <= 1/2
  double mu2 = 0.0;
  double g1 = 0.0, g2 = 0.0, fc = 1.0;  // Temme's coefficients for this mu
  double p0 = 0.0, q0 = 0.0;            // Gamma(1+mu)/2 and Gamma(1-mu)/2
};

OrderCache make_order_cache(double nu) {
  OrderCache c;
  c.m = static_cast<int>(std::lround(nu));
  c.mu = nu - c.m;
  c.mu2 = c.mu * c.mu;
  const double t1 = 1.0 / std::tgamma(1.0 - c.mu);
  const double t2 = 1.0 / std::tgamma(1.0 + c.mu);
  if (std::fabs(c.mu) > 0.1) {
    c.g1 = (t1 - t2) / (2.0 * c.mu);
  } else {
    double s = 0.0, mp = 1.0;
    for (double coef : kG1Series) {
      s += coef * mp;
      mp *= c.mu2;
    }
    c.g1 = -s;
  }
  c.g2 = 0.5 * (t1 + t2);
  const double pimu = kPi * c.mu;
  c.fc = (std::fabs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
  c.p0 = 0.5 / t2;
  c.q0 = 0.5 / t1;
  return c;
}

// Temme's series: K_mu(x) and K_{mu+1}(x) for 0 < x <= 2, |mu| <= 1/2.
void k_pair_series(const OrderCache& c, double x, double& kmu, double& kmu1) {
  const double lrx = std::log(2.0 / x);
  const double e = c.mu * lrx;
  const double smu = (std::fabs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
  double f = c.fc * (c.g1 * std::cosh(e) + c.g2 * lrx * smu);
  const double ex = std::exp(e);  // (2/x)^mu
  double p = c.p0 * ex;
  double q = c.q0 / ex;
  const double cx = 0.25 * x * x;
  double ck = 1.0, ak = 1.0, bk = 1.0;
  double s1 = f, s2 = p;
  for (int it = 0; it < 80; ++it) {
    f = (ak * f + p + q) / (bk - c.mu2);
    p /= (ak - c.mu);
    q /= (ak + c.mu);
    ck *= cx / ak;
    const double d1 = ck * f;
    s1 += d1;
    const double d2 = ck * (p - ak * f);
    s2 += d2;
    bk += 2.0 * ak + 1.0;
    ak += 1.0;
    if (std::fabs(d1) < kEps * std::fabs(s1) && std::fabs(d2) < kEps * std::fabs(s2)) {
      kmu = s1;
      kmu1 = s2 * (2.0 / x);
      return;
    }
  }
  throw std::runtime_error("bessel_k: series failed to converge");
}

// Thompson-Barnett CF2: e^x K_mu(x) and e^x K_{mu+1}(x) for x > 2, |mu| <= 1/2.
void k_pair_cf2_scaled(double mu, double mu2, double x, double& kmu, double& kmu1) {
  double a = mu2 - 0.25;
  double b = 2.0 * (x + 1.0);
  double d = 1.0 / b;
  double f = d, delta = d;
  double prev = 0.0, current = 1.0;
  double q = -a, cc = -a;
  double s = 1.0 + q * delta;
  bool done = false;
  for (int k = 2; k < 200; ++k) {
    a -= 2.0 * (k - 1);
    b += 2.0;
    d = 1.0 / (b + a * d);
    delta = (b * d - 1.0) * delta;
    f += delta;
    const double qn = (prev - (b - 2.0) * current) / a;
    prev = current;
    current = qn;
    cc *= -a / k;
    q += cc * qn;
    s += q * delta;
    if (std::fabs(q * delta) < kEps * std::fabs(s)) {
      done = true;
      break;
    }
  }
  if (!done) throw std::runtime_error("bessel_k: continued fraction failed to converge");
  kmu = std::sqrt(kPi / (2.0 * x)) / s;
  kmu1 = kmu * (mu + x + 0.5 + (mu2 - 0.25) * f) / x;
}

BesselKResult kv_impl(const OrderCache& c, double x) {
  double k0, k1;
  const bool scaled = x > 2.0;
  if (scaled)
    k_pair_cf2_scaled(c.mu, c.mu2, x, k0, k1);
  else
    k_pair_series(c, x, k0, k1);

  // K_{mu+i+1} = 2(mu+i)/x K_{mu+i} + K_{mu+i-1}; stable upward in the order.
  for (int i = 1; i < c.m; ++i) {
    const double kn = k0 + (2.0 * (c.mu + i) / x) * k1;
    k0 = k1;
    k1 = kn;
  }
  double v = (c.m == 0) ? k0 : k1;
  if (scaled) {
    v *= std::exp(-x);
    if (v == 0.0) return {0.0, true};
  }
  return {v, false};
}

}  // namespace

BesselKResult bessel_k_ex(double nu, double x) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::domain_error("bessel_k: order must be positive");
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("bessel_k: argument must be positive");
  if (x > 750.0) return {0.0, true};  // e^-x is already past the double range
  return kv_impl(make_order_cache(nu), x);
}

double bessel_k(double nu, double x) { return bessel_k_ex(nu, x).value; }

void MaternParams::validate() const {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) throw std::domain_error("sigma_sq must be positive and finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::domain_error("beta must be positive and finite");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::domain_error("nu must be positive and finite");
}

void ParamBounds::validate() const {
  if (lower.size() != 3 || upper.size() != 3) throw std::invalid_argument("bounds must have 3 entries");
  for (int i = 0; i < 3; ++i) {
    if (!(lower[i] > 0.0) || !std::isfinite(upper[i]) || lower[i] > upper[i])
      throw std::invalid_argument("bounds require 0 < lower <= upper, finite");
  }
}

MaternEvaluator::MaternEvaluator(const MaternParams& params) : params_(params) {
  params_.validate();
  inv_beta_ = 1.0 / params_.beta;
  // Gamma(nu) through lgamma keeps the constant finite up to the search
  // bound on nu.
  front_ = params_.sigma_sq * std::exp((1.0 - params_.nu) * 0.6931471805599453 - std::lgamma(params_.nu));
  const OrderCache c = make_order_cache(params_.nu);
  m_ = c.m;
  mu_ = c.mu;
  mu2_ = c.mu2;
  g1_ = c.g1;
  g2_ = c.g2;
  fc_ = c.fc;
  p0_ = c.p0;
  q0_ = c.q0;
}

double MaternEvaluator::kv(double x) const {
  OrderCache c;
  c.m = m_;
  c.mu = mu_;
  c.mu2 = mu2_;
  c.g1 = g1_;
  c.g2 = g2_;
  c.fc = fc_;
  c.p0 = p0_;
  c.q0 = q0_;
  return kv_impl(c, x).value;
}

double MaternEvaluator::operator()(double d) const {
  if (d == 0.0) return params_.sigma_sq;
  const double t = d * inv_beta_;
  if (t > 700.0) return 0.0;  // far field: K_nu underflows, keep exact zero
  return front_ * std::pow(t, params_.nu) * kv(t);
}

double matern(double d, const MaternParams& params) { return MaternEvaluator(params)(d); }

}  // namespace tilegp
