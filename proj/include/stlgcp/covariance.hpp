#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stlgcp {

/// C(r,h) = sigma2 * exp(-r/alpha) * exp(-h/beta).
struct SeparableExponentialParams {
    double sigma2 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

/// Gneiting family with d = 2:
///   C(r,h) = sigma2 / ((h/beta)^gamma_t + 1)^(delta/gamma_t)
///            * exp( -(r/alpha)^gamma_s / ((h/beta)^gamma_t + 1)^(delta/(2 gamma_t)) ).
struct GneitingParams {
    double sigma2 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma_s = 1.0;  // in (0, 2]
    double gamma_t = 1.0;  // in (0, 2]
    double delta = 1.0;    // in (0, 2]
};

class CovarianceModel {
  public:
    CovarianceModel() : v_(SeparableExponentialParams{}) {}
    explicit CovarianceModel(SeparableExponentialParams p);
    explicit CovarianceModel(GneitingParams p);

    bool is_separable() const { return std::holds_alternative<SeparableExponentialParams>(v_); }
    const SeparableExponentialParams& separable() const;
    const GneitingParams& gneiting() const;

    double sigma2() const;
    std::string family_name() const;  // "sep_exp" | "gneiting"

  private:
    std::variant<SeparableExponentialParams, GneitingParams> v_;
};

/// Covariance of the GRF at spatial distance r and time lag h; always in (0, sigma2].
double cov_eval(const CovarianceModel& m, double r, double h);

/// Theoretical pair correlation of the LGCP: g(r,h) = exp(C(r,h)).
double pcf_theoretical(const CovarianceModel& m, double r, double h);

/// Bijection between a model and an unconstrained real vector: log transform for
/// sigma2/alpha/beta, logit scaled to (0,2] for the gamma and delta exponents
/// (values at the upper boundary are clamped to 2 - 1e-9 before packing).
std::vector<double> pack_params(const CovarianceModel& m);
CovarianceModel unpack_params(const std::string& family, const std::vector<double>& packed);

/// JSON round trip with keys model/sigma2/alpha/beta[/gamma_s/gamma_t/delta].
std::string model_to_json(const CovarianceModel& m);
CovarianceModel model_from_json(const std::string& json_text);

}  // namespace stlgcp
