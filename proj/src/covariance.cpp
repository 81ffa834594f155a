#include "stlgcp/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace stlgcp {

namespace {

constexpr double kExponentCap = 700.0;
constexpr double kUpperClamp = 2.0 - 1e-9;

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be strictly positive and finite");
}

void check_exponent(double v, const char* name) {
    if (!(v > 0.0) || !(v <= 2.0))
        throw std::invalid_argument(std::string(name) + " must lie in (0, 2]");
}

void validate(const SeparableExponentialParams& p) {
    check_positive(p.sigma2, "sigma2");
    check_positive(p.alpha, "alpha");
    check_positive(p.beta, "beta");
}

void validate(const GneitingParams& p) {
    check_positive(p.sigma2, "sigma2");
    check_positive(p.alpha, "alpha");
    check_positive(p.beta, "beta");
    check_exponent(p.gamma_s, "gamma_s");
    check_exponent(p.gamma_t, "gamma_t");
    check_exponent(p.delta, "delta");
}

double logit_02(double v) {
    const double c = std::min(v, kUpperClamp);
    return std::log(c / (2.0 - c));
}

double inv_logit_02(double x) { return 2.0 / (1.0 + std::exp(-x)); }

}  // namespace

CovarianceModel::CovarianceModel(SeparableExponentialParams p) : v_(p) { validate(p); }

CovarianceModel::CovarianceModel(GneitingParams p) : v_(p) { validate(p); }

const SeparableExponentialParams& CovarianceModel::separable() const {
    if (!is_separable()) throw std::logic_error("model is not separable-exponential");
    return std::get<SeparableExponentialParams>(v_);
}

const GneitingParams& CovarianceModel::gneiting() const {
    if (is_separable()) throw std::logic_error("model is not Gneiting");
    return std::get<GneitingParams>(v_);
}

double CovarianceModel::sigma2() const {
    return is_separable() ? separable().sigma2 : gneiting().sigma2;
}

std::string CovarianceModel::family_name() const {
    return is_separable() ? "sep_exp" : "gneiting";
}

double cov_eval(const CovarianceModel& m, double r, double h) {
    if (r < 0.0 || h < 0.0) throw std::invalid_argument("cov_eval: r and h must be >= 0");
    if (m.is_separable()) {
        const auto& p = m.separable();
        return p.sigma2 * std::exp(-r / p.alpha) * std::exp(-h / p.beta);
    }
    const auto& p = m.gneiting();
    const double psi1 = std::pow(h / p.beta, p.gamma_t) + 1.0;  // psi(h) + 1
    const double temporal = std::pow(psi1, p.delta / p.gamma_t);
    const double shrink = std::pow(psi1, p.delta / (2.0 * p.gamma_t));
    return p.sigma2 / temporal * std::exp(-std::pow(r / p.alpha, p.gamma_s) / shrink);
}

double pcf_theoretical(const CovarianceModel& m, double r, double h) {
    const double c = cov_eval(m, r, h);
    if (c > kExponentCap)
        throw std::range_error("pcf_theoretical: covariance exceeds the exponent cap");
    return std::exp(c);
}

std::vector<double> pack_params(const CovarianceModel& m) {
    if (m.is_separable()) {
        const auto& p = m.separable();
        return {std::log(p.sigma2), std::log(p.alpha), std::log(p.beta)};
    }
    const auto& p = m.gneiting();
    return {std::log(p.sigma2), std::log(p.alpha),    std::log(p.beta),
            logit_02(p.gamma_s), logit_02(p.gamma_t), logit_02(p.delta)};
}

CovarianceModel unpack_params(const std::string& family, const std::vector<double>& packed) {
    for (double v : packed)
        if (!std::isfinite(v)) throw std::invalid_argument("unpack_params: non-finite component");
    if (family == "sep_exp") {
        if (packed.size() != 3) throw std::invalid_argument("unpack_params: expected 3 components");
        return CovarianceModel(SeparableExponentialParams{
            std::exp(packed[0]), std::exp(packed[1]), std::exp(packed[2])});
    }
    if (family == "gneiting") {
        if (packed.size() != 6) throw std::invalid_argument("unpack_params: expected 6 components");
        return CovarianceModel(GneitingParams{std::exp(packed[0]), std::exp(packed[1]),
                                              std::exp(packed[2]), inv_logit_02(packed[3]),
                                              inv_logit_02(packed[4]), inv_logit_02(packed[5])});
    }
    throw std::invalid_argument("unpack_params: unknown family " + family);
}

std::string model_to_json(const CovarianceModel& m) {
    nlohmann::json j;
    j["model"] = m.family_name();
    if (m.is_separable()) {
        const auto& p = m.separable();
        j["sigma2"] = p.sigma2;
        j["alpha"] = p.alpha;
        j["beta"] = p.beta;
    } else {
        const auto& p = m.gneiting();
        j["sigma2"] = p.sigma2;
        j["alpha"] = p.alpha;
        j["beta"] = p.beta;
        j["gamma_s"] = p.gamma_s;
        j["gamma_t"] = p.gamma_t;
        j["delta"] = p.delta;
    }
    return j.dump(2);
}

CovarianceModel model_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    const std::string family = j.at("model").get<std::string>();
    if (family == "sep_exp") {
        return CovarianceModel(SeparableExponentialParams{
            j.at("sigma2").get<double>(), j.at("alpha").get<double>(), j.at("beta").get<double>()});
    }
    if (family == "gneiting") {
        GneitingParams p;
        p.sigma2 = j.at("sigma2").get<double>();
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.gamma_s = j.value("gamma_s", 1.0);
        p.gamma_t = j.value("gamma_t", 1.0);
        p.delta = j.at("delta").get<double>();
        return CovarianceModel(p);
    }
    throw std::invalid_argument("model_from_json: unknown family " + family);
}

}  // namespace stlgcp
