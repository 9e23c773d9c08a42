#include "uavcov/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavcov::quality {

Metric parse_metric(const std::string& name) {
    if (name == "psnr") return Metric::Psnr;
    if (name == "ssim") return Metric::Ssim;
    throw std::invalid_argument("unknown quality metric: " + name);
}

std::string metric_name(Metric metric) {
    return metric == Metric::Psnr ? "psnr" : "ssim";
}

std::vector<double> default_rate_thresholds() {
    return {0.001, 0.002, 0.004, 0.008, 0.016, 0.032, 0.064, 0.128};
}

QualityModel build_quality_model(const img::GrayImage& image, Metric metric, double cap,
                                 const std::vector<double>& thresholds) {
    if (thresholds.size() != 8) throw std::invalid_argument("quality model needs exactly 8 thresholds");
    for (std::size_t k = 1; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > thresholds[k - 1]))
            throw std::invalid_argument("rate thresholds must be strictly increasing");
    }
    if (!(thresholds.front() > 0.0)) throw std::invalid_argument("rate thresholds must be positive");
    if (!(cap > 0.0)) throw std::invalid_argument("psnr cap must be positive");

    QualityModel model;
    model.thresholds = thresholds;
    model.cap = cap;
    model.qualities.resize(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        const int bits = static_cast<int>(k) + 1;
        const img::GrayImage quantized = img::quantize(image, bits);
        if (metric == Metric::Psnr) {
            model.qualities[k] = std::min(img::psnr(quantized, image), cap) / cap;
        } else {
            model.qualities[k] = img::ssim(quantized, image);
        }
    }
    for (std::size_t k = 1; k < model.qualities.size(); ++k) {
        if (model.qualities[k] < model.qualities[k - 1])
            throw std::runtime_error("quality model not nondecreasing in bit depth for this image");
    }
    if (model.qualities.back() != 1.0)
        throw std::runtime_error("quality model top bucket is not exactly 1");
    return model;
}

double map_rate_to_quality(const QualityModel& model, double rate, double side) {
    if (!(side > 0.0)) throw std::invalid_argument("map_rate_to_quality: side must be positive");
    const double rho = rate / (side * side);
    if (rho < model.thresholds.front()) return 0.0;
    std::size_t bucket = 0;
    for (std::size_t k = 0; k < model.thresholds.size(); ++k) {
        if (model.thresholds[k] <= rho) bucket = k;
    }
    return model.qualities[bucket];
}

} // namespace uavcov::quality
