#ifndef UAVCOV_QUALITY_HPP
#define UAVCOV_QUALITY_HPP

#include "uavcov/image.hpp"

#include <string>
#include <vector>

namespace uavcov::quality {

enum class Metric { Psnr, Ssim };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

// Image-specific rate-density to quality mapping.  thresholds[k] is the
// lower edge of the bucket whose quality is qualities[k]; a rate density
// below thresholds[0] maps to 0.
struct QualityModel {
    std::vector<double> thresholds; // ascending, bits/s/Hz per m^2
    std::vector<double> qualities;  // nondecreasing, last entry exactly 1
    double cap = 50.0;              // PSNR normalizer, dB
};

std::vector<double> default_rate_thresholds();

constexpr double kDefaultPsnrCap = 50.0;

// Builds the model from the reference image: for PSNR the bucket quality is
// min(psnr(quantize(img,b), img), cap)/cap; for SSIM it is the raw SSIM
// score.  Validates strictly increasing thresholds, nondecreasing qualities,
// and a top bucket of exactly 1.
QualityModel build_quality_model(const img::GrayImage& image, Metric metric, double cap,
                                 const std::vector<double>& thresholds);

// rho = rate/side^2; returns 0 below the first threshold, otherwise the
// quality of the largest bucket whose lower edge does not exceed rho.
double map_rate_to_quality(const QualityModel& model, double rate, double side);

} // namespace uavcov::quality

#endif
