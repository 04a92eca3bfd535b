#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uvc {

struct RdPoint {
  double kbps = 0.0;
  double psnr = 0.0;
};

// Rate-distortion curve: >= 4 points, bitrate strictly ascending. PSNR is
// expected to rise with bitrate; a violation is reported as a warning string
// rather than an error.
struct RdCurve {
  std::vector<RdPoint> points;
};

// Throws std::invalid_argument on hard violations (< 4 points, bitrate not
// strictly ascending, non-positive bitrate); returns a warning message for
// soft ones ("" when clean).
std::string validate_rd_curve(const RdCurve& curve);

// Bjontegaard rate delta in percent (negative = the test curve spends fewer
// bits): monotone piecewise-cubic-Hermite interpolation of log10(bitrate)
// over PSNR, averaged over the common PSNR interval by exact integration of
// the piecewise cubic. Requires strictly increasing PSNR per curve and a
// non-empty overlap.
double bd_rate(const RdCurve& anchor, const RdCurve& test);

// Classic variant fitted with one least-squares cubic per curve; reported
// alongside bd_rate for comparison.
double bd_rate_cubic(const RdCurve& anchor, const RdCurve& test);

// The 6:1:1 luma-weighted combination.
double weighted_yuv(double y, double u, double v);

struct BdReport {
  double y = 0.0, u = 0.0, v = 0.0;
  double yuv() const { return weighted_yuv(y, u, v); }
};

// CSV row: label,component,bitrate_kbps,psnr_db. Lines starting with '#' and
// a leading "label,..." header are skipped.
struct RdCsvRow {
  std::string label;
  std::string component;
  double kbps = 0.0;
  double psnr = 0.0;
};

std::vector<RdCsvRow> parse_rd_csv(std::istream& in);

// Collects the rows with the given label and component into a curve sorted by
// bitrate. Throws std::invalid_argument if none match.
RdCurve curve_from_rows(const std::vector<RdCsvRow>& rows, const std::string& label,
                        const std::string& component);

}  // namespace uvc
