#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace socnav {

// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

// Planar position plus facing direction. Heading is measured counter-clockwise
// from +x and kept normalized into (-pi, pi].
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double heading);

  double x() const { return x_; }
  double y() const { return y_; }
  double heading() const { return heading_; }

  void set_position(double x, double y);
  void set_heading(double heading) { heading_ = normalize_angle(heading); }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double heading_ = 0.0;
};

// Fitted social-field constants. m scales the heading-relevant term, n is the
// heading-irrelevant baseline, c weights the body-ellipse term and k_cap
// normalizes the raw field before clamping.
struct SlmParams {
  double m_agent = 0.321;
  double n_agent = 0.856;
  double m_person = 0.438;
  double n_person = 0.630;
  double a = 0.285;  // ellipse semi-axis along the shoulders
  double b = 0.175;  // ellipse semi-axis along the chest depth
  double c = 1.430;
  double k_cap = 10.180;
  bool enable_hrsc = true;
  bool enable_hisc = true;
  bool enable_cac = true;

  // Throws std::invalid_argument unless a, b, k_cap are positive.
  void validate() const;

};

struct FieldSample {
  Pose query;
  std::vector<double> per_person;
  double total = 0.0;
};

// max(cos(theta_h), 0).
double heading_factor(double theta_h);

// Radius of the body ellipse seen along a direction at angle theta from the
// long axis: ab / sqrt(a^2 cos^2 + b^2 sin^2).
double collision_avoidance(double theta, const SlmParams& params);

// m f(theta_h) + n + c I_CA for a single party. theta_h is measured between
// entity_heading and line_to_other; the ellipse angle between line_to_other and
// body_long_axis. Ablation switches in params zero the matching coefficient.
double individual_influence(double entity_heading, double line_to_other,
                            double body_long_axis, double m, double n,
                            const SlmParams& params);

// Clamped pairwise field min(I_agent I_person / (d^2 K), 1). Throws
// DegenerateDistanceError(0) when the positions coincide.
double pairwise_field(const Pose& agent, const Pose& person,
                      const SlmParams& params);

// Sum of pairwise_field over persons. DegenerateDistanceError carries the
// index of the offending person.
FieldSample total_field(const Pose& agent, std::span<const Pose> persons,
                        const SlmParams& params);

// Same as total_field but a person sitting exactly on the agent contributes
// the clamp limit 1.0 instead of throwing.
FieldSample total_field_contact_clamped(const Pose& agent,
                                        std::span<const Pose> persons,
                                        const SlmParams& params);

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

struct FixedHeading {
  double radians = 0.0;
};
struct TowardNearest {};
using ProbeHeading = std::variant<FixedHeading, TowardNearest>;

// Row-major grid of field totals sampled at cell centers. Row 0 is the row
// nearest y_min; column 0 the column nearest x_min.
struct FieldGrid {
  double x0 = 0.0;
  double y0 = 0.0;
  double resolution = 0.0;
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const {
    return values[row * ncols + col];
  }
};

// Throws InvalidBoundsError on zero-area bounds or non-positive resolution.
FieldGrid rasterize_field(std::span<const Pose> persons, ProbeHeading probe,
                          const Bounds& bounds, double resolution,
                          const SlmParams& params);

// Header line "# <x0>,<y0>,<resolution>,<ncols>,<nrows>", then one line per
// grid row, values at 9 significant digits.
void write_grid_csv(const FieldGrid& grid, std::ostream& out);

}  // namespace socnav
