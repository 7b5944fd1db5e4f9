#include "socnav/slm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

// Below this separation two positions are treated as coincident.
constexpr double kContactDistance = 1e-12;

double clamped_pair(const Pose& agent, const Pose& person, double d,
                    const SlmParams& params) {
  const double line = std::atan2(person.y() - agent.y(), person.x() - agent.x());
  const double back = line + std::numbers::pi;
  constexpr double kQuarter = std::numbers::pi / 2.0;
  const double i_agent =
      individual_influence(agent.heading(), line, agent.heading() + kQuarter,
                           params.m_agent, params.n_agent, params);
  const double i_person =
      individual_influence(person.heading(), back, person.heading() + kQuarter,
                           params.m_person, params.n_person, params);
  const double raw = i_agent * i_person / (d * d);
  return std::min(raw / params.k_cap, 1.0);
}

}  // namespace

double normalize_angle(double radians) {
  double wrapped = std::remainder(radians, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

Pose::Pose(double x, double y, double heading) {
  set_position(x, y);
  set_heading(heading);
}

void Pose::set_position(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("pose position must be finite");
  }
  x_ = x;
  y_ = y;
}

void SlmParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(k_cap > 0.0)) {
    throw std::invalid_argument("slm params: a, b and k_cap must be positive");
  }
}

double heading_factor(double theta_h) {
  const double c = std::cos(theta_h);
  return c >= 0.0 ? c : 0.0;
}

double collision_avoidance(double theta, const SlmParams& params) {
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  return params.a * params.b /
         std::sqrt(params.a * params.a * cs * cs + params.b * params.b * sn * sn);
}

double individual_influence(double entity_heading, double line_to_other,
                            double body_long_axis, double m, double n,
                            const SlmParams& params) {
  double value = 0.0;
  if (params.enable_hrsc) value += m * heading_factor(line_to_other - entity_heading);
  if (params.enable_hisc) value += n;
  if (params.enable_cac) {
    value += params.c * collision_avoidance(line_to_other - body_long_axis, params);
  }
  return value;
}

double pairwise_field(const Pose& agent, const Pose& person,
                      const SlmParams& params) {
  const double d = std::hypot(person.x() - agent.x(), person.y() - agent.y());
  if (d <= kContactDistance) throw DegenerateDistanceError(0);
  return clamped_pair(agent, person, d, params);
}

FieldSample total_field(const Pose& agent, std::span<const Pose> persons,
                        const SlmParams& params) {
  FieldSample sample{agent, {}, 0.0};
  sample.per_person.reserve(persons.size());
  for (std::size_t k = 0; k < persons.size(); ++k) {
    const double d =
        std::hypot(persons[k].x() - agent.x(), persons[k].y() - agent.y());
    if (d <= kContactDistance) throw DegenerateDistanceError(k);
    const double value = clamped_pair(agent, persons[k], d, params);
    sample.per_person.push_back(value);
    sample.total += value;
  }
  return sample;
}

FieldSample total_field_contact_clamped(const Pose& agent,
                                        std::span<const Pose> persons,
                                        const SlmParams& params) {
  FieldSample sample{agent, {}, 0.0};
  sample.per_person.reserve(persons.size());
  for (const Pose& person : persons) {
    const double d = std::hypot(person.x() - agent.x(), person.y() - agent.y());
    const double value =
        d <= kContactDistance ? 1.0 : clamped_pair(agent, person, d, params);
    sample.per_person.push_back(value);
    sample.total += value;
  }
  return sample;
}

FieldGrid rasterize_field(std::span<const Pose> persons, ProbeHeading probe,
                          const Bounds& bounds, double resolution,
                          const SlmParams& params) {
  const double width = bounds.x_max - bounds.x_min;
  const double height = bounds.y_max - bounds.y_min;
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidBoundsError("field bounds have zero area");
  }
  if (!(resolution > 0.0)) {
    throw InvalidBoundsError("grid resolution must be positive");
  }

  FieldGrid grid;
  grid.x0 = bounds.x_min;
  grid.y0 = bounds.y_min;
  grid.resolution = resolution;
  // The small slack keeps 15 / 0.15 from rounding up to 101 columns.
  grid.ncols = static_cast<std::size_t>(std::ceil(width / resolution - 1e-9));
  grid.nrows = static_cast<std::size_t>(std::ceil(height / resolution - 1e-9));
  grid.values.assign(grid.ncols * grid.nrows, 0.0);

  for (std::size_t row = 0; row < grid.nrows; ++row) {
    const double y = bounds.y_min + (static_cast<double>(row) + 0.5) * resolution;
    for (std::size_t col = 0; col < grid.ncols; ++col) {
      const double x =
          bounds.x_min + (static_cast<double>(col) + 0.5) * resolution;
      double heading = 0.0;
      if (const auto* fixed = std::get_if<FixedHeading>(&probe)) {
        heading = fixed->radians;
      } else if (!persons.empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (const Pose& p : persons) {
          const double d = std::hypot(p.x() - x, p.y() - y);
          if (d < best) {
            best = d;
            heading = std::atan2(p.y() - y, p.x() - x);
          }
        }
      }
      const Pose probe_pose(x, y, heading);
      grid.values[row * grid.ncols + col] =
          total_field_contact_clamped(probe_pose, persons, params).total;
    }
  }
  return grid;
}

void write_grid_csv(const FieldGrid& grid, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# %.9g,%.9g,%.9g,", grid.x0, grid.y0,
                grid.resolution);
  out << buf << grid.ncols << ',' << grid.nrows << '\n';
  for (std::size_t row = 0; row < grid.nrows; ++row) {
    for (std::size_t col = 0; col < grid.ncols; ++col) {
      std::snprintf(buf, sizeof(buf), "%.9g", grid.at(row, col));
      if (col > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace socnav
