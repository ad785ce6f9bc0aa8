#include "floquet/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "floquet/error.hpp"

namespace floquet {

namespace {

struct BoundaryHit {};

std::string describe(const ComplexBox& box) {
  std::ostringstream os;
  os.precision(12);
  os << "[" << box.re_min << ", " << box.re_max << "] x [" << box.im_min << ", " << box.im_max << "]";
  return os.str();
}

double segment_phase(const ComplexFunction& f, Complex za, Complex fa, Complex zb, Complex fb, double scale,
                     int depth) {
  if (fa == 0.0 || fb == 0.0) throw BoundaryHit{};
  const double step = std::arg(fb / fa);
  if (std::abs(step) < 0.5 * std::numbers::pi) return step;
  if (depth > 48 || std::abs(zb - za) < 1e-14 * scale) throw BoundaryHit{};
  const Complex zm = 0.5 * (za + zb);
  const Complex fm = f(zm);
  return segment_phase(f, za, fa, zm, fm, scale, depth + 1) + segment_phase(f, zm, fm, zb, fb, scale, depth + 1);
}

int winding_number(const ComplexFunction& f, const ComplexBox& box, int samples_per_edge) {
  const Complex corners[4] = {{box.re_min, box.im_min}, {box.re_max, box.im_min}, {box.re_max, box.im_max},
                              {box.re_min, box.im_max}};
  const double scale = std::max({std::abs(corners[0]), std::abs(corners[2]), box.width(), box.height(), 1e-300});
  std::vector<Complex> z;
  std::vector<Complex> values;
  z.reserve(4 * samples_per_edge + 1);
  for (int edge = 0; edge < 4; ++edge) {
    const Complex from = corners[edge];
    const Complex to = corners[(edge + 1) % 4];
    for (int j = 0; j < samples_per_edge; ++j) z.push_back(from + (to - from) * (static_cast<double>(j) / samples_per_edge));
  }
  z.push_back(corners[0]);
  values.reserve(z.size());
  for (std::size_t i = 0; i + 1 < z.size(); ++i) values.push_back(f(z[i]));
  values.push_back(values.front());

  std::vector<double> magnitudes;
  for (const Complex& v : values) magnitudes.push_back(std::abs(v));
  std::vector<double> sorted = magnitudes;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double m : magnitudes)
    if (!(m > 1e-10 * median)) throw BoundaryHit{};

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) total += segment_phase(f, z[i], values[i], z[i + 1], values[i + 1], scale, 0);
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

void check_cuts(const ComplexBox& box, const std::vector<BranchCut>& cuts) {
  for (const BranchCut& cut : cuts) {
    const double x = cut.origin.real();
    if (x > box.re_min && x <= box.re_max && box.im_min < cut.origin.imag()) {
      std::ostringstream os;
      os.precision(17);
      os << "branch point " << x << " lies in box " << describe(box) << "; split the box at Re = " << x;
      throw DomainError(os.str());
    }
  }
}

// Muller step from three points; returns the correction to x2.
Complex muller_step(Complex x0, Complex x1, Complex x2, Complex f0, Complex f1, Complex f2) {
  const Complex h1 = x1 - x0;
  const Complex h2 = x2 - x1;
  const Complex d1 = (f1 - f0) / h1;
  const Complex d2 = (f2 - f1) / h2;
  const Complex a = (d2 - d1) / (h2 + h1);
  const Complex b = a * h2 + d2;
  const Complex disc = std::sqrt(b * b - 4.0 * a * f2);
  const Complex plus = b + disc;
  const Complex minus = b - disc;
  const Complex den = std::abs(plus) >= std::abs(minus) ? plus : minus;
  if (den == 0.0) return (1.0 + std::abs(x2)) * 1e-3;
  return -2.0 * f2 / den;
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

bool ComplexBox::contains(Complex z, double margin) const {
  return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
         z.imag() <= im_max + margin;
}

ComplexBox ComplexBox::inflated(double fraction) const {
  const double dx = fraction * width();
  const double dy = fraction * height();
  return {re_min - dx, re_max + dx, im_min - dy, im_max + dy};
}

std::vector<ComplexBox> ComplexBox::quadrants() const {
  const Complex c = center();
  return {{re_min, c.real(), im_min, c.imag()},
          {c.real(), re_max, im_min, c.imag()},
          {c.real(), re_max, c.imag(), im_max},
          {re_min, c.real(), c.imag(), im_max}};
}

RootResult polish(const ComplexFunction& f, Complex seed, const PolishOptions& options) {
  RootResult result;
  const double spread = options.initial_spread > 0.0 ? options.initial_spread : 1e-6 * std::max(1.0, std::abs(seed));
  Complex x0 = seed + spread;
  Complex x1 = seed + Complex(0.0, spread);
  Complex x2 = seed;
  Complex f0 = f(x0);
  Complex f1 = f(x1);
  Complex f2 = f(x2);
  bool settled = false;
  double last_step = 0.0;

  for (int it = 1; it <= options.max_iterations; ++it) {
    result.iterations = it;
    if (f2 == 0.0) {
      settled = true;
      last_step = 0.0;
      break;
    }
    const Complex dx = muller_step(x0, x1, x2, f0, f1, f2);
    const Complex x3 = x2 + dx;
    if (!finite(x3) || (options.region && !options.region->contains(x3))) {
      result.eps = x3;
      result.residual = finite(x3) ? std::abs(f(x3)) : INFINITY;
      return result;
    }
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    f2 = f(x3);
    last_step = std::abs(dx);
    if (last_step < options.step_tolerance) {
      settled = true;
      break;
    }
  }

  Complex root = x2;
  if (settled && f2 != 0.0) {
    const double h = 1e-7 * std::max(1.0, std::abs(root));
    const Complex slope = (f(root + h) - f(root - h)) / (2.0 * h);
    if (slope != 0.0 && finite(slope)) {
      const Complex dz = -f2 / slope;
      if (std::abs(dz) < 1e-6 * std::max(1.0, std::abs(root))) {
        root += dz;
        last_step = std::abs(dz);
      }
    }
  }
  result.eps = root;
  result.converged = settled && last_step < options.step_tolerance;
  if (options.region && !options.region->contains(root)) result.converged = false;
  if (options.residual) {
    result.residual = options.residual(root);
    result.converged = result.converged && result.residual < options.residual_tolerance;
  } else {
    result.residual = std::abs(f(root));
  }
  return result;
}

int count_roots_in_box(const ComplexFunction& f, const ComplexBox& box, const CountOptions& options) {
  ComplexBox current = box;
  for (int attempt = 0; attempt <= options.max_inflations; ++attempt) {
    check_cuts(current, options.cuts);
    try {
      return winding_number(f, current, options.samples_per_edge);
    } catch (const BoundaryHit&) {
      current = box.inflated(0.01 * (attempt + 1));
    }
  }
  throw SolverError("boundary_root", "count_roots_in_box: root on the boundary of " + describe(box) +
                                         " after " + std::to_string(options.max_inflations) + " inflations");
}

namespace {

class BoxSearch {
 public:
  BoxSearch(const ComplexFunction& f, const FindOptions& options) : f_(f), options_(options) {}

  void run(const ComplexBox& box) {
    const int count = count_strict(box);
    if (count < 0) {
      // Root on the outer boundary: the public counter inflates.
      search(box.inflated(0.01), count_roots_in_box(f_, box.inflated(0.01), options_.count), 0);
      return;
    }
    search(box, count, 0);
  }

  std::vector<RootResult> take() { return std::move(roots_); }

 private:
  // -1 signals a boundary root.
  int count_strict(const ComplexBox& box) const {
    check_cuts(box, options_.count.cuts);
    try {
      return winding_number(f_, box, options_.count.samples_per_edge);
    } catch (const BoundaryHit&) {
      return -1;
    }
  }

  void search(const ComplexBox& box, int count, int depth) {
    if (count <= 0) return;
    if (count == 1) {
      PolishOptions po = options_.polish;
      po.region = box.inflated(0.5);
      po.initial_spread = 0.05 * std::min(box.width(), box.height());
      const RootResult r = polish(f_, box.center(), po);
      if (r.converged && box.contains(r.eps, 1e-12 * std::max(1.0, std::abs(r.eps)))) {
        roots_.push_back(r);
        return;
      }
    }
    if (depth >= options_.max_depth) {
      if (count == 1) throw SolverError("lost_root", "find_all_in_box: could not polish the root counted in " + describe(box));
      polish_cluster(box, count);
      return;
    }
    split(box, count, depth);
  }

  void split(const ComplexBox& box, int count, int depth) {
    static constexpr double kFractions[] = {0.5, 0.4871, 0.5237, 0.4619, 0.5411};
    for (double fraction : kFractions) {
      const double xm = box.re_min + fraction * box.width();
      const double ym = box.im_min + fraction * box.height();
      const ComplexBox parts[4] = {{box.re_min, xm, box.im_min, ym},
                                   {xm, box.re_max, box.im_min, ym},
                                   {xm, box.re_max, ym, box.im_max},
                                   {box.re_min, xm, ym, box.im_max}};
      int counts[4];
      bool clean = true;
      int total = 0;
      for (int i = 0; i < 4 && clean; ++i) {
        counts[i] = count_strict(parts[i]);
        clean = counts[i] >= 0;
        total += counts[i];
      }
      if (!clean) continue;
      if (total != count) {
        throw SolverError("lost_root", "find_all_in_box: quadrant counts sum to " + std::to_string(total) +
                                           " but box " + describe(box) + " holds " + std::to_string(count));
      }
      for (int i = 0; i < 4; ++i) search(parts[i], counts[i], depth + 1);
      return;
    }
    throw SolverError("boundary_root", "find_all_in_box: every split of " + describe(box) + " hits a root");
  }

  // Several roots in a tiny box: polish repeatedly with deflation.
  void polish_cluster(const ComplexBox& box, int count) {
    std::vector<Complex> found;
    for (int i = 0; i < count; ++i) {
      const ComplexFunction deflated = [&](Complex z) {
        Complex value = f_(z);
        for (const Complex& r : found) value /= (z - r);
        return value;
      };
      PolishOptions po = options_.polish;
      po.region = box.inflated(0.5);
      po.initial_spread = 0.05 * std::min(box.width(), box.height());
      po.residual = nullptr;
      RootResult r = polish(deflated, box.center(), po);
      if (!r.converged) throw SolverError("lost_root", "find_all_in_box: deflation failed in " + describe(box));
      if (options_.polish.residual) {
        r.residual = options_.polish.residual(r.eps);
        r.converged = r.residual < options_.polish.residual_tolerance;
      }
      found.push_back(r.eps);
      roots_.push_back(r);
    }
  }

  const ComplexFunction& f_;
  const FindOptions& options_;
  std::vector<RootResult> roots_;
};

}  // namespace

std::vector<RootResult> find_all_in_box(const ComplexFunction& f, const ComplexBox& box, const FindOptions& options) {
  // Vertical strips between branch cuts.
  std::vector<double> cuts;
  for (const BranchCut& cut : options.count.cuts) {
    const double x = cut.origin.real();
    if (x > box.re_min && x <= box.re_max && box.im_min < cut.origin.imag()) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<ComplexBox> strips;
  double left = box.re_min;
  for (double x : cuts) {
    const double gap = 1e-9 * std::max(1.0, std::abs(x));
    if (x - gap > left) strips.push_back({left, x - gap, box.im_min, box.im_max});
    left = x;
  }
  if (box.re_max > left) strips.push_back({left, box.re_max, box.im_min, box.im_max});

  BoxSearch search(f, options);
  for (const ComplexBox& strip : strips) search.run(strip);
  std::vector<RootResult> roots = search.take();

  std::sort(roots.begin(), roots.end(), [](const RootResult& x, const RootResult& y) {
    return x.eps.real() < y.eps.real() || (x.eps.real() == y.eps.real() && x.eps.imag() < y.eps.imag());
  });
  std::vector<RootResult> unique;
  for (const RootResult& r : roots) {
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const RootResult& u) {
      return std::abs(u.eps - r.eps) < options.duplicate_distance;
    });
    if (!duplicate) unique.push_back(r);
  }
  return unique;
}

}  // namespace floquet
