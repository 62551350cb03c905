#include "detmac/correlation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "detmac/quadrature.hpp"

namespace detmac {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Phase of a plane wave arriving from horizontal direction theta across the
// antenna displacement d: (2*pi/lambda) (d_x cos(theta) + d_y sin(theta)).
// Propagation is isotropic vertically, so the vertical displacement carries
// no phase; the resulting entries are positive definite in the displacement
// (Bochner) and reduce to the scalar-distance form for a linear array.
cplx sector_entry(const std::array<double, 3>& xa, const std::array<double, 3>& xb,
                  double wavelength, const AngularSpread& spread) {
    const double dx = (xa[0] - xb[0]) * kTwoPi / wavelength;
    const double dy = (xa[1] - xb[1]) * kTwoPi / wavelength;
    if (dx == 0.0 && dy == 0.0) return 1.0;
    const double lo = spread.theta_min;
    const double hi = spread.unwrapped_max();
    const double arc = hi - lo;
    const double tol = 1e-10;
    const auto phase = [&](double t) { return dx * std::cos(t) + dy * std::sin(t); };
    const double re =
        integrate_adaptive([&](double t) { return std::cos(phase(t)); }, lo, hi, tol);
    const double im =
        integrate_adaptive([&](double t) { return std::sin(phase(t)); }, lo, hi, tol);
    return cplx(re / arc, im / arc);
}

template <typename EntryLoop>
CorrelationMatrix build_jakes(const AntennaArray& array, const AngularSpread& spread,
                              CorrelationSide side, EntryLoop&& loop) {
    array.validate();
    spread.validate();
    const int n = array.size();

    // Flattened strict upper triangle, entries independent of each other.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    std::vector<cplx> values(pairs.size());

    loop(static_cast<int>(pairs.size()), [&](int idx) {
        const auto [a, b] = pairs[idx];
        values[idx] =
            sector_entry(array.positions[a], array.positions[b], array.wavelength, spread);
    });

    CMatrix upper(n, n);
    for (int i = 0; i < n; ++i) upper(i, i) = 1.0;
    for (size_t idx = 0; idx < pairs.size(); ++idx)
        upper(pairs[idx].first, pairs[idx].second) = values[idx];
    return CorrelationMatrix{HermitianMatrix::from_upper(upper), side};
}

}  // namespace

void AntennaArray::validate() const {
    if (positions.empty()) throw std::invalid_argument("AntennaArray: needs at least one antenna");
    if (!(wavelength > 0.0)) throw std::invalid_argument("AntennaArray: wavelength must be > 0");
    for (const auto& p : positions)
        for (double c : p)
            if (!std::isfinite(c))
                throw std::invalid_argument("AntennaArray: positions must be finite");
}

double AngularSpread::arc_length() const { return unwrapped_max() - theta_min; }

double AngularSpread::unwrapped_max() const {
    double hi = theta_max;
    if (hi <= theta_min) hi += kTwoPi;
    return hi;
}

void AngularSpread::validate() const {
    if (!std::isfinite(theta_min) || !std::isfinite(theta_max))
        throw std::invalid_argument("AngularSpread: angles must be finite");
    const double arc = arc_length();
    if (!(arc > 0.0) || arc > kTwoPi + 1e-12)
        throw std::invalid_argument("AngularSpread: arc length must lie in (0, 2*pi]");
}

CorrelationMatrix jakes_correlation(const AntennaArray& array, const AngularSpread& spread,
                                    CorrelationSide side) {
    return build_jakes(array, spread, side, [](int count, auto&& body) {
        std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int idx = 0; idx < count; ++idx) {
            try {
                body(idx);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    });
}

CorrelationMatrix jakes_correlation_serial(const AntennaArray& array, const AngularSpread& spread,
                                           CorrelationSide side) {
    return build_jakes(array, spread, side, [](int count, auto&& body) {
        for (int idx = 0; idx < count; ++idx) body(idx);
    });
}

AntennaArray grid_array(int nx, int ny, int nz, double spacing, double wavelength) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw std::invalid_argument("grid_array: grid dimensions must be >= 1");
    if (!(spacing > 0.0)) throw std::invalid_argument("grid_array: spacing must be > 0");
    AntennaArray array;
    array.wavelength = wavelength;
    array.positions.reserve(static_cast<size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                array.positions.push_back({i * spacing, j * spacing, k * spacing});
    array.validate();
    return array;
}

SystemConfig scenario_two_user(int n, double spacing, double wavelength, ArrayGeometry geometry) {
    if (n < 1) throw std::invalid_argument("scenario_two_user: n must be >= 1");
    AntennaArray array;
    if (geometry == ArrayGeometry::linear) {
        array = grid_array(n, 1, 1, spacing, wavelength);
    } else {
        const int side = static_cast<int>(std::lround(std::cbrt(static_cast<double>(n))));
        if (side * side * side != n)
            throw std::invalid_argument("scenario_two_user: cubic geometry needs a cube number, got " +
                                        std::to_string(n));
        array = grid_array(side, side, side, spacing, wavelength);
    }

    const AngularSpread tx1{0.0, M_PI};
    const AngularSpread tx2{M_PI / 3.0, 4.0 * M_PI / 3.0};
    const AngularSpread rx1{2.0 * M_PI / 3.0, -2.0 * M_PI / 3.0};
    const AngularSpread rx2{M_PI, 0.0};

    SystemConfig cfg;
    cfg.num_users = 2;
    cfg.num_rx = n;
    cfg.num_tx = {n, n};
    cfg.tx_corr = {jakes_correlation(array, tx1, CorrelationSide::transmit).matrix,
                   jakes_correlation(array, tx2, CorrelationSide::transmit).matrix};
    cfg.rx_corr = {jakes_correlation(array, rx1, CorrelationSide::receive).matrix,
                   jakes_correlation(array, rx2, CorrelationSide::receive).matrix};
    cfg.sigma2 = 1.0;
    cfg.power_budget = {1.0, 1.0};
    cfg.validate();
    return cfg;
}

}  // namespace detmac
